//! JSON formats for subspaces, relations and computed results.
//!
//! Complex numbers are `[re, im]` pairs, vectors are lists of complex
//! numbers and matrices are lists of rows. Subspace bases and relation
//! graphs are canonicalised on load; relations are always written back in
//! graph form together with their derived dimensions.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::block::BlockRepresentation;
use crate::error::{Error, Result};
use crate::generator::InstanceSpec;
use crate::kernel::{self, ComplexMatrix, Tolerances};
use crate::nonneg::NonnegSelfAdjointRelation;
use crate::relation::LinearRelation;
use crate::schur::SchurResult;
use crate::subspace::Subspace;

pub type JsonVector = Vec<[f64; 2]>;
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient_dim: usize,
    pub basis: Vec<JsonVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReprJson {
    Graph {
        basis: Vec<JsonVector>,
    },
    Matrix {
        matrix: JsonMatrix,
    },
    OperatorMul {
        domain_basis: Vec<JsonVector>,
        matrix_on_domain: JsonMatrix,
        mul_basis: Vec<JsonVector>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedDims {
    pub dom_dim: usize,
    pub ran_dim: usize,
    pub ker_dim: usize,
    pub mul_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub repr: ReprJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived: Option<DerivedDims>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validated: Option<bool>,
}

fn check_finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Parse(format!("non-finite entry {x}")))
    }
}

fn vector_from_json(v: &JsonVector, len: usize, what: &str) -> Result<Vec<kernel::C64>> {
    if v.len() != len {
        return Err(Error::Parse(format!(
            "{what}: vector of length {} where {len} is expected",
            v.len()
        )));
    }
    v.iter()
        .map(|&[re, im]| Ok(kernel::c(check_finite(re)?, check_finite(im)?)))
        .collect()
}

fn vectors_to_matrix(vs: &[JsonVector], len: usize, what: &str) -> Result<ComplexMatrix> {
    let mut m = kernel::zeros(len, vs.len());
    for (j, v) in vs.iter().enumerate() {
        let col = vector_from_json(v, len, what)?;
        for (i, z) in col.into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

fn columns_to_json(m: &ComplexMatrix) -> Vec<JsonVector> {
    m.column_iter()
        .map(|col| col.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_to_json(m: &ComplexMatrix) -> JsonMatrix {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix, nrows: usize, ncols: usize) -> Result<ComplexMatrix> {
    if rows.len() != nrows {
        return Err(Error::Parse(format!(
            "matrix has {} rows, expected {nrows}",
            rows.len()
        )));
    }
    let mut m = kernel::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        let r = vector_from_json(row, ncols, "matrix row")?;
        for (j, z) in r.into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

pub fn subspace_to_json(s: &Subspace) -> SubspaceJson {
    SubspaceJson {
        ambient_dim: s.ambient_dim(),
        basis: columns_to_json(s.basis()),
    }
}

pub fn subspace_from_json(j: &SubspaceJson, tol: &Tolerances) -> Result<Subspace> {
    let m = vectors_to_matrix(&j.basis, j.ambient_dim, "subspace basis")?;
    Ok(Subspace::from_columns(&m, tol))
}

pub fn relation_to_json(t: &LinearRelation, validated: bool, tol: &Tolerances) -> RelationJson {
    RelationJson {
        dim_in: t.dim_in(),
        dim_out: t.dim_out(),
        repr: ReprJson::Graph {
            basis: columns_to_json(t.graph().basis()),
        },
        derived: Some(DerivedDims {
            dom_dim: t.dom(tol).dim(),
            ran_dim: t.ran(tol).dim(),
            ker_dim: t.ker(tol).dim(),
            mul_dim: t.mul(tol).dim(),
        }),
        validated: validated.then_some(true),
    }
}

pub fn nonneg_to_json(a: &NonnegSelfAdjointRelation, tol: &Tolerances) -> RelationJson {
    relation_to_json(a.relation(), true, tol)
}

pub fn relation_from_json(j: &RelationJson, tol: &Tolerances) -> Result<LinearRelation> {
    let (n, m) = (j.dim_in, j.dim_out);
    match &j.repr {
        ReprJson::Graph { basis } => {
            let pairs = vectors_to_matrix(basis, n + m, "graph basis")?;
            LinearRelation::from_graph_matrix(&pairs, n, m, tol)
        }
        ReprJson::Matrix { matrix } => Ok(LinearRelation::from_matrix(
            &matrix_from_json(matrix, m, n)?,
            tol,
        )),
        ReprJson::OperatorMul {
            domain_basis,
            matrix_on_domain,
            mul_basis,
        } => {
            let dom_frame = vectors_to_matrix(domain_basis, n, "domain basis")?;
            let k = domain_basis.len();
            let images = matrix_from_json(matrix_on_domain, m, k)?;
            let mul = Subspace::from_columns(&vectors_to_matrix(mul_basis, m, "mul basis")?, tol);
            // The given images belong to the given (possibly non-orthonormal)
            // domain vectors, so the graph is spanned by the pairs directly.
            let extra = mul.dim();
            let mut pairs = kernel::zeros(n + m, k + extra);
            pairs.view_mut((0, 0), (n, k)).copy_from(&dom_frame);
            pairs.view_mut((n, 0), (m, k)).copy_from(&images);
            pairs.view_mut((n, k), (m, extra)).copy_from(mul.basis());
            LinearRelation::from_graph_matrix(&pairs, n, m, tol)
        }
    }
}

pub fn parse_relation(text: &str, tol: &Tolerances) -> Result<LinearRelation> {
    let j: RelationJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    relation_from_json(&j, tol)
}

pub fn parse_subspace(text: &str, tol: &Tolerances) -> Result<Subspace> {
    let j: SubspaceJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    subspace_from_json(&j, tol)
}

pub fn parse_spec(text: &str) -> Result<InstanceSpec> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn block_to_json(rep: &BlockRepresentation, tol: &Tolerances) -> Value {
    let rel = |t: &LinearRelation| relation_to_json(t, false, tol);
    json!({
        "S": subspace_to_json(&rep.s),
        "D1": subspace_to_json(&rep.d1),
        "D2": subspace_to_json(&rep.d2),
        "M1": subspace_to_json(&rep.m1),
        "M2": subspace_to_json(&rep.m2),
        "N1": subspace_to_json(&rep.n1),
        "N2": subspace_to_json(&rep.n2),
        "a": rel(&rep.a),
        "b": rel(&rep.b),
        "c": rel(&rep.c),
        "d": rel(&rep.d),
        "f": matrix_to_json(&rep.f),
        "g": matrix_to_json(&rep.g),
        "V1": matrix_to_json(&rep.v1),
        "V2": matrix_to_json(&rep.v2),
        "Df": matrix_to_json(&rep.df),
        "Dg": matrix_to_json(&rep.dg),
    })
}

/// `{"schur", "compression", "L", "diagnostics"}`; `extra` entries are
/// merged into the diagnostics object.
pub fn schur_to_json(
    result: &SchurResult,
    l: &Subspace,
    extra: &[(&str, Value)],
    tol: &Tolerances,
) -> Value {
    let mut diagnostics = serde_json::to_value(result.diagnostics).expect("plain struct");
    if let Value::Object(map) = &mut diagnostics {
        for (k, v) in extra {
            map.insert((*k).to_string(), v.clone());
        }
    }
    json!({
        "schur": nonneg_to_json(&result.schur, tol),
        "compression": nonneg_to_json(&result.compression, tol),
        "L": subspace_to_json(l),
        "diagnostics": diagnostics,
    })
}
