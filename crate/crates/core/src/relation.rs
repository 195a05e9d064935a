//! Linear relations between C^n and C^m, represented by their graphs.
//!
//! A relation `T ⊆ H × K` is stored as a [`Subspace`] of `C^(n+m)`; the
//! first `n` coordinates of a graph vector are the input `x`, the last `m`
//! the output `y`. All set operations reduce to subspace arithmetic.
//!
//! In finite dimensions every relation is closed, so [`LinearRelation::closure`]
//! is the identity. For the same reason every core of a relation equals its
//! full domain, and no separate core predicate is offered.

use crate::error::{Error, Result};
use crate::kernel::{self, ComplexMatrix, Tolerances, C64};
use crate::subspace::Subspace;

#[derive(Debug, Clone)]
pub struct LinearRelation {
    dim_in: usize,
    dim_out: usize,
    graph: Subspace,
}

/// `T = T₀ ⊕̂ ({0} × mul T)` with `T₀` single-valued.
#[derive(Debug, Clone)]
pub struct OperatorPart {
    pub domain: Subspace,
    /// Images of the domain basis vectors, `dim_out × dim(domain)`.
    pub matrix: ComplexMatrix,
    pub mul: Subspace,
}

impl OperatorPart {
    /// `T₀` as a `dim_out × dim_in` matrix that vanishes on `dom(T)⊥`.
    pub fn full_matrix(&self) -> ComplexMatrix {
        &self.matrix * self.domain.basis().adjoint()
    }

    /// The graph of `T₀` alone.
    pub fn operator_relation(&self, tol: &Tolerances) -> Result<LinearRelation> {
        LinearRelation::from_operator_and_mul(
            &self.domain,
            &self.matrix,
            &Subspace::zero(self.mul.ambient_dim()),
            tol,
        )
    }

    /// `T₀ ⊕̂ ({0} × mul)`.
    pub fn reassemble(&self, tol: &Tolerances) -> Result<LinearRelation> {
        LinearRelation::from_operator_and_mul(&self.domain, &self.matrix, &self.mul, tol)
    }
}

fn mismatch(what: &str, a: (usize, usize), b: (usize, usize)) -> Error {
    Error::DimensionMismatch(format!(
        "{what}: relation {}→{} vs {}→{}",
        a.0, a.1, b.0, b.1
    ))
}

impl LinearRelation {
    /// Relation whose graph is spanned by the columns of `pairs`
    /// (`(dim_in + dim_out) × r`).
    pub fn from_graph_matrix(
        pairs: &ComplexMatrix,
        dim_in: usize,
        dim_out: usize,
        tol: &Tolerances,
    ) -> Result<Self> {
        if pairs.nrows() != dim_in + dim_out {
            return Err(Error::DimensionMismatch(format!(
                "graph vectors have length {}, expected {}",
                pairs.nrows(),
                dim_in + dim_out
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            graph: Subspace::from_columns(pairs, tol),
        })
    }

    pub fn from_graph(
        vectors: &[Vec<C64>],
        dim_in: usize,
        dim_out: usize,
        tol: &Tolerances,
    ) -> Result<Self> {
        let graph = Subspace::span(vectors, dim_in + dim_out, tol)?;
        Ok(Self {
            dim_in,
            dim_out,
            graph,
        })
    }

    /// Everywhere-defined operator `{(x, Mx)}`.
    pub fn from_matrix(m: &ComplexMatrix, tol: &Tolerances) -> Self {
        let (rows, cols) = m.shape();
        let mut pairs = kernel::zeros(cols + rows, cols);
        pairs.rows_mut(0, cols).copy_from(&kernel::identity(cols));
        pairs.rows_mut(cols, rows).copy_from(m);
        Self {
            dim_in: cols,
            dim_out: rows,
            graph: Subspace::from_columns(&pairs, tol),
        }
    }

    /// `{(x, M·coords(x)) : x ∈ domain} ⊕̂ ({0} × mul)`.
    pub fn from_operator_and_mul(
        domain: &Subspace,
        matrix_on_domain: &ComplexMatrix,
        mul: &Subspace,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = domain.ambient_dim();
        let m = mul.ambient_dim();
        let k = domain.dim();
        if matrix_on_domain.shape() != (m, k) {
            return Err(Error::DimensionMismatch(format!(
                "matrix on domain is {}x{}, expected {}x{}",
                matrix_on_domain.nrows(),
                matrix_on_domain.ncols(),
                m,
                k
            )));
        }
        let l = mul.dim();
        let mut pairs = kernel::zeros(n + m, k + l);
        pairs.view_mut((0, 0), (n, k)).copy_from(domain.basis());
        pairs.view_mut((n, 0), (m, k)).copy_from(matrix_on_domain);
        pairs.view_mut((n, k), (m, l)).copy_from(mul.basis());
        Self::from_graph_matrix(&pairs, n, m, tol)
    }

    pub fn identity(n: usize, tol: &Tolerances) -> Self {
        Self::from_matrix(&kernel::identity(n), tol)
    }

    /// `{(x, 0) : x ∈ domain}` into C^dim_out.
    pub fn zero_on(domain: &Subspace, dim_out: usize, tol: &Tolerances) -> Result<Self> {
        Self::from_operator_and_mul(
            domain,
            &kernel::zeros(dim_out, domain.dim()),
            &Subspace::zero(dim_out),
            tol,
        )
    }

    /// `{0} × mul`.
    pub fn pure_mul(dim_in: usize, mul: &Subspace, tol: &Tolerances) -> Result<Self> {
        Self::from_operator_and_mul(
            &Subspace::zero(dim_in),
            &kernel::zeros(mul.ambient_dim(), 0),
            mul,
            tol,
        )
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    fn inputs(&self) -> ComplexMatrix {
        self.graph.basis().rows(0, self.dim_in).into_owned()
    }

    fn outputs(&self) -> ComplexMatrix {
        self.graph
            .basis()
            .rows(self.dim_in, self.dim_out)
            .into_owned()
    }

    fn with_graph_columns(&self, x: &ComplexMatrix, y: &ComplexMatrix, tol: &Tolerances) -> Self {
        let r = x.ncols();
        let mut pairs = kernel::zeros(x.nrows() + y.nrows(), r);
        pairs.rows_mut(0, x.nrows()).copy_from(x);
        pairs.rows_mut(x.nrows(), y.nrows()).copy_from(y);
        Self {
            dim_in: x.nrows(),
            dim_out: y.nrows(),
            graph: Subspace::from_columns(&pairs, tol),
        }
    }

    pub fn dom(&self, tol: &Tolerances) -> Subspace {
        Subspace::from_columns(&self.inputs(), tol)
    }

    pub fn ran(&self, tol: &Tolerances) -> Subspace {
        Subspace::from_columns(&self.outputs(), tol)
    }

    /// `{x : (x, 0) ∈ T}`
    pub fn ker(&self, tol: &Tolerances) -> Subspace {
        let null = kernel::null_space(&self.outputs(), tol);
        Subspace::from_columns(&(self.inputs() * null), tol)
    }

    /// `{y : (0, y) ∈ T}`
    pub fn mul(&self, tol: &Tolerances) -> Subspace {
        let null = kernel::null_space(&self.inputs(), tol);
        Subspace::from_columns(&(self.outputs() * null), tol)
    }

    pub fn is_operator(&self, tol: &Tolerances) -> bool {
        self.mul(tol).dim() == 0
    }

    /// `T* = J(T⊥)` with `J(x, y) = (y, −x)`.
    pub fn adjoint(&self, tol: &Tolerances) -> Self {
        let perp = self.graph.complement(tol);
        let b = perp.basis();
        let mut pairs = kernel::zeros(self.dim_in + self.dim_out, b.ncols());
        pairs
            .rows_mut(0, self.dim_out)
            .copy_from(&b.rows(self.dim_in, self.dim_out));
        pairs
            .rows_mut(self.dim_out, self.dim_in)
            .copy_from(&(-b.rows(0, self.dim_in)));
        Self {
            dim_in: self.dim_out,
            dim_out: self.dim_in,
            graph: Subspace::from_columns(&pairs, tol),
        }
    }

    pub fn closure(&self) -> Self {
        self.clone()
    }

    /// Relation sum `{(x, y + z) : (x, y) ∈ T, (x, z) ∈ S}`.
    pub fn add(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        self.same_shape(other, "add")?;
        let (x1, y1) = (self.inputs(), self.outputs());
        let (x2, y2) = (other.inputs(), other.outputs());
        let (r1, r2) = (x1.ncols(), x2.ncols());
        let mut stacked = kernel::zeros(self.dim_in, r1 + r2);
        stacked.columns_mut(0, r1).copy_from(&x1);
        stacked.columns_mut(r1, r2).copy_from(&(-&x2));
        let null = kernel::null_space(&stacked, tol);
        let a = null.rows(0, r1);
        let b = null.rows(r1, r2);
        let x = &x1 * a;
        let y = &y1 * a + &y2 * b;
        Ok(self.with_graph_columns(&x, &y, tol))
    }

    /// Componentwise sum `T +̂ S` (sum of graphs).
    pub fn cw_sum(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        self.same_shape(other, "cw_sum")?;
        Ok(Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            graph: self.graph.sum(&other.graph, tol)?,
        })
    }

    /// Product `self ∘ inner = {(x, y) : (x, z) ∈ inner, (z, y) ∈ self}`.
    pub fn compose(&self, inner: &Self, tol: &Tolerances) -> Result<Self> {
        if inner.dim_out != self.dim_in {
            return Err(mismatch(
                "compose",
                (self.dim_in, self.dim_out),
                (inner.dim_in, inner.dim_out),
            ));
        }
        let (x, z1) = (inner.inputs(), inner.outputs());
        let (z2, y) = (self.inputs(), self.outputs());
        let (r1, r2) = (x.ncols(), z2.ncols());
        let mut stacked = kernel::zeros(self.dim_in, r1 + r2);
        stacked.columns_mut(0, r1).copy_from(&z1);
        stacked.columns_mut(r1, r2).copy_from(&(-&z2));
        let null = kernel::null_space(&stacked, tol);
        let xs = &x * null.rows(0, r1);
        let ys = &y * null.rows(r1, r2);
        Ok(self.with_graph_columns(&xs, &ys, tol))
    }

    /// `T|_U = {(x, y) ∈ T : x ∈ U}`.
    pub fn restrict(&self, u: &Subspace, tol: &Tolerances) -> Result<Self> {
        if u.ambient_dim() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "restriction to a subspace of C^{} for a relation on C^{}",
                u.ambient_dim(),
                self.dim_in
            )));
        }
        let outside = u.complement(tol);
        let constraint = outside.basis().adjoint() * self.inputs();
        let null = kernel::null_space(&constraint, tol);
        let pairs = self.graph.basis() * null;
        Self::from_graph_matrix(&pairs, self.dim_in, self.dim_out, tol)
    }

    /// `T(U) = {y : (x, y) ∈ T, x ∈ U}`; always contains `mul T`.
    pub fn image(&self, u: &Subspace, tol: &Tolerances) -> Result<Subspace> {
        Ok(self.restrict(u, tol)?.ran(tol))
    }

    /// `{(x, M y) : (x, y) ∈ T}`.
    pub fn left_mul(&self, m: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if m.ncols() != self.dim_out {
            return Err(Error::DimensionMismatch(format!(
                "left factor has {} columns, relation outputs C^{}",
                m.ncols(),
                self.dim_out
            )));
        }
        Ok(self.with_graph_columns(&self.inputs(), &(m * self.outputs()), tol))
    }

    /// `T₀ ⊕̂ ({0} × mul T)` where `T₀` maps `dom T` into `(mul T)⊥`.
    pub fn operator_part(&self, tol: &Tolerances) -> Result<OperatorPart> {
        let mul = self.mul(tol);
        let domain = self.dom(tol);
        let keep = kernel::identity(self.dim_out) - mul.projector();
        let t0 = self.with_graph_columns(&self.inputs(), &(keep * self.outputs()), tol);
        let x0 = t0.inputs();
        let y0 = t0.outputs();
        if x0.ncols() != domain.dim() {
            return Err(Error::InternalInconsistency(format!(
                "operator part has a {}-dimensional graph over a {}-dimensional domain",
                x0.ncols(),
                domain.dim()
            )));
        }
        // T₀ · coords = Y₀ C⁻¹ with C = Q* X₀.
        let coords = domain.to_coords(&x0);
        let matrix = kernel::pseudo_apply_inverse(&coords.adjoint(), &y0.adjoint(), tol)
            .map_err(|e| {
                Error::InternalInconsistency(format!("operator part is not single-valued: {e}"))
            })?
            .adjoint();
        Ok(OperatorPart {
            domain,
            matrix,
            mul,
        })
    }

    pub fn gap(&self, other: &Self) -> Result<f64> {
        self.same_shape(other, "gap")?;
        self.graph.gap(&other.graph)
    }

    pub fn equals(&self, other: &Self, tol: &Tolerances) -> Result<bool> {
        Ok(self.gap(other)? < tol.eq_abs)
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &Self, tol: &Tolerances) -> Result<bool> {
        self.same_shape(other, "includes")?;
        other.graph.is_subspace_of(&self.graph, tol)
    }

    /// Scales the outputs by `factor` (for `factor ≠ 0` the multivalued part
    /// is unchanged).
    pub fn scale(&self, factor: f64, tol: &Tolerances) -> Self {
        self.with_graph_columns(
            &self.inputs(),
            &(self.outputs() * kernel::c(factor, 0.0)),
            tol,
        )
    }

    /// Expresses a relation with `dom ⊆ input` and `ran ⊆ output` in the
    /// coordinates of the two frames.
    pub fn to_frames(&self, input: &Subspace, output: &Subspace, tol: &Tolerances) -> Result<Self> {
        if input.ambient_dim() != self.dim_in || output.ambient_dim() != self.dim_out {
            return Err(mismatch(
                "to_frames",
                (self.dim_in, self.dim_out),
                (input.ambient_dim(), output.ambient_dim()),
            ));
        }
        let x = self.inputs();
        let y = self.outputs();
        let leak_in = (&x - input.projector() * &x).norm();
        let leak_out = (&y - output.projector() * &y).norm();
        if leak_in > tol.eq_abs || leak_out > tol.eq_abs {
            return Err(Error::ComponentMismatch(format!(
                "relation leaves its frames (input residual {leak_in:.3e}, output residual {leak_out:.3e})"
            )));
        }
        Ok(self.with_graph_columns(&input.to_coords(&x), &output.to_coords(&y), tol))
    }

    /// Inverse of [`to_frames`](Self::to_frames).
    pub fn from_frames(
        &self,
        input: &Subspace,
        output: &Subspace,
        tol: &Tolerances,
    ) -> Result<Self> {
        if input.dim() != self.dim_in || output.dim() != self.dim_out {
            return Err(mismatch(
                "from_frames",
                (self.dim_in, self.dim_out),
                (input.dim(), output.dim()),
            ));
        }
        Ok(self.with_graph_columns(
            &(input.basis() * self.inputs()),
            &(output.basis() * self.outputs()),
            tol,
        ))
    }

    /// Adjoint of `self` viewed as a relation from `input` to `output`.
    pub fn adjoint_within(
        &self,
        input: &Subspace,
        output: &Subspace,
        tol: &Tolerances,
    ) -> Result<Self> {
        self.to_frames(input, output, tol)?
            .adjoint(tol)
            .from_frames(output, input, tol)
    }

    fn same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(mismatch(
                what,
                (self.dim_in, self.dim_out),
                (other.dim_in, other.dim_out),
            ));
        }
        Ok(())
    }
}
