//! Schur complements `A_{/S}` and compressions `A_S` of nonnegative
//! selfadjoint relations.
//!
//! `A_{/S}` is the maximum of `{X : 0 ≤ X ≤ A, ran X ⊆ S⊥}`. It is computed
//! from the block representation as `[[0, 0], [0, T*T]]` with
//! `T = D_g d½|_{D₂}`, the zero blocks being everywhere-defined zero
//! operators. The compression is `A_S = S*S` for the row relation
//! `S = [a½|_{D₁}, g d½|_{D₂}]`.

use rand::Rng;
use serde::Serialize;

use crate::block::{self, BlockRepresentation};
use crate::error::{Error, Result};
use crate::generator;
use crate::kernel::{self, ComplexMatrix, Tolerances};
use crate::nonneg::{self, NonnegSelfAdjointRelation};
use crate::relation::LinearRelation;
use crate::subspace::Subspace;

/// Residuals of the internal consistency checks of a Schur computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchurDiagnostics {
    /// Gap between `T*T` and `d₀½ D_f² d₀½ ⊕̂ ({0} × M₂)`.
    pub tt_lemma_gap: f64,
    /// Gap between `A_S` and `s*s ⊕̂ ({0} × mul A)`.
    pub compression_lemma_gap: f64,
    /// `A_{/S}` belongs to `{X : 0 ≤ X ≤ A, ran X ⊆ S⊥}`.
    pub schur_is_member: bool,
    /// `A_S ≤ A`.
    pub compression_dominated: bool,
}

#[derive(Debug, Clone)]
pub struct SchurResult {
    pub rep: BlockRepresentation,
    /// `T = D_g d½|_{D₂}`, an ambient relation inside `S⊥ × S⊥`.
    pub t: LinearRelation,
    /// `D_f d₀½`, the operator part of `T` on `D₂`.
    pub t_matrix: ComplexMatrix,
    /// `A_{/S}`
    pub schur: NonnegSelfAdjointRelation,
    /// `A_S`
    pub compression: NonnegSelfAdjointRelation,
    /// Row relation from C^n into the coordinates of `S`.
    pub row: LinearRelation,
    /// `a₀½ + f d₀½`, the operator part of the row relation (ambient).
    pub s_matrix: ComplexMatrix,
    pub diagnostics: SchurDiagnostics,
}

/// `X ∈ M(A, S⊥)`: `ran X ⊆ S⊥` and `X ≤ A`.
pub fn is_member(
    a: &NonnegSelfAdjointRelation,
    s: &Subspace,
    x: &NonnegSelfAdjointRelation,
    tol: &Tolerances,
) -> Result<bool> {
    if a.dim() != x.dim() || s.ambient_dim() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "A on C^{}, X on C^{}, S in C^{}",
            a.dim(),
            x.dim(),
            s.ambient_dim()
        )));
    }
    let s_perp = s.complement(tol);
    Ok(x.relation().ran(tol).is_subspace_of(&s_perp, tol)? && nonneg::leq(x, a, tol)?)
}

pub fn schur_complement(
    a: &NonnegSelfAdjointRelation,
    s: &Subspace,
    tol: &Tolerances,
) -> Result<SchurResult> {
    let rep = block::analyze(a, s, tol)?;
    schur_from_blocks(rep, tol)
}

pub fn compression(
    a: &NonnegSelfAdjointRelation,
    s: &Subspace,
    tol: &Tolerances,
) -> Result<NonnegSelfAdjointRelation> {
    Ok(schur_complement(a, s, tol)?.compression)
}

pub fn schur_from_blocks(rep: BlockRepresentation, tol: &Tolerances) -> Result<SchurResult> {
    let n = rep.dim();
    let s = &rep.s;
    let sp = &rep.s_perp;

    // T*T is formed inside S⊥, where adjoints of S⊥-valued blocks are meaningful.
    let q2 = sp.basis();
    let d_half_local = rep.d_sqrt_relation(tol)?.to_frames(sp, sp, tol)?;
    let dg_local = q2.adjoint() * &rep.dg * q2;
    let t_local = d_half_local
        .restrict(&rep.d2.in_frame(sp, tol)?, tol)?
        .left_mul(&dg_local, tol)?;
    let tt = nonneg::gram(&t_local, tol)?
        .relation()
        .from_frames(sp, sp, tol)?;
    let t = t_local.from_frames(sp, sp, tol)?;

    let k = &rep.d0_half * rep.df.adjoint() * &rep.df * &rep.d0_half;
    let tt_lemma =
        LinearRelation::from_operator_and_mul(&rep.d2, &(k * rep.d2.basis()), &rep.m2, tol)?;
    let tt_lemma_gap = tt.gap(&tt_lemma)?;

    let zero_s = LinearRelation::zero_on(s, n, tol)?;
    let zero_sp = LinearRelation::zero_on(sp, n, tol)?;
    let schur_rel = block::assemble(&zero_s, &zero_sp, &zero_s, &tt, s, tol)?;
    let schur = NonnegSelfAdjointRelation::validate(&schur_rel, tol)?;

    let dom = rep.a_rel.domain();
    let s_matrix = &rep.a0_half + &rep.f * &rep.d0_half;
    let row = LinearRelation::from_operator_and_mul(
        dom,
        &(s.basis().adjoint() * &s_matrix * dom.basis()),
        &rep.m1.in_frame(s, tol)?,
        tol,
    )?;
    let compression = nonneg::gram(&row, tol)?;
    let ss = dom.to_coords(&(s_matrix.adjoint() * &s_matrix * dom.basis()));
    let compression_lemma =
        NonnegSelfAdjointRelation::from_parts(dom, &kernel::hermitian_part(&ss), tol)?;
    let compression_lemma_gap = compression.gap(&compression_lemma)?;

    let diagnostics = SchurDiagnostics {
        tt_lemma_gap,
        compression_lemma_gap,
        schur_is_member: is_member(&rep.a_rel, s, &schur, tol)?,
        compression_dominated: nonneg::leq(&compression, &rep.a_rel, tol)?,
    };
    Ok(SchurResult {
        t_matrix: &rep.df * &rep.d0_half,
        rep,
        t,
        schur,
        compression,
        row,
        s_matrix,
        diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximalityReport {
    pub samples: usize,
    pub accepted: usize,
    pub rejected: usize,
    /// Accepted candidates `X` with `X ≤ A_{/S}` failing.
    pub violations: usize,
}

/// Draws candidate members of `M(A, S⊥)` and checks each accepted one
/// against `A_{/S}`. Even-indexed samples are scalings `c·A_{/S}` (the first
/// with `c = 1`), odd-indexed ones are random PSD matrices with range in
/// `S⊥`, scaled up to twice `‖A_{/S}‖` so that the membership filter matters.
/// Sample `i` uses its own stream derived from `(seed, i)`.
pub fn maximality_probe(
    a: &NonnegSelfAdjointRelation,
    s: &Subspace,
    result: &SchurResult,
    seed: u64,
    samples: usize,
    tol: &Tolerances,
) -> Result<MaximalityReport> {
    let sp = s.complement(tol);
    let schur_norm = kernel::op_norm(result.schur.op_coords());
    let mut report = MaximalityReport {
        samples,
        accepted: 0,
        rejected: 0,
        violations: 0,
    };
    for i in 0..samples {
        let mut rng = generator::rng_from_seed(generator::derive_seed(seed, i as u64));
        let x = if i % 2 == 0 {
            let c = if i == 0 { 1.0 } else { rng.random::<f64>() };
            result.schur.scale(c, tol)?
        } else {
            let k = sp.dim();
            let local = if k == 0 {
                kernel::zeros(0, 0)
            } else {
                generator::random_psd(&mut rng, k)
            };
            let scale = 2.0 * rng.random::<f64>() * schur_norm;
            let m = sp.basis() * local * sp.basis().adjoint() * kernel::c(scale, 0.0);
            NonnegSelfAdjointRelation::from_psd_matrix(&kernel::hermitian_part(&m), tol)?
        };
        if is_member(a, s, &x, tol)? {
            report.accepted += 1;
            if !nonneg::leq(&x, &result.schur, tol)? {
                report.violations += 1;
            }
        } else {
            report.rejected += 1;
        }
    }
    Ok(report)
}

/// The conditions under which the square-root formulas hold. All three are
/// equivalent and hold automatically in finite dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PekarevConditions {
    /// `P_L(A½(dom A)) ⊆ dom A½`
    pub range_in_root_domain: bool,
    /// `dom(d½ g*g d½|_{D₂}) = D₂`
    pub gg_domain_full: bool,
    /// `dom(d½ D_g² d½|_{D₂}) = D₂`
    pub defect_domain_full: bool,
}

impl PekarevConditions {
    pub fn all(&self) -> bool {
        self.range_in_root_domain && self.gg_domain_full && self.defect_domain_full
    }
}

#[derive(Debug, Clone)]
pub struct PekarevResult {
    /// `W*W` with `W` the closure of `P_{L⊥} A½|_{dom A}`.
    pub schur: NonnegSelfAdjointRelation,
    /// `A½ (P_L A½|_{dom A})`
    pub compression: NonnegSelfAdjointRelation,
    /// `closure(A½(D₁)) ∩ closure(dom A)`
    pub l: Subspace,
    pub conditions: PekarevConditions,
    /// Gap between `A_{/S}` and the composition `A½ (P_{L⊥} A½|_{dom A})`
    /// taken literally. Nonzero exactly when `S ∩ mul A ≠ {0}`: the
    /// composition then has domain `dom A` and multivalued part `mul A`.
    pub literal_schur_gap: f64,
}

pub fn pekarev(
    a: &NonnegSelfAdjointRelation,
    s: &Subspace,
    tol: &Tolerances,
) -> Result<PekarevResult> {
    let rep = block::analyze(a, s, tol)?;
    pekarev_from_blocks(&rep, tol)
}

pub fn pekarev_from_blocks(rep: &BlockRepresentation, tol: &Tolerances) -> Result<PekarevResult> {
    let a = &rep.a_rel;
    let n = a.dim();
    let dom = a.domain();
    let root = a.sqrt(tol)?.relation();
    let l = root.image(&rep.d1, tol)?.intersect(dom, tol)?;
    let pl = l.projector();
    let pl_perp = kernel::identity(n) - &pl;

    let d_half = rep.d_sqrt_relation(tol)?;
    let d_on_d2 = d_half.restrict(&rep.d2, tol)?;
    let gg = rep.g.adjoint() * &rep.g;
    let dg2 = &rep.dg * &rep.dg;
    let conditions = PekarevConditions {
        range_in_root_domain: root
            .image(dom, tol)?
            .image(&pl, tol)?
            .is_subspace_of(a.sqrt(tol)?.domain(), tol)?,
        gg_domain_full: d_half
            .compose(&d_on_d2.left_mul(&gg, tol)?, tol)?
            .dom(tol)
            .approx_eq(&rep.d2, tol)?,
        defect_domain_full: d_half
            .compose(&d_on_d2.left_mul(&dg2, tol)?, tol)?
            .dom(tol)
            .approx_eq(&rep.d2, tol)?,
    };
    if !conditions.all() {
        return Err(Error::ConditionViolated(format!("{conditions:?}")));
    }

    let root_on_dom = root.restrict(dom, tol)?;
    let compression_rel = root.compose(&root_on_dom.left_mul(&pl, tol)?, tol)?;
    let compression = NonnegSelfAdjointRelation::validate(&compression_rel, tol)?;

    // W vanishes on S (its kernel contains S), so its domain is S ⊕ D₂.
    let w_dom = rep.s.sum(&rep.d2, tol)?;
    let w_matrix = &pl_perp * &rep.a_half;
    let w = LinearRelation::from_operator_and_mul(
        &w_dom,
        &(w_matrix * w_dom.basis()),
        &Subspace::zero(n),
        tol,
    )?;
    let schur = nonneg::gram(&w, tol)?;
    let literal = root.compose(&root_on_dom.left_mul(&pl_perp, tol)?, tol)?;
    let literal_schur_gap = literal.gap(schur.relation())?;

    Ok(PekarevResult {
        schur,
        compression,
        l,
        conditions,
        literal_schur_gap,
    })
}

#[derive(Debug, Clone)]
pub struct AdditiveDecomposition {
    pub compression: NonnegSelfAdjointRelation,
    pub schur: NonnegSelfAdjointRelation,
    /// `dom A ⊆ dom A_S`
    pub dom_condition: bool,
    /// `P_L(A½(dom A)) ⊆ dom A½`
    pub range_condition: bool,
    /// Gap between `A_S + A_{/S}` and `A`.
    pub sum_gap: f64,
    pub verified: bool,
}

pub fn additive_decomposition(
    a: &NonnegSelfAdjointRelation,
    s: &Subspace,
    tol: &Tolerances,
) -> Result<AdditiveDecomposition> {
    let result = schur_complement(a, s, tol)?;
    let pek = pekarev_from_blocks(&result.rep, tol)?;
    decomposition_from(&result, &pek, tol)
}

pub fn decomposition_from(
    result: &SchurResult,
    pek: &PekarevResult,
    tol: &Tolerances,
) -> Result<AdditiveDecomposition> {
    let a = &result.rep.a_rel;
    let sum = result
        .compression
        .relation()
        .add(result.schur.relation(), tol)?;
    let sum_gap = sum.gap(a.relation())?;
    let dom_condition = a
        .domain()
        .is_subspace_of(result.compression.domain(), tol)?;
    let range_condition = pek.conditions.range_in_root_domain;
    let sum_holds = sum_gap < tol.eq_abs;
    Ok(AdditiveDecomposition {
        compression: result.compression.clone(),
        schur: result.schur.clone(),
        dom_condition,
        range_condition,
        sum_gap,
        verified: dom_condition && range_condition && sum_holds,
    })
}

/// Bounded-case Schur complement `[[0, 0], [0, d − y*y]]` with
/// `a½ y = b`, for an everywhere-defined PSD matrix.
pub fn anderson_trapp(a: &ComplexMatrix, s: &Subspace, tol: &Tolerances) -> Result<ComplexMatrix> {
    if !a.is_square() || a.nrows() != s.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix with a subspace of C^{}",
            a.nrows(),
            a.ncols(),
            s.ambient_dim()
        )));
    }
    if !kernel::is_hermitian(a, tol) {
        return Err(Error::NotHermitian {
            asymmetry: kernel::op_norm(&(a - a.adjoint())),
        });
    }
    let a = kernel::hermitian_part(a);
    if let Some(l) = kernel::min_eigenvalue(&a, tol)? {
        if l < -tol.scaled_eq(kernel::op_norm(&a)) {
            return Err(Error::NotPsd { eigenvalue: l });
        }
    }
    let q1 = s.basis();
    let sp = s.complement(tol);
    let q2 = sp.basis();
    let a11 = kernel::hermitian_part(&(q1.adjoint() * &a * q1));
    let b = q1.adjoint() * &a * q2;
    let d = q2.adjoint() * &a * q2;
    let y = kernel::pseudo_apply_inverse(&kernel::psd_sqrt(&a11, tol)?, &b, tol)?;
    let lower = d - y.adjoint() * &y;
    Ok(kernel::hermitian_part(&(q2 * lower * q2.adjoint())))
}
