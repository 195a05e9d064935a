//! 2×2 block structure of a nonnegative selfadjoint relation with respect
//! to `C^n = S ⊕ S⊥`.
//!
//! Relations and matrices in [`BlockRepresentation`] act on the ambient
//! space C^n; a block such as `b ⊆ S⊥ × S` is an ambient relation whose
//! domain lies in `S⊥` and whose range lies in `S`. Adjoints of blocks are
//! always taken inside their component spaces.

use crate::error::{Error, Result};
use crate::kernel::{self, ComplexMatrix, Tolerances};
use crate::nonneg::{self, NonnegSelfAdjointRelation};
use crate::relation::LinearRelation;
use crate::subspace::{self, Subspace};

#[derive(Debug, Clone)]
pub struct BlockRepresentation {
    pub a_rel: NonnegSelfAdjointRelation,
    pub s: Subspace,
    pub s_perp: Subspace,
    /// `S ∩ dom A`
    pub d1: Subspace,
    /// `S⊥ ∩ dom A`
    pub d2: Subspace,
    /// `S ∩ mul A`
    pub m1: Subspace,
    /// `S⊥ ∩ mul A`
    pub m2: Subspace,
    /// Closure of `D₁`.
    pub n1: Subspace,
    /// Closure of `D₂`.
    pub n2: Subspace,
    /// `P_S A|_S`
    pub a: LinearRelation,
    /// `P_S A|_{S⊥}`
    pub b: LinearRelation,
    /// `P_{S⊥} A|_S`
    pub c: LinearRelation,
    /// `P_{S⊥} A|_{S⊥}`
    pub d: LinearRelation,
    /// `P_{N₁} A₀ P_{N₁}`
    pub a0: ComplexMatrix,
    /// `P_{N₁} A₀ P_{N₂}`
    pub b0: ComplexMatrix,
    /// `P_{N₂} A₀ P_{N₁}`
    pub c0: ComplexMatrix,
    /// `P_{N₂} A₀ P_{N₂}`
    pub d0: ComplexMatrix,
    pub a0_half: ComplexMatrix,
    pub d0_half: ComplexMatrix,
    /// `A₀½`
    pub a_half: ComplexMatrix,
    /// Partial isometry `a₀½h ↦ A₀½h` on `ran a₀½`, zero elsewhere.
    pub v1: ComplexMatrix,
    /// Partial isometry `d₀½h ↦ A₀½h` on `ran d₀½`, zero elsewhere.
    pub v2: ComplexMatrix,
    /// `V₁*V₂`, a contraction `N₂ → N₁`.
    pub f: ComplexMatrix,
    /// `f` extended by zero on `M₂`, a contraction `S⊥ → S`.
    pub g: ComplexMatrix,
    /// `(1 − f*f)½` on `N₂`
    pub df: ComplexMatrix,
    /// `(1 − g*g)½` on `S⊥`
    pub dg: ComplexMatrix,
}

/// Operator-part blocks in the coordinates of orthonormal bases of `N₁`, `N₂`.
#[derive(Debug, Clone)]
pub struct OperatorBlocks {
    pub a0: ComplexMatrix,
    pub b0: ComplexMatrix,
    pub c0: ComplexMatrix,
    pub d0: ComplexMatrix,
}

/// Gaps between each block and its decomposition `x₀ ⊕̂ ({0} × M)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposabilityGaps {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Block matrix of operator parts against `A₀` on `dom A`.
    pub operator_part: f64,
}

impl DecomposabilityGaps {
    pub fn worst(&self) -> f64 {
        [self.a, self.b, self.c, self.d, self.operator_part]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct Factorization {
    /// `[[1, f], [0, D_f]]` on `N₁ ⊕ N₂`, zero elsewhere.
    pub w: ComplexMatrix,
    /// `a₀½ ⊕ d₀½`, zero elsewhere.
    pub z_matrix: ComplexMatrix,
    /// `Z` as an operator on `dom A = D₁ ⊕ D₂`.
    pub z: LinearRelation,
    /// `(WZ)*(WZ)` as a matrix.
    pub product: ComplexMatrix,
    /// `‖(WZ)*(WZ) − A₀‖`
    pub matrix_residual: f64,
    /// Gap between `(WZ)*(WZ)` as a relation and `A`.
    pub relation_gap: f64,
}

/// The three equivalent forms of the splitting condition, evaluated
/// independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplittingReport {
    /// `P_S(dom A) ⊆ dom A`
    pub dom_invariant: bool,
    /// `S = N₁ ⊕ M₁`
    pub s_splits: bool,
    /// `S⊥ = N₂ ⊕ M₂`
    pub s_perp_splits: bool,
    /// `P_S(mul A) ⊆ mul A`
    pub mul_invariant: bool,
}

impl SplittingReport {
    pub fn consistent(&self) -> bool {
        self.dom_invariant == self.s_splits && self.s_splits == self.s_perp_splits
    }
}

fn leaves(rel_part: &Subspace, frame: &Subspace) -> Result<f64> {
    rel_part.containment_residual(frame)
}

/// The relation generated by the blocks:
/// `((x₁, x₂), (w₁ + z₁, w₂ + z₂))` with `(x₁, w₁) ∈ a`, `(x₂, z₁) ∈ b`,
/// `(x₁, w₂) ∈ c`, `(x₂, z₂) ∈ d`.
pub fn assemble(
    a: &LinearRelation,
    b: &LinearRelation,
    c: &LinearRelation,
    d: &LinearRelation,
    s: &Subspace,
    tol: &Tolerances,
) -> Result<LinearRelation> {
    let s_perp = s.complement(tol);
    let frames = [
        ("a", a, s, s),
        ("b", b, &s_perp, s),
        ("c", c, s, &s_perp),
        ("d", d, &s_perp, &s_perp),
    ];
    for (name, block, input, output) in frames {
        if block.dim_in() != s.ambient_dim() || block.dim_out() != s.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "block {name} is {}→{}, expected {n}→{n}",
                block.dim_in(),
                block.dim_out(),
                n = s.ambient_dim()
            )));
        }
        let r_in = leaves(&block.dom(tol), input)?;
        let r_out = leaves(&block.ran(tol), output)?;
        if r_in > tol.eq_abs || r_out > tol.eq_abs {
            return Err(Error::ComponentMismatch(format!(
                "block {name}: domain residual {r_in:.3e}, range residual {r_out:.3e}"
            )));
        }
    }
    let first = a.add(c, tol)?;
    let second = b.add(d, tol)?;
    first.cw_sum(&second, tol)
}

/// Evaluates the invariance condition and its two splitting forms.
pub fn splitting_report(
    a: &NonnegSelfAdjointRelation,
    s: &Subspace,
    tol: &Tolerances,
) -> Result<SplittingReport> {
    let dom = a.domain();
    let mul = a.mul();
    let s_perp = s.complement(tol);
    let splits = |part: &Subspace| -> Result<bool> {
        let n = part.intersect(dom, tol)?;
        let m = part.intersect(mul, tol)?;
        n.sum(&m, tol)?.approx_eq(part, tol)
    };
    Ok(SplittingReport {
        dom_invariant: subspace::is_invariant(dom, s, tol)?.invariant(),
        s_splits: splits(s)?,
        s_perp_splits: splits(&s_perp)?,
        mul_invariant: mul.image(&s.projector(), tol)?.is_subspace_of(mul, tol)?,
    })
}

fn invariance_error(dom: &Subspace, s: &Subspace) -> Result<Error> {
    let (w, residual) = subspace::invariance_witness(dom, s)?;
    Ok(Error::InvarianceViolated {
        witness: w.iter().map(|z| [z.re, z.im]).collect(),
        residual,
    })
}

/// Nonnegative selfadjoint completion of a diagonal block inside its
/// component space.
fn completed(block: &LinearRelation, frame: &Subspace, tol: &Tolerances) -> Result<LinearRelation> {
    let local = block.to_frames(frame, frame, tol)?;
    nonneg::friedrichs(&local, tol)?
        .relation()
        .from_frames(frame, frame, tol)
}

/// Builds the block representation of `A` with respect to `S ⊕ S⊥`.
pub fn analyze(
    a_rel: &NonnegSelfAdjointRelation,
    s: &Subspace,
    tol: &Tolerances,
) -> Result<BlockRepresentation> {
    let n = a_rel.dim();
    if s.ambient_dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "subspace of C^{} for a relation on C^{n}",
            s.ambient_dim()
        )));
    }
    let dom = a_rel.domain();
    let mul = a_rel.mul();
    if !subspace::is_invariant(dom, s, tol)?.invariant() {
        return Err(invariance_error(dom, s)?);
    }
    let s_perp = s.complement(tol);
    let d1 = s.intersect(dom, tol)?;
    let d2 = s_perp.intersect(dom, tol)?;
    let m1 = s.intersect(mul, tol)?;
    let m2 = s_perp.intersect(mul, tol)?;
    let (n1, n2) = (d1.clone(), d2.clone());

    let ps = s.projector();
    let pp = s_perp.projector();
    let rel = a_rel.relation();
    let on_s = rel.restrict(s, tol)?;
    let on_perp = rel.restrict(&s_perp, tol)?;
    let a = completed(&on_s.left_mul(&ps, tol)?, s, tol)?;
    let b = on_perp.left_mul(&ps, tol)?;
    let c = on_s.left_mul(&pp, tol)?;
    let d = completed(&on_perp.left_mul(&pp, tol)?, &s_perp, tol)?;

    let a_full = a_rel.operator_full();
    let p1 = n1.projector();
    let p2 = n2.projector();
    let a0 = &p1 * &a_full * &p1;
    let b0 = &p1 * &a_full * &p2;
    let c0 = &p2 * &a_full * &p1;
    let d0 = &p2 * &a_full * &p2;
    let a0_half = kernel::psd_sqrt(&kernel::hermitian_part(&a0), tol)?;
    let d0_half = kernel::psd_sqrt(&kernel::hermitian_part(&d0), tol)?;
    let a_half = a_rel.sqrt_full(tol)?;

    // V a₀½ = A₀½ on N₁  ⇔  a₀½ V* = P_{N₁} A₀½
    let v1 = kernel::pseudo_apply_inverse(&a0_half, &(&p1 * &a_half), tol)?.adjoint();
    let v2 = kernel::pseudo_apply_inverse(&d0_half, &(&p2 * &a_half), tol)?.adjoint();
    let f = v1.adjoint() * &v2;
    let g = f.clone();
    let df = kernel::psd_sqrt(&kernel::hermitian_part(&(&p2 - f.adjoint() * &f)), tol)?;
    let dg = kernel::psd_sqrt(&kernel::hermitian_part(&(&pp - g.adjoint() * &g)), tol)?;

    Ok(BlockRepresentation {
        a_rel: a_rel.clone(),
        s: s.clone(),
        s_perp,
        d1,
        d2,
        m1,
        m2,
        n1,
        n2,
        a,
        b,
        c,
        d,
        a0,
        b0,
        c0,
        d0,
        a0_half,
        d0_half,
        a_half,
        v1,
        v2,
        f,
        g,
        df,
        dg,
    })
}

impl BlockRepresentation {
    pub fn dim(&self) -> usize {
        self.s.ambient_dim()
    }

    pub fn operator_blocks(&self) -> OperatorBlocks {
        let q1 = self.n1.basis();
        let q2 = self.n2.basis();
        OperatorBlocks {
            a0: q1.adjoint() * &self.a0 * q1,
            b0: q1.adjoint() * &self.b0 * q2,
            c0: q2.adjoint() * &self.c0 * q1,
            d0: q2.adjoint() * &self.d0 * q2,
        }
    }

    /// `a½ = a₀½ ⊕̂ ({0} × M₁)` as an ambient relation.
    pub fn a_sqrt_relation(&self, tol: &Tolerances) -> Result<LinearRelation> {
        LinearRelation::from_operator_and_mul(
            &self.d1,
            &(&self.a0_half * self.d1.basis()),
            &self.m1,
            tol,
        )
    }

    /// `d½ = d₀½ ⊕̂ ({0} × M₂)` as an ambient relation; its domain is `D₂`.
    pub fn d_sqrt_relation(&self, tol: &Tolerances) -> Result<LinearRelation> {
        LinearRelation::from_operator_and_mul(
            &self.d2,
            &(&self.d0_half * self.d2.basis()),
            &self.m2,
            tol,
        )
    }

    pub fn reassemble(&self, tol: &Tolerances) -> Result<LinearRelation> {
        assemble(&self.a, &self.b, &self.c, &self.d, &self.s, tol)
    }

    /// Gap between `assemble(a, b, c, d)` and `A`.
    pub fn roundtrip_gap(&self, tol: &Tolerances) -> Result<f64> {
        self.reassemble(tol)?.gap(self.a_rel.relation())
    }

    /// Gap between `A` and `assemble(a*, c*, b*, d*)`.
    pub fn adjoint_symmetry_gap(&self, tol: &Tolerances) -> Result<f64> {
        let (s, sp) = (&self.s, &self.s_perp);
        let a_adj = self.a.adjoint_within(s, s, tol)?;
        let b_adj = self.b.adjoint_within(sp, s, tol)?;
        let c_adj = self.c.adjoint_within(s, sp, tol)?;
        let d_adj = self.d.adjoint_within(sp, sp, tol)?;
        assemble(&a_adj, &c_adj, &b_adj, &d_adj, s, tol)?.gap(self.a_rel.relation())
    }

    /// Gaps of `b = a½ g d½|_{D₂}` and `c = d½ g* a½|_{D₁}`.
    pub fn reconstruction_gaps(&self, tol: &Tolerances) -> Result<(f64, f64)> {
        let a_half = self.a_sqrt_relation(tol)?;
        let d_half = self.d_sqrt_relation(tol)?;
        let d_on_d2 = d_half.restrict(&self.d2, tol)?;
        let a_on_d1 = a_half.restrict(&self.d1, tol)?;
        let b_rec = a_half.compose(&d_on_d2.left_mul(&self.g, tol)?, tol)?;
        let c_rec = d_half.compose(&a_on_d1.left_mul(&self.g.adjoint(), tol)?, tol)?;
        Ok((b_rec.gap(&self.b)?, c_rec.gap(&self.c)?))
    }

    pub fn contraction_norms(&self) -> (f64, f64) {
        (kernel::op_norm(&self.f), kernel::op_norm(&self.g))
    }

    /// Residuals of `V₁*V₁ = P_{ran a₀½}` and `V₂*V₂ = P_{ran d₀½}`.
    pub fn partial_isometry_residuals(&self, tol: &Tolerances) -> (f64, f64) {
        let check = |v: &ComplexMatrix, root: &ComplexMatrix| {
            let p = Subspace::from_columns(root, tol).projector();
            kernel::op_norm(&(v.adjoint() * v - p))
        };
        (
            check(&self.v1, &self.a0_half),
            check(&self.v2, &self.d0_half),
        )
    }

    pub fn decomposability_gaps(&self, tol: &Tolerances) -> Result<DecomposabilityGaps> {
        let part = |dom: &Subspace, m: &ComplexMatrix, mul: &Subspace| {
            LinearRelation::from_operator_and_mul(dom, &(m * dom.basis()), mul, tol)
        };
        let block_sum = &self.a0 + &self.b0 + &self.c0 + &self.d0;
        let q = self.a_rel.domain().basis();
        let op_residual = kernel::op_norm(&((block_sum - self.a_rel.operator_full()) * q));
        Ok(DecomposabilityGaps {
            a: self.a.gap(&part(&self.d1, &self.a0, &self.m1)?)?,
            b: self.b.gap(&part(&self.d2, &self.b0, &self.m1)?)?,
            c: self.c.gap(&part(&self.d1, &self.c0, &self.m2)?)?,
            d: self.d.gap(&part(&self.d2, &self.d0, &self.m2)?)?,
            operator_part: op_residual,
        })
    }

    /// `A₀ = (WZ)*(WZ)` with `W = [[1, f], [0, D_f]]`, `Z = a₀½ ⊕ d₀½`.
    pub fn factorize(&self, tol: &Tolerances) -> Result<Factorization> {
        let w = self.n1.projector() + &self.f + &self.df;
        let z_matrix = &self.a0_half + &self.d0_half;
        let dom = self.a_rel.domain();
        let z = LinearRelation::from_operator_and_mul(
            dom,
            &(&z_matrix * dom.basis()),
            &Subspace::zero(self.dim()),
            tol,
        )?;
        let wz = &w * &z_matrix;
        let product = wz.adjoint() * &wz;
        let matrix_residual = kernel::op_norm(&(&product - self.a_rel.operator_full()));
        let wz_rel = LinearRelation::from_matrix(&w, tol).compose(&z, tol)?;
        let relation_gap = nonneg::gram(&wz_rel, tol)?.gap(&self.a_rel)?;
        Ok(Factorization {
            w,
            z_matrix,
            z,
            product,
            matrix_residual,
            relation_gap,
        })
    }
}
