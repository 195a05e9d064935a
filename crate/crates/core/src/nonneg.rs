//! Nonnegative selfadjoint relations: recognition, square roots, the forms
//! ordering, Gram products `T*T` and Friedrichs extensions.
//!
//! A nonnegative selfadjoint relation on C^n splits as
//! `A = A₀ ⊕̂ ({0} × mul A)` with `mul A = (dom A)⊥` and `A₀` a PSD operator
//! on `dom A`. The operator part is kept as a Hermitian matrix in the
//! coordinates of an orthonormal basis of `dom A`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::kernel::{self, ComplexMatrix, Tolerances};
use crate::relation::LinearRelation;
use crate::subspace::Subspace;

#[derive(Debug, Clone)]
pub struct NonnegSelfAdjointRelation {
    rel: LinearRelation,
    domain: Subspace,
    /// `Q* A₀ Q` for the domain basis `Q`.
    h: ComplexMatrix,
    mul: Subspace,
    sqrt: OnceLock<Box<NonnegSelfAdjointRelation>>,
}

fn check_psd(h: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    if let Some(l) = kernel::min_eigenvalue(h, tol)? {
        if l < -tol.scaled_eq(kernel::op_norm(h)) {
            return Err(Error::NotNonnegative { eigenvalue: l });
        }
    }
    Ok(())
}

impl NonnegSelfAdjointRelation {
    /// Checks `T = T*` and that the operator part is PSD.
    pub fn validate(t: &LinearRelation, tol: &Tolerances) -> Result<Self> {
        if t.dim_in() != t.dim_out() {
            return Err(Error::DimensionMismatch(format!(
                "selfadjoint relations are square, got {}→{}",
                t.dim_in(),
                t.dim_out()
            )));
        }
        let gap = t.gap(&t.adjoint(tol))?;
        if gap >= tol.eq_abs {
            return Err(Error::NotSelfAdjoint { gap });
        }
        let op = t.operator_part(tol)?;
        let h = kernel::hermitian_part(&op.domain.to_coords(&op.matrix));
        check_psd(&h, tol)?;
        Ok(Self {
            rel: t.clone(),
            domain: op.domain,
            h,
            mul: op.mul,
            sqrt: OnceLock::new(),
        })
    }

    /// `H ⊕̂ ({0} × domain⊥)` for a PSD matrix `h` given in the coordinates of
    /// the domain basis.
    pub fn from_parts(domain: &Subspace, h: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let k = domain.dim();
        if h.shape() != (k, k) {
            return Err(Error::DimensionMismatch(format!(
                "operator part is {}x{} on a {k}-dimensional domain",
                h.nrows(),
                h.ncols()
            )));
        }
        if !kernel::is_hermitian(h, tol) {
            return Err(Error::NotSelfAdjoint {
                gap: kernel::op_norm(&(h - h.adjoint())),
            });
        }
        let h = kernel::hermitian_part(h);
        check_psd(&h, tol)?;
        let mul = domain.complement(tol);
        let rel = LinearRelation::from_operator_and_mul(domain, &(domain.basis() * &h), &mul, tol)?;
        Ok(Self {
            rel,
            domain: domain.clone(),
            h,
            mul,
            sqrt: OnceLock::new(),
        })
    }

    /// Everywhere-defined PSD matrix.
    pub fn from_psd_matrix(m: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "PSD matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Self::from_parts(&Subspace::full(m.nrows()), m, tol)
    }

    /// `{0} × C^n`, the largest element of the forms ordering.
    pub fn top(n: usize, tol: &Tolerances) -> Self {
        Self::from_parts(&Subspace::zero(n), &kernel::zeros(0, 0), tol)
            .expect("the trivial operator part is PSD")
    }

    pub fn relation(&self) -> &LinearRelation {
        &self.rel
    }

    pub fn dim(&self) -> usize {
        self.rel.dim_in()
    }

    pub fn domain(&self) -> &Subspace {
        &self.domain
    }

    pub fn mul(&self) -> &Subspace {
        &self.mul
    }

    /// Operator part in domain coordinates.
    pub fn op_coords(&self) -> &ComplexMatrix {
        &self.h
    }

    /// `A₀` as an n×n matrix vanishing on `mul A`.
    pub fn operator_full(&self) -> ComplexMatrix {
        let q = self.domain.basis();
        q * &self.h * q.adjoint()
    }

    /// `A₀` alone, as a relation with trivial multivalued part.
    pub fn operator_relation(&self, tol: &Tolerances) -> Result<LinearRelation> {
        LinearRelation::from_operator_and_mul(
            &self.domain,
            &(self.domain.basis() * &self.h),
            &Subspace::zero(self.dim()),
            tol,
        )
    }

    /// `A₀½` as an n×n matrix vanishing on `mul A`.
    pub fn sqrt_full(&self, tol: &Tolerances) -> Result<ComplexMatrix> {
        Ok(self.sqrt(tol)?.operator_full())
    }

    /// `A½ = A₀½ ⊕̂ ({0} × mul A)`.
    pub fn sqrt(&self, tol: &Tolerances) -> Result<&Self> {
        if let Some(s) = self.sqrt.get() {
            return Ok(s);
        }
        let root = kernel::psd_sqrt(&self.h, tol)?;
        let s = Self::from_parts(&self.domain, &root, tol)?;
        Ok(self.sqrt.get_or_init(|| Box::new(s)))
    }

    /// `c·A₀ ⊕̂ ({0} × mul A)` for `c ≥ 0`.
    pub fn scale(&self, factor: f64, tol: &Tolerances) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::NotNonnegative { eigenvalue: factor });
        }
        Self::from_parts(&self.domain, &(&self.h * kernel::c(factor, 0.0)), tol)
    }

    /// Graph gap to another nonnegative relation.
    pub fn gap(&self, other: &Self) -> Result<f64> {
        self.rel.gap(&other.rel)
    }
}

fn check_same_dim(a: &NonnegSelfAdjointRelation, b: &NonnegSelfAdjointRelation) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relations on C^{} and C^{}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Forms ordering `A ≤ B`: `dom B₀½ ⊆ dom A₀½` and `‖A₀½u‖ ≤ ‖B₀½u‖` on
/// `dom B₀½`.
pub fn leq(
    a: &NonnegSelfAdjointRelation,
    b: &NonnegSelfAdjointRelation,
    tol: &Tolerances,
) -> Result<bool> {
    check_same_dim(a, b)?;
    if !b.domain().is_subspace_of(a.domain(), tol)? {
        return Ok(false);
    }
    let u = b.domain().basis();
    let ra = a.sqrt_full(tol)? * u;
    let rb = b.sqrt_full(tol)? * u;
    let ga = ra.adjoint() * &ra;
    let gb = rb.adjoint() * &rb;
    let diff = kernel::hermitian_part(&(&gb - &ga));
    let slack = tol.scaled_eq(kernel::op_norm(&gb));
    Ok(kernel::min_eigenvalue(&diff, tol)?.is_none_or(|l| l >= -slack))
}

/// The contraction `W` with `W B₀½ = A₀½` on `dom B`, vanishing off
/// `ran B₀½`. Returned as an n×n matrix.
pub fn order_contraction(
    a: &NonnegSelfAdjointRelation,
    b: &NonnegSelfAdjointRelation,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    if !leq(a, b, tol)? {
        return Err(Error::OrderViolated);
    }
    let pb = b.domain().projector();
    let w_adj = kernel::pseudo_apply_inverse(&b.sqrt_full(tol)?, &(pb * a.sqrt_full(tol)?), tol)?;
    Ok(w_adj.adjoint())
}

/// Residuals of the identities satisfied by `T*T`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VonNeumannReport {
    /// gap(T*T, T*T₀)
    pub adjoint_times_operator_part: f64,
    /// gap(T*T, T₀*T₀)
    pub operator_part_product: f64,
    /// gap(ker T*T, ker T)
    pub kernel: f64,
    /// gap(mul T*T, mul T*)
    pub mul: f64,
    /// gap((T*T)₀, (T*)₀T₀)
    pub operator_part: f64,
}

impl VonNeumannReport {
    pub fn worst(&self) -> f64 {
        [
            self.adjoint_times_operator_part,
            self.operator_part_product,
            self.kernel,
            self.mul,
            self.operator_part,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `T*T` together with the residuals of its defining identities.
pub fn gram_with_report(
    t: &LinearRelation,
    tol: &Tolerances,
) -> Result<(NonnegSelfAdjointRelation, VonNeumannReport)> {
    let t_adj = t.adjoint(tol);
    let product = t_adj.compose(t, tol)?;
    let g = NonnegSelfAdjointRelation::validate(&product, tol)?;

    let t0 = t.operator_part(tol)?.operator_relation(tol)?;
    let t0_adj = t0.adjoint(tol);
    let t_adj0 = t_adj.operator_part(tol)?.operator_relation(tol)?;
    let report = VonNeumannReport {
        adjoint_times_operator_part: product.gap(&t_adj.compose(&t0, tol)?)?,
        operator_part_product: product.gap(&t0_adj.compose(&t0, tol)?)?,
        kernel: product.ker(tol).gap(&t.ker(tol))?,
        mul: product.mul(tol).gap(&t_adj.mul(tol))?,
        operator_part: g.operator_relation(tol)?.gap(&t_adj0.compose(&t0, tol)?)?,
    };
    Ok((g, report))
}

/// `T*T`, checked against the identities `T*T = T*T₀ = T₀*T₀`,
/// `ker T*T = ker T`, `mul T*T = mul T*` and `(T*T)₀ = (T*)₀T₀`.
pub fn gram(t: &LinearRelation, tol: &Tolerances) -> Result<NonnegSelfAdjointRelation> {
    let (g, report) = gram_with_report(t, tol)?;
    if report.worst() >= tol.eq_abs {
        return Err(Error::InternalInconsistency(format!(
            "T*T identities fail: {report:?}"
        )));
    }
    Ok(g)
}

/// Friedrichs extension of a nonnegative symmetric relation: its operator
/// part compressed to `dom T`, with multivalued part `(dom T)⊥`.
pub fn friedrichs(t: &LinearRelation, tol: &Tolerances) -> Result<NonnegSelfAdjointRelation> {
    if t.dim_in() != t.dim_out() {
        return Err(Error::DimensionMismatch(format!(
            "symmetric relations are square, got {}→{}",
            t.dim_in(),
            t.dim_out()
        )));
    }
    if !t.adjoint(tol).includes(t, tol)? {
        return Err(Error::NotSymmetric);
    }
    let op = t.operator_part(tol)?;
    let h = kernel::hermitian_part(&op.domain.to_coords(&op.matrix));
    NonnegSelfAdjointRelation::from_parts(&op.domain, &h, tol)
}
