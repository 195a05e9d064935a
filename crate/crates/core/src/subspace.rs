//! Closed subspaces of C^n stored as orthonormal bases.
//!
//! Equality is always decided by the gap `‖P_U − P_V‖`, never by comparing
//! basis matrices.

use crate::error::{Error, Result};
use crate::kernel::{self, ComplexMatrix, Tolerances, C64};

#[derive(Debug, Clone)]
pub struct Subspace {
    basis: ComplexMatrix,
}

fn check_ambient(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces live in C^{} and C^{}",
            u.ambient_dim(),
            v.ambient_dim()
        )));
    }
    Ok(())
}

impl Subspace {
    /// Span of the columns of `m`.
    pub fn from_columns(m: &ComplexMatrix, tol: &Tolerances) -> Self {
        Self {
            basis: kernel::orthonormal_columns(m, tol),
        }
    }

    pub fn span(vectors: &[Vec<C64>], ambient_dim: usize, tol: &Tolerances) -> Result<Self> {
        if let Some(bad) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in C^{}",
                bad.len(),
                ambient_dim
            )));
        }
        let m = ComplexMatrix::from_fn(ambient_dim, vectors.len(), |i, j| vectors[j][i]);
        Ok(Self::from_columns(&m, tol))
    }

    pub fn zero(n: usize) -> Self {
        Self {
            basis: kernel::zeros(n, 0),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            basis: kernel::identity(n),
        }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(n: usize, indices: &[usize]) -> Self {
        let mut b = kernel::zeros(n, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            b[(i, j)] = kernel::c(1.0, 0.0);
        }
        Self { basis: b }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn complement(&self, tol: &Tolerances) -> Self {
        let n = self.ambient_dim();
        if self.dim() == 0 {
            return Self::full(n);
        }
        let p = kernel::identity(n) - self.projector();
        Self::from_columns(&p, tol)
    }

    pub fn sum(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        check_ambient(self, other)?;
        let mut m = kernel::zeros(self.ambient_dim(), self.dim() + other.dim());
        m.columns_mut(0, self.dim()).copy_from(&self.basis);
        m.columns_mut(self.dim(), other.dim())
            .copy_from(&other.basis);
        Ok(Self::from_columns(&m, tol))
    }

    /// `U ∩ V`, computed as the complement of `U⊥ + V⊥`.
    pub fn intersect(&self, other: &Self, tol: &Tolerances) -> Result<Self> {
        check_ambient(self, other)?;
        let perp = self.complement(tol).sum(&other.complement(tol), tol)?;
        Ok(perp.complement(tol))
    }

    /// Operator-norm distance between the orthogonal projectors.
    pub fn gap(&self, other: &Self) -> Result<f64> {
        check_ambient(self, other)?;
        Ok(kernel::op_norm(&(self.projector() - other.projector())))
    }

    pub fn approx_eq(&self, other: &Self, tol: &Tolerances) -> Result<bool> {
        Ok(self.gap(other)? < tol.eq_abs)
    }

    /// Largest distance from a unit basis vector of `self` to `other`.
    pub fn containment_residual(&self, other: &Self) -> Result<f64> {
        check_ambient(self, other)?;
        let rest = &self.basis - other.projector() * &self.basis;
        Ok(rest.column_iter().map(|col| col.norm()).fold(0.0, f64::max))
    }

    /// `self ⊆ other` within `eq_abs`.
    pub fn is_subspace_of(&self, other: &Self, tol: &Tolerances) -> Result<bool> {
        Ok(self.containment_residual(other)? <= tol.eq_abs)
    }

    /// Span of `M·basis` for a matrix `M` acting on the ambient space.
    pub fn image(&self, m: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if m.ncols() != self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix with {} columns applied to C^{}",
                m.ncols(),
                self.ambient_dim()
            )));
        }
        Ok(Self::from_columns(&(m * &self.basis), tol))
    }

    /// Coordinates of the subspace's own vectors: maps into this basis.
    pub fn to_coords(&self, v: &ComplexMatrix) -> ComplexMatrix {
        self.basis.adjoint() * v
    }

    /// Re-expresses this subspace in the coordinates of `frame` (which must
    /// contain it).
    pub fn in_frame(&self, frame: &Subspace, tol: &Tolerances) -> Result<Self> {
        check_ambient(self, frame)?;
        if !self.is_subspace_of(frame, tol)? {
            return Err(Error::ComponentMismatch(
                "subspace is not contained in the frame".into(),
            ));
        }
        Ok(Self::from_columns(&frame.to_coords(&self.basis), tol))
    }

    /// Embeds a subspace given in `frame` coordinates back into the ambient space.
    pub fn from_frame(&self, frame: &Subspace, tol: &Tolerances) -> Result<Self> {
        if self.ambient_dim() != frame.dim() {
            return Err(Error::DimensionMismatch(format!(
                "subspace of C^{} embedded through a {}-dimensional frame",
                self.ambient_dim(),
                frame.dim()
            )));
        }
        Ok(Self::from_columns(&(frame.basis() * &self.basis), tol))
    }
}

/// The three equivalent forms of `P_S`-invariance of `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvarianceReport {
    /// `P_S(M) ⊆ M`
    pub projection_inside: bool,
    /// `M = (S∩M) ⊕ (S⊥∩M)`
    pub splits: bool,
    /// `P_S(M) = S∩M`
    pub projection_is_intersection: bool,
}

impl InvarianceReport {
    pub fn invariant(&self) -> bool {
        self.projection_inside
    }

    pub fn consistent(&self) -> bool {
        self.projection_inside == self.splits && self.splits == self.projection_is_intersection
    }
}

pub fn is_invariant(m: &Subspace, s: &Subspace, tol: &Tolerances) -> Result<InvarianceReport> {
    check_ambient(m, s)?;
    let projected = m.image(&s.projector(), tol)?;
    let s_cap = s.intersect(m, tol)?;
    let sp_cap = s.complement(tol).intersect(m, tol)?;
    Ok(InvarianceReport {
        projection_inside: projected.is_subspace_of(m, tol)?,
        splits: s_cap.sum(&sp_cap, tol)?.approx_eq(m, tol)?,
        projection_is_intersection: projected.approx_eq(&s_cap, tol)?,
    })
}

/// A vector of `M` whose `P_S` image leaves `M` the most, with its residual.
pub fn invariance_witness(m: &Subspace, s: &Subspace) -> Result<(Vec<C64>, f64)> {
    check_ambient(m, s)?;
    let ps_m = s.projector() * m.basis();
    let rest = &ps_m - m.projector() * &ps_m;
    let mut best = (0usize, 0.0);
    for (j, col) in rest.column_iter().enumerate() {
        if col.norm() > best.1 {
            best = (j, col.norm());
        }
    }
    if m.dim() == 0 {
        return Ok((vec![kernel::c(0.0, 0.0); m.ambient_dim()], 0.0));
    }
    Ok((m.basis().column(best.0).iter().cloned().collect(), best.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::c;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn v(re: &[f64]) -> Vec<C64> {
        re.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn span_examples() {
        let s = Subspace::span(&[v(&[1.0, 0.0]), v(&[2.0, 0.0])], 2, &tol()).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(Subspace::span(&[], 3, &tol()).unwrap().dim(), 0);
        let s = Subspace::span(&[v(&[1.0, 1.0, 0.0]), v(&[1.0, -1.0, 0.0])], 3, &tol()).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.gap(&Subspace::coordinate(3, &[0, 1])).unwrap() < 1e-14);
        assert!(Subspace::span(&[v(&[1.0])], 2, &tol()).is_err());
    }

    #[test]
    fn intersections() {
        let u = Subspace::coordinate(3, &[0, 1]);
        assert!(u.intersect(&u, &tol()).unwrap().gap(&u).unwrap() < 1e-14);
        let e1 = Subspace::coordinate(2, &[0]);
        let e2 = Subspace::coordinate(2, &[1]);
        assert_eq!(e1.intersect(&e2, &tol()).unwrap().dim(), 0);
        let v = Subspace::coordinate(3, &[1, 2]);
        let cap = u.intersect(&v, &tol()).unwrap();
        assert!(cap.gap(&Subspace::coordinate(3, &[1])).unwrap() < 1e-14);
        assert!(u.intersect(&e1, &tol()).is_err());
    }

    #[test]
    fn complement_gap_projector() {
        assert_eq!(Subspace::full(2).complement(&tol()).dim(), 0);
        let e1 = Subspace::coordinate(2, &[0]);
        let e2 = Subspace::coordinate(2, &[1]);
        assert_eq!(e1.gap(&e1).unwrap(), 0.0);
        assert!((e1.gap(&e2).unwrap() - 1.0).abs() < 1e-14);
        let p = e1.projector();
        assert!((&p * &p - &p).norm() < 1e-15);
    }

    #[test]
    fn invariance_examples() {
        let s = Subspace::coordinate(2, &[0]);
        let r = is_invariant(&Subspace::full(2), &s, &tol()).unwrap();
        assert!(r.invariant() && r.consistent());

        let diag = Subspace::span(&[v(&[1.0, 1.0])], 2, &tol()).unwrap();
        let r = is_invariant(&diag, &s, &tol()).unwrap();
        assert!(!r.invariant() && r.consistent());
        let (w, res) = invariance_witness(&diag, &s).unwrap();
        assert_eq!(w.len(), 2);
        assert!(res > 0.1);

        let m = Subspace::coordinate(2, &[0])
            .sum(&Subspace::coordinate(2, &[1]), &tol())
            .unwrap();
        assert!(is_invariant(&m, &s, &tol()).unwrap().invariant());
    }

    #[test]
    fn frames_roundtrip() {
        let frame = Subspace::coordinate(3, &[0, 2]);
        let u = Subspace::coordinate(3, &[2]);
        let local = u.in_frame(&frame, &tol()).unwrap();
        assert_eq!(local.ambient_dim(), 2);
        let back = local.from_frame(&frame, &tol()).unwrap();
        assert!(back.gap(&u).unwrap() < 1e-14);
        assert!(Subspace::coordinate(3, &[1])
            .in_frame(&frame, &tol())
            .is_err());
    }
}
