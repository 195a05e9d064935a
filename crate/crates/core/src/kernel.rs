//! Dense complex linear algebra primitives.
//!
//! Every numerical-rank decision in the crate goes through
//! [`orthonormal_columns`] / [`rank_cutoff`], so all derived subspaces
//! share one rank policy.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Numerical thresholds shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative singular-value cutoff used for rank decisions.
    pub rank_rel: f64,
    /// Absolute threshold for subspace gaps and PSD checks.
    pub eq_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel: 1e-10,
            eq_abs: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(rank_rel: f64, eq_abs: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0 && v < 1.0;
        if !ok(rank_rel) || !ok(eq_abs) {
            return Err(Error::InvalidTolerance { rank_rel, eq_abs });
        }
        Ok(Self { rank_rel, eq_abs })
    }

    /// Singular values at or below this are treated as zero. The cutoff is
    /// relative to the largest singular value, floored at unit scale so that
    /// roundoff-only inputs are recognised as rank zero.
    pub fn rank_cutoff(&self, sigma_max: f64) -> f64 {
        self.rank_rel * sigma_max.max(1.0)
    }

    /// PSD / Hermitian slack for a matrix of the given norm.
    pub fn scaled_eq(&self, norm: f64) -> f64 {
        self.eq_abs * (1.0 + norm)
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Builds a complex matrix from real row-major entries.
pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(
        entries.len(),
        rows * cols,
        "entry count must equal rows*cols"
    );
    ComplexMatrix::from_fn(rows, cols, |i, j| c(entries[i * cols + j], 0.0))
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c(values[i], 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    svd(m).sigma.iter().cloned().fold(0.0, f64::max)
}

const SVD_MAX_SWEEPS: usize = 60;

/// Thin singular value decomposition `M = U diag(σ) V*`.
///
/// `u` has one column per column of `M` (columns for zero singular values
/// are zero); `v` is square and unitary. Singular values are not sorted.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

/// One-sided (Hestenes) Jacobi SVD. Column pairs are rotated until they
/// are numerically orthogonal, which gives singular vectors accurate to
/// roundoff relative to each singular value.
pub fn svd(m: &ComplexMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = identity(cols);
    // Columns this small carry no information; rotating them only risks
    // underflow in the phase factor.
    let negligible = (f64::EPSILON * 1e-3 * m.norm()).powi(2);
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dotc(&a.column(j));
                let g = gamma.norm();
                if alpha.min(beta) <= negligible || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let ph = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut a, &mut v] {
                    for r in 0..mat.nrows() {
                        let x = mat[(r, i)];
                        let y = mat[(r, j)] * ph;
                        mat[(r, i)] = x * cs - y * sn;
                        mat[(r, j)] = x * sn + y * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma = Vec::with_capacity(cols);
    let mut u = zeros(rows, cols);
    for j in 0..cols {
        let s = a.column(j).norm();
        sigma.push(s);
        if s > 0.0 {
            u.set_column(j, &(a.column(j) / c(s, 0.0)));
        }
    }
    Svd { u, sigma, v }
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn is_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> bool {
    m.is_square() && op_norm(&(m - m.adjoint())) <= tol.scaled_eq(op_norm(m))
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `j` belongs to `values[j]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = diag_real(&self.values);
        &self.vectors * d * self.vectors.adjoint()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }
}

/// Cyclic complex Jacobi eigen-solver. Deterministic for fixed input.
pub fn hermitian_eig(h: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eig needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let norm = op_norm(h);
    let asym = op_norm(&(h - h.adjoint()));
    if asym > tol.scaled_eq(norm) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let n = h.nrows();
    let mut a = hermitian_part(h);
    let mut v = identity(n);
    let scale = a.norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // Phase that makes the (p,q) entry real, then a real rotation.
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                let ph = phase.conj();
                let u_pp = c(cs, 0.0);
                let u_pq = c(sn, 0.0);
                let u_qp = -ph * sn;
                let u_qq = ph * cs;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, col| v[(r, order[col])]);
    Ok(HermitianEigen { values, vectors })
}

/// Rotates each column so that its largest-magnitude entry is real positive.
pub fn canonical_phase(mut q: ComplexMatrix) -> ComplexMatrix {
    for mut col in q.column_iter_mut() {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for (i, z) in col.iter().enumerate() {
            let m = z.norm();
            if m > best_abs * (1.0 + 1e-12) {
                best = i;
                best_abs = m;
            }
        }
        if best_abs > 0.0 {
            let ph = (col[best] / best_abs).conj();
            col *= ph;
        }
    }
    q
}

/// Orthonormal basis of the column span of `m`, one column per singular
/// value above the rank cutoff.
pub fn orthonormal_columns(m: &ComplexMatrix, tol: &Tolerances) -> ComplexMatrix {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return zeros(rows, 0);
    }
    let Svd { u, sigma, .. } = svd(m);
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let cut = tol.rank_cutoff(smax);
    let keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > cut).collect();
    let q = ComplexMatrix::from_fn(rows, keep.len(), |r, j| u[(r, keep[j])]);
    canonical_phase(q)
}

/// Orthonormal basis of the null space of `m` (as a subspace of C^{ncols}).
pub fn null_space(m: &ComplexMatrix, tol: &Tolerances) -> ComplexMatrix {
    let n = m.ncols();
    let row_space = orthonormal_columns(&m.adjoint(), tol);
    if row_space.ncols() == 0 {
        return canonical_phase(identity(n));
    }
    let p = identity(n) - &row_space * row_space.adjoint();
    orthonormal_columns(&p, tol)
}

/// Hermitian PSD square root. Eigenvalues in `[-eq, 0)` are clamped to zero,
/// as are eigenvalues below the rank cutoff.
pub fn psd_sqrt(h: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h, tol)?;
    let lmax = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let slack = tol.scaled_eq(lmax);
    let cut = tol.rank_cutoff(lmax);
    let mut roots = Vec::with_capacity(eig.values.len());
    for &l in &eig.values {
        if l < -slack {
            return Err(Error::NotPsd { eigenvalue: l });
        }
        roots.push(if l <= cut { 0.0 } else { l.sqrt() });
    }
    let r = &eig.vectors * diag_real(&roots) * eig.vectors.adjoint();
    Ok(hermitian_part(&r))
}

/// Minimal-norm solution `Y` of `R Y = B`; columns of `Y` lie in the row
/// space of `R`.
pub fn pseudo_apply_inverse(
    r: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    if r.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "pseudo_apply_inverse: R has {} rows, B has {}",
            r.nrows(),
            b.nrows()
        )));
    }
    let (p, q) = r.shape();
    let k = b.ncols();
    let check = |residual: &ComplexMatrix| -> Result<()> {
        for (j, col) in residual.column_iter().enumerate() {
            let res = col.norm();
            if res > tol.scaled_eq(b.column(j).norm()) {
                return Err(Error::Unsolvable {
                    column: j,
                    residual: res,
                });
            }
        }
        Ok(())
    };
    if p == 0 || q == 0 {
        check(b)?;
        return Ok(zeros(q, k));
    }
    let Svd { u, sigma, v } = svd(r);
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let cut = tol.rank_cutoff(smax);
    let keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > cut).collect();
    let uk = ComplexMatrix::from_fn(p, keep.len(), |i, j| u[(i, keep[j])]);
    let vk = ComplexMatrix::from_fn(q, keep.len(), |i, j| v[(i, keep[j])]);
    let coeff = uk.adjoint() * b;
    check(&(b - &uk * &coeff))?;
    let mut scaled = coeff;
    for (j, mut row) in scaled.row_iter_mut().enumerate() {
        row /= c(sigma[keep[j]], 0.0);
    }
    Ok(vk * scaled)
}

/// Smallest eigenvalue of a Hermitian matrix; `None` for 0x0.
pub fn min_eigenvalue(h: &ComplexMatrix, tol: &Tolerances) -> Result<Option<f64>> {
    Ok(hermitian_eig(h, tol)?.min())
}

/// `true` when the Hermitian matrix has no eigenvalue below `-eq*(1+|h|)`.
pub fn is_psd(h: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    let slack = tol.scaled_eq(op_norm(h));
    Ok(min_eigenvalue(h, tol)?.is_none_or(|l| l >= -slack))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn rand_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        // xorshift, good enough for fixtures
        let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        ComplexMatrix::from_fn(rows, cols, |_, _| c(next(), next()))
    }

    #[test]
    fn svd_reconstructs() {
        for (rows, cols, seed) in [(5, 3, 1), (3, 5, 2), (6, 6, 3), (1, 4, 4)] {
            let m = rand_matrix(rows, cols, seed);
            let d = svd(&m);
            let sig = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                cols,
                d.sigma.iter().map(|&x| c(x, 0.0)),
            ));
            assert!((&d.u * sig * d.v.adjoint() - &m).norm() < 1e-13);
            let err = (d.v.adjoint() * &d.v - identity(cols)).norm();
            assert!(err < 1e-13, "{rows}x{cols}: {err:e}");
        }
    }

    #[test]
    fn nearly_rank_one_row_space() {
        // rows are parallel to e1 up to roundoff-sized second components
        let y = from_real_rows(
            2,
            2,
            &[
                -0.1825741858350561,
                -3.33e-16,
                0.5477225575051654,
                -1.665e-15,
            ],
        );
        let null = null_space(&y, &tol());
        assert_eq!(null.ncols(), 1);
        assert!(null[(0, 0)].norm() < 1e-13);
    }

    #[test]
    fn eig_identity_and_swap() {
        let e = hermitian_eig(&identity(2), &tol()).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        assert!((&e.vectors - identity(2)).norm() < 1e-15);

        let swap = from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = hermitian_eig(&swap, &tol()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_random_hermitian_reconstructs() {
        let g = rand_matrix(6, 6, 3);
        let h = &g + g.adjoint();
        let e = hermitian_eig(&h, &tol()).unwrap();
        assert!(op_norm(&(e.reconstruct() - &h)) < 1e-10);
        assert!(op_norm(&(e.vectors.adjoint() * &e.vectors - identity(6))) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            hermitian_eig(&m, &tol()),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            hermitian_eig(&zeros(2, 3), &tol()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn orthonormal_columns_rank_one() {
        let m = from_real_rows(2, 2, &[1.0, 2.0, 0.0, 0.0]);
        let q = orthonormal_columns(&m, &tol());
        assert_eq!(q.ncols(), 1);
        assert!((q[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(orthonormal_columns(&zeros(3, 3), &tol()).ncols(), 0);
        assert_eq!(orthonormal_columns(&zeros(3, 0), &tol()).ncols(), 0);
    }

    #[test]
    fn orthonormal_columns_rank_two_product() {
        let left = rand_matrix(5, 2, 11);
        let right = rand_matrix(2, 3, 12);
        let q = orthonormal_columns(&(&left * right), &tol());
        assert_eq!(q.ncols(), 2);
        // projector built from the rank-2 factor
        let gram_inv = (left.adjoint() * &left).try_inverse().unwrap();
        let p_ref = &left * gram_inv * left.adjoint();
        assert!(op_norm(&(&q * q.adjoint() - p_ref)) < 1e-9);
    }

    #[test]
    fn psd_sqrt_cases() {
        let r = psd_sqrt(&diag_real(&[4.0, 9.0]), &tol()).unwrap();
        assert!((r - diag_real(&[2.0, 3.0])).norm() < 1e-14);
        let r = psd_sqrt(&identity(3), &tol()).unwrap();
        assert!((r - identity(3)).norm() < 1e-14);
        let h = from_real_rows(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        let r = psd_sqrt(&h, &tol()).unwrap();
        assert!(op_norm(&(&r * &r - &h)) < 1e-10);
        assert!(matches!(
            psd_sqrt(&diag_real(&[1.0, -0.5]), &tol()),
            Err(Error::NotPsd { .. })
        ));
        // tiny negative roundoff is clamped
        let r = psd_sqrt(&diag_real(&[1.0, -1e-12]), &tol()).unwrap();
        assert_eq!(r[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn pseudo_inverse_cases() {
        let b = rand_matrix(3, 2, 5);
        let y = pseudo_apply_inverse(&identity(3), &b, &tol()).unwrap();
        assert!((y - &b).norm() < 1e-14);

        let r = diag_real(&[2.0, 0.0]);
        let e1 = from_real_rows(2, 1, &[1.0, 0.0]);
        let y = pseudo_apply_inverse(&r, &e1, &tol()).unwrap();
        assert!((y[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(y[(1, 0)].norm() < 1e-15);

        let e2 = from_real_rows(2, 1, &[0.0, 1.0]);
        assert!(matches!(
            pseudo_apply_inverse(&r, &e2, &tol()),
            Err(Error::Unsolvable { column: 0, .. })
        ));

        let root = psd_sqrt(&from_real_rows(2, 2, &[2.0, 1.0, 1.0, 1.0]), &tol()).unwrap();
        let rhs = from_real_rows(2, 1, &[1.0, 0.25]);
        let y = pseudo_apply_inverse(&root, &rhs, &tol()).unwrap();
        assert!((&root * y - rhs).norm() < 1e-10);
    }

    #[test]
    fn null_space_dimensions() {
        let m = from_real_rows(1, 3, &[1.0, 1.0, 0.0]);
        let n = null_space(&m, &tol());
        assert_eq!(n.ncols(), 2);
        assert!((&m * &n).norm() < 1e-14);
        assert_eq!(null_space(&zeros(0, 3), &tol()).ncols(), 3);
    }

    #[test]
    fn tolerances_validate() {
        assert!(Tolerances::new(1e-10, 1e-8).is_ok());
        assert!(Tolerances::new(0.0, 1e-8).is_err());
        assert!(Tolerances::new(1e-10, 1.5).is_err());
    }
}
