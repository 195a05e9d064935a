//! Seeded random instances.
//!
//! All randomness comes from ChaCha8 streams seeded with a 64-bit value, so
//! instances are reproducible across platforms. Sub-streams for trial or
//! sample `i` use [`derive_seed`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, ComplexMatrix, Tolerances};
use crate::nonneg::NonnegSelfAdjointRelation;
use crate::relation::LinearRelation;
use crate::subspace::Subspace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub ambient_dim: usize,
    pub s_dim: usize,
    pub d1_dim: usize,
    pub d2_dim: usize,
    pub seed: u64,
    #[serde(default = "default_scale")]
    pub spectrum_scale: f64,
}

fn default_scale() -> f64 {
    1.0
}

impl InstanceSpec {
    pub fn new(ambient_dim: usize, s_dim: usize, d1_dim: usize, d2_dim: usize, seed: u64) -> Self {
        Self {
            ambient_dim,
            s_dim,
            d1_dim,
            d2_dim,
            seed,
            spectrum_scale: 1.0,
        }
    }

    pub fn check(&self) -> Result<()> {
        let Self {
            ambient_dim: n,
            s_dim: k,
            d1_dim,
            d2_dim,
            spectrum_scale,
            ..
        } = *self;
        if n == 0 {
            return Err(Error::SpecInvalid("ambient_dim must be positive".into()));
        }
        if k > n || d1_dim > k || d2_dim > n - k {
            return Err(Error::SpecInvalid(format!(
                "need d1_dim <= s_dim <= ambient_dim and d2_dim <= ambient_dim - s_dim, \
                 got n={n}, k={k}, d1={d1_dim}, d2={d2_dim}"
            )));
        }
        if !(spectrum_scale.is_finite() && spectrum_scale > 0.0) {
            return Err(Error::SpecInvalid(format!(
                "spectrum_scale must be positive, got {spectrum_scale}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub spec: InstanceSpec,
    pub a: NonnegSelfAdjointRelation,
    pub s: Subspace,
}

/// SplitMix64 finaliser applied to `seed + index·φ`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian entries (`E|z|² = 1`).
pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        kernel::c(re * s, im * s)
    })
}

/// `k` Haar-distributed orthonormal columns in C^n.
pub fn haar_frame<R: Rng>(rng: &mut R, n: usize, k: usize) -> ComplexMatrix {
    assert!(k <= n, "cannot draw {k} orthonormal vectors in C^{n}");
    if k == 0 {
        return kernel::zeros(n, 0);
    }
    let qr = gaussian_matrix(rng, n, k).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..k {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= ph;
            }
        }
    }
    q
}

/// Hermitian PSD `k×k` matrix with eigenvalues uniform in `[0, scale)`.
pub fn random_psd_spectrum<R: Rng>(rng: &mut R, k: usize, scale: f64) -> ComplexMatrix {
    let u = haar_frame(rng, k, k);
    let lambda: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * scale).collect();
    kernel::hermitian_part(&(&u * kernel::diag_real(&lambda) * u.adjoint()))
}

/// Everywhere-defined PSD matrix `G G*` of random rank between 1 and n,
/// normalised to unit norm.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let r = rng.random_range(1..=n);
    let g = gaussian_matrix(rng, n, r);
    let m = &g * g.adjoint();
    let norm = kernel::op_norm(&m);
    kernel::hermitian_part(&(m / kernel::c(norm.max(f64::MIN_POSITIVE), 0.0)))
}

/// A random relation from C^n to C^m. The graph dimension is uniform in
/// `0..=n+m`, so nontrivial kernels and multivalued parts are common; some
/// graphs are spanned by products of Gaussians to vary the conditioning.
pub fn random_relation<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    tol: &Tolerances,
) -> Result<LinearRelation> {
    let r = rng.random_range(0..=n + m);
    let pairs = if r > 1 && rng.random_bool(0.25) {
        let inner = rng.random_range(1..=r);
        gaussian_matrix(rng, n + m, inner) * gaussian_matrix(rng, inner, r)
    } else {
        gaussian_matrix(rng, n + m, r)
    };
    LinearRelation::from_graph_matrix(&pairs, n, m, tol)
}

/// A random valid spec with ambient dimension in `1..=max_dim`.
pub fn random_spec<R: Rng>(rng: &mut R, max_dim: usize) -> InstanceSpec {
    let n = rng.random_range(1..=max_dim.max(1));
    let k = rng.random_range(0..=n);
    let d1 = rng.random_range(0..=k);
    let d2 = rng.random_range(0..=n - k);
    InstanceSpec::new(n, k, d1, d2, rng.random())
}

/// Builds `S` first, then `D₁ ⊆ S` and `D₂ ⊆ S⊥`, and puts a random PSD
/// operator on `dom = D₁ ⊕ D₂` with `mul = dom⊥`.
pub fn generate(spec: &InstanceSpec, tol: &Tolerances) -> Result<Instance> {
    spec.check()?;
    let n = spec.ambient_dim;
    let k = spec.s_dim;
    let mut rng = rng_from_seed(spec.seed);
    let u = haar_frame(&mut rng, n, n);
    let s_frame = u.columns(0, k).into_owned();
    let perp_frame = u.columns(k, n - k).into_owned();
    let d1 = &s_frame * haar_frame(&mut rng, k, spec.d1_dim);
    let d2 = &perp_frame * haar_frame(&mut rng, n - k, spec.d2_dim);
    let dim_dom = spec.d1_dim + spec.d2_dim;
    let mut dom_frame = kernel::zeros(n, dim_dom);
    dom_frame.columns_mut(0, spec.d1_dim).copy_from(&d1);
    dom_frame
        .columns_mut(spec.d1_dim, spec.d2_dim)
        .copy_from(&d2);
    let h_frame = random_psd_spectrum(&mut rng, dim_dom, spec.spectrum_scale);

    let s = Subspace::from_columns(&s_frame, tol);
    let dom = Subspace::from_columns(&dom_frame, tol);
    if dom.dim() != dim_dom || s.dim() != k {
        return Err(Error::InternalInconsistency(
            "random frame lost rank".into(),
        ));
    }
    let a_full = &dom_frame * h_frame * dom_frame.adjoint();
    let h = dom.to_coords(&(a_full * dom.basis()));
    let a = NonnegSelfAdjointRelation::from_parts(&dom, &kernel::hermitian_part(&h), tol)?;
    Ok(Instance { spec: *spec, a, s })
}
