#![allow(dead_code)]

use linrel::generator::{self, Instance};
use linrel::kernel::{self, ComplexMatrix};
use linrel::{LinearRelation, NonnegSelfAdjointRelation, Subspace, Tolerances};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    generator::rng_from_seed(seed)
}

pub fn hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = generator::gaussian_matrix(rng, n, n);
    kernel::hermitian_part(&g)
}

/// Span of `k` Gaussian vectors, possibly rank deficient when `k > n`.
pub fn subspace(rng: &mut ChaCha8Rng, n: usize) -> Subspace {
    let k = rng.random_range(0..=n);
    Subspace::from_columns(&generator::gaussian_matrix(rng, n, k), &tol())
}

pub fn relation(rng: &mut ChaCha8Rng, max_dim: usize) -> LinearRelation {
    let n = rng.random_range(1..=max_dim);
    let m = rng.random_range(1..=max_dim);
    generator::random_relation(rng, n, m, &tol()).unwrap()
}

/// Nonnegative selfadjoint relation on C^n with a random domain.
pub fn nonneg(rng: &mut ChaCha8Rng, n: usize) -> NonnegSelfAdjointRelation {
    let dom = subspace(rng, n);
    let h = generator::random_psd_spectrum(rng, dom.dim(), 3.0);
    NonnegSelfAdjointRelation::from_parts(&dom, &h, &tol()).unwrap()
}

pub fn instance(seed: u64, max_dim: usize) -> Instance {
    let mut r = rng(seed);
    let spec = generator::random_spec(&mut r, max_dim);
    generator::generate(&spec, &tol()).unwrap()
}
