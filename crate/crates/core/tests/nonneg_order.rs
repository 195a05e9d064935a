mod common;

use linrel::generator;
use linrel::kernel;
use linrel::nonneg::{self, leq};
use linrel::NonnegSelfAdjointRelation;
use proptest::prelude::*;

use common::{nonneg, relation, rng, subspace, tol};

/// `A + X` for a random everywhere-defined PSD `X`, so that `A ≤ A + X`.
fn plus_psd(a: &NonnegSelfAdjointRelation, seed: u64) -> NonnegSelfAdjointRelation {
    let t = tol();
    let mut g = rng(seed);
    let x = generator::random_psd(&mut g, a.dim());
    let sum = a
        .relation()
        .add(&linrel::LinearRelation::from_matrix(&x, &t), &t)
        .unwrap();
    NonnegSelfAdjointRelation::validate(&sum, &t).unwrap()
}

proptest! {
    #[test]
    fn order_is_reflexive(seed: u64, n in 1usize..=6) {
        let t = tol();
        let a = nonneg(&mut rng(seed), n);
        prop_assert!(leq(&a, &a, &t).unwrap());
    }

    #[test]
    fn order_is_antisymmetric(seed: u64, n in 1usize..=6) {
        let t = tol();
        let mut g = rng(seed);
        let a = nonneg(&mut g, n);
        let b = nonneg(&mut g, n);
        if leq(&a, &b, &t).unwrap() && leq(&b, &a, &t).unwrap() {
            prop_assert!(a.gap(&b).unwrap() < t.eq_abs);
        }
        let c = a.scale(1.0, &t).unwrap();
        prop_assert!(leq(&a, &c, &t).unwrap() && leq(&c, &a, &t).unwrap());
    }

    #[test]
    fn order_is_transitive(seed: u64, n in 1usize..=6, s1 in 0.0f64..1.0, s2 in 0.0f64..1.0) {
        let t = tol();
        let c = nonneg(&mut rng(seed), n);
        let b = c.scale(s1.max(s2), &t).unwrap();
        let a = c.scale(s1.min(s2), &t).unwrap();
        prop_assert!(leq(&a, &b, &t).unwrap());
        prop_assert!(leq(&b, &c, &t).unwrap());
        prop_assert!(leq(&a, &c, &t).unwrap());

        // A chain built by adding PSD operators.
        let b = plus_psd(&a, seed ^ 1);
        let c = plus_psd(&b, seed ^ 2);
        prop_assert!(leq(&a, &b, &t).unwrap());
        prop_assert!(leq(&b, &c, &t).unwrap());
        prop_assert!(leq(&a, &c, &t).unwrap());
    }

    #[test]
    fn top_element(seed: u64, n in 1usize..=6) {
        let t = tol();
        let a = nonneg(&mut rng(seed), n);
        let top = NonnegSelfAdjointRelation::top(n, &t);
        prop_assert!(leq(&a, &top, &t).unwrap());
    }

    #[test]
    fn order_contraction_is_contractive(seed: u64, n in 1usize..=6) {
        let t = tol();
        let a = nonneg(&mut rng(seed), n);
        let b = plus_psd(&a, seed ^ 3);
        let w = nonneg::order_contraction(&a, &b, &t).unwrap();
        prop_assert!(kernel::op_norm(&w) <= 1.0 + 1e-8);
    }

    #[test]
    fn gram_identities(seed: u64) {
        let t = tol();
        let r = relation(&mut rng(seed), 8);
        let (g, report) = nonneg::gram_with_report(&r, &t).unwrap();
        prop_assert!(report.worst() < t.eq_abs, "{:?}", report);
        prop_assert!(g.relation().ker(&t).gap(&r.ker(&t)).unwrap() < t.eq_abs);
        prop_assert!(g.mul().gap(&r.adjoint(&t).mul(&t)).unwrap() < t.eq_abs);
    }

    #[test]
    fn square_root_squares_back(seed: u64, n in 1usize..=6) {
        let t = tol();
        let a = nonneg(&mut rng(seed), n);
        let root = a.sqrt(&t).unwrap().relation();
        let square = root.compose(root, &t).unwrap();
        prop_assert!(square.gap(a.relation()).unwrap() < t.eq_abs);
        prop_assert!(a.sqrt(&t).unwrap().mul().gap(a.mul()).unwrap() < t.eq_abs);
    }

    #[test]
    fn friedrichs_extends(seed: u64, n in 1usize..=6) {
        let t = tol();
        let mut g = rng(seed);
        let a = nonneg(&mut g, n);
        let u = subspace(&mut g, n).intersect(a.domain(), &t).unwrap();
        let sym = a.relation().restrict(&u, &t).unwrap();
        let f = nonneg::friedrichs(&sym, &t).unwrap();
        prop_assert!(f.relation().includes(&sym, &t).unwrap());
        prop_assert!(f.mul().gap(&sym.dom(&t).complement(&t)).unwrap() < t.eq_abs);
    }

    #[test]
    fn validate_rejects_indefinite(seed: u64, n in 1usize..=6) {
        let t = tol();
        let mut g = rng(seed);
        let h = common::hermitian(&mut g, n);
        let m = kernel::min_eigenvalue(&h, &t).unwrap().unwrap();
        let r = NonnegSelfAdjointRelation::from_psd_matrix(&h, &t);
        if m < -1e-6 {
            prop_assert!(r.is_err());
        }
    }
}
