mod common;

use linrel::block;
use linrel::kernel;
use linrel::nonneg::leq;
use linrel::schur;
use linrel::subspace::is_invariant;
use linrel::NonnegSelfAdjointRelation;
use proptest::prelude::*;

use common::{instance, nonneg, rng, subspace, tol};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn block_representation(seed: u64, max_dim in 1usize..=8) {
        let t = tol();
        let inst = instance(seed, max_dim);
        let rep = block::analyze(&inst.a, &inst.s, &t).unwrap();
        prop_assert!(rep.roundtrip_gap(&t).unwrap() < t.eq_abs);
        prop_assert!(rep.adjoint_symmetry_gap(&t).unwrap() < t.eq_abs);
        let (gb, gc) = rep.reconstruction_gaps(&t).unwrap();
        prop_assert!(gb < t.eq_abs && gc < t.eq_abs);
        let (nf, ng) = rep.contraction_norms();
        prop_assert!(nf <= 1.0 + 1e-10 && ng <= 1.0 + 1e-10);
        prop_assert!(rep.decomposability_gaps(&t).unwrap().worst() < t.eq_abs);

        let dom = inst.a.domain();
        prop_assert!(rep.n1.gap(&inst.s.intersect(dom, &t).unwrap()).unwrap() < t.eq_abs);
        prop_assert!(rep.n2.gap(&rep.s_perp.intersect(dom, &t).unwrap()).unwrap() < t.eq_abs);
        let split = block::splitting_report(&inst.a, &inst.s, &t).unwrap();
        prop_assert!(split.consistent() && split.dom_invariant && split.mul_invariant);
        let f = rep.factorize(&t).unwrap();
        prop_assert!(f.matrix_residual < t.eq_abs && f.relation_gap < t.eq_abs);
    }

    #[test]
    fn splitting_conditions_agree_without_invariance(seed: u64, n in 1usize..=6) {
        let t = tol();
        let mut g = rng(seed);
        let a = nonneg(&mut g, n);
        let s = subspace(&mut g, n);
        let split = block::splitting_report(&a, &s, &t).unwrap();
        prop_assert!(split.consistent(), "{:?}", split);
        if split.dom_invariant {
            prop_assert!(split.mul_invariant);
        } else {
            let is_violation = matches!(
                block::analyze(&a, &s, &t),
                Err(linrel::Error::InvarianceViolated { .. })
            );
            prop_assert!(is_violation);
        }
        prop_assert!(is_invariant(a.domain(), &s, &t).unwrap().consistent());
    }

    #[test]
    fn schur_complement_properties(seed: u64, max_dim in 1usize..=8) {
        let t = tol();
        let inst = instance(seed, max_dim);
        let r = schur::schur_complement(&inst.a, &inst.s, &t).unwrap();
        let d = r.diagnostics;
        prop_assert!(d.tt_lemma_gap < t.eq_abs && d.compression_lemma_gap < t.eq_abs);
        prop_assert!(d.schur_is_member && d.compression_dominated);
        prop_assert!(schur::is_member(&inst.a, &inst.s, &r.schur, &t).unwrap());
        prop_assert!(leq(&r.compression, &inst.a, &t).unwrap());
        prop_assert!(r.compression.mul().gap(inst.a.mul()).unwrap() < t.eq_abs);
        let validated = NonnegSelfAdjointRelation::validate(r.schur.relation(), &t).unwrap();
        prop_assert!(validated.gap(&r.schur).unwrap() < t.eq_abs);

        let probe = schur::maximality_probe(&inst.a, &inst.s, &r, seed, 40, &t).unwrap();
        prop_assert_eq!(probe.violations, 0);
        prop_assert!(probe.accepted >= 20);
    }

    #[test]
    fn schur_complement_is_idempotent(seed: u64, max_dim in 1usize..=8) {
        let t = tol();
        let inst = instance(seed, max_dim);
        let r = schur::schur_complement(&inst.a, &inst.s, &t).unwrap();
        let again = schur::schur_complement(&r.schur, &inst.s, &t).unwrap();
        prop_assert!(again.schur.gap(&r.schur).unwrap() < t.eq_abs);
    }

    #[test]
    fn decomposition_and_pekarev(seed: u64, max_dim in 1usize..=8) {
        let t = tol();
        let inst = instance(seed, max_dim);
        let r = schur::schur_complement(&inst.a, &inst.s, &t).unwrap();
        let p = schur::pekarev_from_blocks(&r.rep, &t).unwrap();
        prop_assert!(p.conditions.all());
        prop_assert!(p.schur.gap(&r.schur).unwrap() < t.eq_abs);
        prop_assert!(p.compression.gap(&r.compression).unwrap() < t.eq_abs);
        let dec = schur::decomposition_from(&r, &p, &t).unwrap();
        prop_assert!(dec.verified && dec.sum_gap < t.eq_abs);
        // The literal composition only differs when S meets mul A.
        let meets = inst.s.intersect(inst.a.mul(), &t).unwrap().dim() > 0;
        prop_assert_eq!(p.literal_schur_gap >= t.eq_abs, meets);
    }

    #[test]
    fn bounded_case_matches_oracle(seed: u64, n in 1usize..=8, scale in 0.01f64..100.0) {
        let t = tol();
        let mut g = rng(seed);
        let a = linrel::generator::random_psd(&mut g, n) * kernel::c(scale, 0.0);
        let s = subspace(&mut g, n);
        let gap = linrel::verify::bounded_oracle_gap(&a, &s, &t).unwrap();
        prop_assert!(gap < t.eq_abs * (1.0 + scale));
    }
}
