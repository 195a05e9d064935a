//! Randomised verification harness.
//!
//! Trial `i` draws an instance and a random relation from the stream
//! seeded with `derive_seed(seed, i)` and runs every check on them. Trials
//! are independent and run in parallel; results are aggregated in trial
//! order, so the report depends only on `(seed, trials, max_dim, tol)`.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::block;
use crate::error::Result;
use crate::generator::{self, Instance};
use crate::json;
use crate::kernel::{self, Tolerances};
use crate::nonneg::{self, NonnegSelfAdjointRelation};
use crate::relation::LinearRelation;
use crate::schur;

pub const CHECKS: [&str; 12] = [
    "adjoint_involution",
    "vonneumann_identities",
    "block_roundtrip",
    "contraction_bound",
    "reconstruction_bc",
    "factorize_wz",
    "schur_membership",
    "schur_maximality",
    "schur_lemma_equality",
    "compression_domination",
    "additive_decomposition",
    "pekarev_equality",
];

/// Candidates drawn per instance by the maximality probe; half of them are
/// scalings of the Schur complement and always accepted.
pub const MAXIMALITY_SAMPLES: usize = 40;
pub const MIN_ACCEPTED_MEMBERS: usize = 20;
/// Allowed excess of `σ_max(f)`, `σ_max(g)` over 1.
pub const CONTRACTION_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_dim: usize,
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CheckStats {
    pub passed: usize,
    pub failed: usize,
    pub worst_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub check: String,
    pub detail: String,
    pub instance: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub trials: usize,
    pub max_dim: usize,
    pub checks: BTreeMap<String, CheckStats>,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.checks.values().all(|c| c.failed == 0)
    }
}

/// Outcome of one check: passed flag, residual, explanation on failure.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub residual: f64,
    pub detail: String,
}

impl Outcome {
    fn below(residual: f64, bound: f64, what: &str) -> Self {
        let passed = residual < bound;
        Self {
            passed,
            residual,
            detail: if passed {
                String::new()
            } else {
                format!("{what}: residual {residual:e} >= {bound:e}")
            },
        }
    }

    fn flag(passed: bool, residual: f64, what: &str) -> Self {
        Self {
            passed,
            residual,
            detail: if passed {
                String::new()
            } else {
                what.to_string()
            },
        }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Self {
            passed: false,
            residual: f64::INFINITY,
            detail: format!("error: {e}"),
        }
    }
}

/// Gaps of `T** = T`, `mul T* = (dom T)⊥`, `ker T* = (ran T)⊥` and
/// `T = T₀ ⊕̂ ({0} × mul T)`.
pub fn relation_calculus_residual(t: &LinearRelation, tol: &Tolerances) -> Result<f64> {
    let adj = t.adjoint(tol);
    let involution = adj.adjoint(tol).gap(t)?;
    let mul = adj.mul(tol).gap(&t.dom(tol).complement(tol))?;
    let ker = adj.ker(tol).gap(&t.ran(tol).complement(tol))?;
    let reassembly = t.operator_part(tol)?.reassemble(tol)?.gap(t)?;
    Ok(involution.max(mul).max(ker).max(reassembly))
}

fn instance_json(inst: &Instance, t: &LinearRelation, tol: &Tolerances) -> Value {
    json!({
        "spec": inst.spec,
        "relation": json::nonneg_to_json(&inst.a, tol),
        "subspace": json::subspace_to_json(&inst.s),
        "random_relation": json::relation_to_json(t, false, tol),
    })
}

/// Runs every check on one generated instance and one random relation.
pub fn check_instance(
    inst: &Instance,
    t: &LinearRelation,
    probe_seed: u64,
    tol: &Tolerances,
) -> Vec<(&'static str, Outcome)> {
    let eq = tol.eq_abs;
    let mut out: Vec<(&'static str, Outcome)> = Vec::with_capacity(CHECKS.len());

    out.push((
        "adjoint_involution",
        match relation_calculus_residual(t, tol) {
            Ok(r) => Outcome::below(r, eq, "relation calculus"),
            Err(e) => Outcome::error(e),
        },
    ));
    out.push((
        "vonneumann_identities",
        match nonneg::gram_with_report(t, tol) {
            Ok((_, rep)) => Outcome::below(rep.worst(), eq, "T*T identities"),
            Err(e) => Outcome::error(e),
        },
    ));

    let result =
        block::analyze(&inst.a, &inst.s, tol).and_then(|rep| schur::schur_from_blocks(rep, tol));
    let result = match result {
        Ok(r) => r,
        Err(e) => {
            for name in &CHECKS[2..] {
                out.push((name, Outcome::error(&e)));
            }
            return out;
        }
    };
    let rep = &result.rep;

    out.push((
        "block_roundtrip",
        (|| -> Result<Outcome> {
            let split = block::splitting_report(&inst.a, &inst.s, tol)?;
            let r = rep
                .roundtrip_gap(tol)?
                .max(rep.adjoint_symmetry_gap(tol)?)
                .max(rep.decomposability_gaps(tol)?.worst());
            let ok = split.consistent() && split.dom_invariant && split.mul_invariant;
            Ok(if ok {
                Outcome::below(r, eq, "assemble/analyze round trip")
            } else {
                Outcome::flag(
                    false,
                    r,
                    &format!("splitting conditions disagree: {split:?}"),
                )
            })
        })()
        .unwrap_or_else(Outcome::error),
    ));
    let (nf, ng) = rep.contraction_norms();
    let excess = (nf.max(ng) - 1.0).max(0.0);
    out.push((
        "contraction_bound",
        Outcome::flag(
            excess <= CONTRACTION_SLACK,
            excess,
            &format!("sigma_max(f)={nf}, sigma_max(g)={ng}"),
        ),
    ));
    out.push((
        "reconstruction_bc",
        match rep.reconstruction_gaps(tol) {
            Ok((gb, gc)) => Outcome::below(gb.max(gc), eq, "b/c reconstruction"),
            Err(e) => Outcome::error(e),
        },
    ));
    out.push((
        "factorize_wz",
        match rep.factorize(tol) {
            Ok(f) => Outcome::below(f.matrix_residual.max(f.relation_gap), eq, "(WZ)*(WZ) = A"),
            Err(e) => Outcome::error(e),
        },
    ));

    out.push((
        "schur_membership",
        (|| -> Result<Outcome> {
            let sp = inst.s.complement(tol);
            let leak = result.schur.relation().ran(tol).containment_residual(&sp)?;
            let adj_gap = result
                .schur
                .relation()
                .gap(&result.schur.relation().adjoint(tol))?;
            let ok = result.diagnostics.schur_is_member;
            Ok(if ok {
                Outcome::below(leak.max(adj_gap), eq, "A/S range or selfadjointness")
            } else {
                Outcome::flag(false, leak, "A/S is not a member")
            })
        })()
        .unwrap_or_else(Outcome::error),
    ));
    out.push((
        "schur_maximality",
        match schur::maximality_probe(
            &inst.a,
            &inst.s,
            &result,
            probe_seed,
            MAXIMALITY_SAMPLES,
            tol,
        ) {
            Ok(m) => Outcome::flag(
                m.violations == 0 && m.accepted >= MIN_ACCEPTED_MEMBERS,
                m.violations as f64,
                &format!("maximality probe: {m:?}"),
            ),
            Err(e) => Outcome::error(e),
        },
    ));
    let d = result.diagnostics;
    out.push((
        "schur_lemma_equality",
        Outcome::below(
            d.tt_lemma_gap.max(d.compression_lemma_gap),
            eq,
            "lemma expressions",
        ),
    ));
    out.push((
        "compression_domination",
        Outcome::flag(d.compression_dominated, 0.0, "A_S <= A fails"),
    ));

    let pek = schur::pekarev_from_blocks(rep, tol);
    out.push((
        "additive_decomposition",
        match pek
            .as_ref()
            .map_err(|e| e.to_string())
            .and_then(|p| schur::decomposition_from(&result, p, tol).map_err(|e| e.to_string()))
        {
            Ok(dec) => Outcome::flag(
                dec.verified,
                dec.sum_gap,
                &format!(
                    "dom condition {}, range condition {}, sum gap {:e}",
                    dec.dom_condition, dec.range_condition, dec.sum_gap
                ),
            ),
            Err(e) => Outcome::error(e),
        },
    ));
    out.push((
        "pekarev_equality",
        match &pek {
            Ok(p) => (|| -> Result<Outcome> {
                let g = p
                    .schur
                    .gap(&result.schur)?
                    .max(p.compression.gap(&result.compression)?);
                Ok(Outcome::below(g, eq, "Pekarev vs formula"))
            })()
            .unwrap_or_else(Outcome::error),
            Err(e) => Outcome::error(e),
        },
    ));
    out
}

/// The instance and random relation used by trial `index`.
pub fn trial_inputs(
    seed: u64,
    index: usize,
    max_dim: usize,
    tol: &Tolerances,
) -> Result<(Instance, LinearRelation, u64)> {
    let mut rng = generator::rng_from_seed(generator::derive_seed(seed, index as u64));
    let spec = generator::random_spec(&mut rng, max_dim);
    let inst = generator::generate(&spec, tol)?;
    let n = rng.random_range(1..=max_dim.max(1));
    let m = rng.random_range(1..=max_dim.max(1));
    let t = generator::random_relation(&mut rng, n, m, tol)?;
    Ok((inst, t, rng.random()))
}

pub fn run(config: &VerifyConfig) -> VerificationReport {
    let tol = config.tol;
    let per_trial: Vec<Vec<(String, Outcome, Value)>> = (0..config.trials)
        .into_par_iter()
        .map(
            |i| match trial_inputs(config.seed, i, config.max_dim, &tol) {
                Ok((inst, t, probe_seed)) => {
                    let outcomes = check_instance(&inst, &t, probe_seed, &tol);
                    let any_failed = outcomes.iter().any(|(_, o)| !o.passed);
                    let instance = if any_failed {
                        instance_json(&inst, &t, &tol)
                    } else {
                        Value::Null
                    };
                    outcomes
                        .into_iter()
                        .map(|(name, o)| (name.to_string(), o, instance.clone()))
                        .collect()
                }
                Err(e) => CHECKS
                    .iter()
                    .map(|name| (name.to_string(), Outcome::error(&e), Value::Null))
                    .collect(),
            },
        )
        .collect();

    let mut checks: BTreeMap<String, CheckStats> = CHECKS
        .iter()
        .map(|n| (n.to_string(), CheckStats::default()))
        .collect();
    let mut failures = Vec::new();
    for (trial, outcomes) in per_trial.into_iter().enumerate() {
        for (name, o, instance) in outcomes {
            let stats = checks.get_mut(&name).expect("known check name");
            if o.passed {
                stats.passed += 1;
            } else {
                stats.failed += 1;
                failures.push(Failure {
                    trial,
                    check: name,
                    detail: o.detail,
                    instance,
                });
            }
            if o.residual.is_finite() {
                stats.worst_residual = stats.worst_residual.max(o.residual);
            } else {
                stats.worst_residual = f64::MAX;
            }
        }
    }
    VerificationReport {
        seed: config.seed,
        trials: config.trials,
        max_dim: config.max_dim,
        checks,
        failures,
    }
}

/// Convenience for the bounded case: everywhere-defined PSD `A`.
pub fn bounded_oracle_gap(
    a: &kernel::ComplexMatrix,
    s: &crate::subspace::Subspace,
    tol: &Tolerances,
) -> Result<f64> {
    let rel = NonnegSelfAdjointRelation::from_psd_matrix(a, tol)?;
    let formula = schur::schur_complement(&rel, s, tol)?;
    let oracle = schur::anderson_trapp(a, s, tol)?;
    let diff = formula.schur.operator_full() - oracle;
    Ok(diff.iter().map(|z| z.norm()).fold(0.0, f64::max))
}
