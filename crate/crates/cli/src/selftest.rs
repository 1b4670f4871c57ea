//! Randomized consistency checks on freshly generated instances.

use rand::Rng;
use serde::Serialize;

use symcond::engine::{
    average_after, average_before, conditional_after, conditional_before_model, outcome_probabilities,
};
use symcond::jc::{jc_unitary_closed_form, JcModelSpec};
use symcond::linalg::{commutator, kron};
use symcond::quantum::{born_probability, induced_povm};
use symcond::random::{self, seeded};
use symcond::symmetry::{blockwise_conditional_values, decohere, verify_theorem1};
use symcond::ComplexMatrix;

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_VAR: &str = "SYMCOND_SEED";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestCheck {
    pub name: &'static str,
    pub instances: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<SelftestCheck>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &'static str, instances: usize, max_residual: f64, tolerance: f64) -> SelftestCheck {
    SelftestCheck {
        name,
        instances,
        max_residual,
        tolerance,
        passed: max_residual < tolerance,
    }
}

/// Seed from `SYMCOND_SEED`, or [`DEFAULT_SEED`] when unset.
pub fn seed_from_env() -> Result<u64, String> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_VAR}={s:?} is not an unsigned integer")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn selftest(seed: u64) -> SelftestReport {
    let mut rng = seeded(seed);
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (ds, da) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let model = random::model(ds, da, &mut rng);
        let povm = induced_povm(&model).expect("random model");
        for _ in 0..5 {
            let rho = random::state(ds, &mut rng);
            let probs = outcome_probabilities(&model, &rho).expect("dims match");
            for (effect, p) in povm.effects().iter().zip(probs) {
                worst = worst.max((born_probability(&rho, effect) - p).abs());
            }
        }
    }
    checks.push(check("probability_reproducibility", 100, worst, 1e-10));

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (ds, da) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let model = random::model(ds, da, &mut rng);
        let rho = random::state(ds, &mut rng);
        let obs = random::observable(ds, &mut rng);
        let before = average_before(&model, &rho, &obs).expect("dims match");
        worst = worst.max((before - obs.expectation(&rho)).abs());
        let joint = model
            .unitary()
            .matmul(&kron(rho.matrix(), model.apparatus_state().matrix()))
            .matmul(model.unitary_adjoint());
        let lifted = kron(obs.matrix(), &ComplexMatrix::identity(da));
        let after = average_after(&model, &rho, &obs).expect("dims match");
        worst = worst.max((after - lifted.trace_product(&joint).re).abs());
    }
    checks.push(check("average_identities", 20, worst, 1e-9));

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (ds, da) = (rng.gen_range(1..=3), rng.gen_range(2..=3));
        let inst = random::conserving_instance(ds, da, rng.gen_bool(0.5), &mut rng).expect("conserving instance");
        let obs = random::commuting_observable(&inst.conserved, &mut rng);
        let rho = random::commuting_state(&inst.conserved, &mut rng);
        let v = verify_theorem1(&inst.model, &rho, &obs, &inst.conserved, 1e-9).expect("dims match");
        let hypotheses = v.hypotheses.values().map(|c| c.residual).fold(0.0, f64::max);
        worst = worst.max(v.max_equality_residual()).max(hypotheses);
    }
    checks.push(check("theorem1", 20, worst, 1e-9));

    let mut worst: f64 = 0.0;
    let mut instances = 0;
    while instances < 10 {
        let (ds, da) = (rng.gen_range(1..=3), rng.gen_range(2..=3));
        let inst = random::conserving_instance(ds, da, rng.gen_bool(0.5), &mut rng).expect("conserving instance");
        let obs = random::commuting_observable(&inst.conserved, &mut rng);
        let rho = random::state(ds, &mut rng);
        for o in inst.model.outcomes() {
            let Ok(b) = blockwise_conditional_values(&inst.model, &rho, &obs, &inst.conserved, &o.label, 1e-9) else {
                continue;
            };
            let after = conditional_after(&inst.model, &rho, &obs, &o.label).expect("outcome has support");
            let before = conditional_before_model(&inst.model, &rho, &obs, &o.label).expect("outcome has support");
            worst = worst.max((b.after - after).abs()).max((b.before - before).abs());
        }
        instances += 1;
    }
    checks.push(check("blockwise_agreement", instances, worst, 1e-9));

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(1..=8);
        let l = random::integer_spectrum_operator(n, 3, rng.gen_bool(0.5), &mut rng);
        let rho = random::state(n, &mut rng);
        let out = decohere(rho.matrix(), &l).expect("dims match");
        let twice = decohere(&out, &l).expect("dims match");
        let min = out.min_eigenvalue(1e-8).unwrap_or(f64::NEG_INFINITY);
        worst = worst
            .max(twice.distance(&out))
            .max((out.trace() - rho.matrix().trace()).norm())
            .max(commutator(&out, l.matrix()).frobenius_norm())
            .max((-min).max(0.0));
    }
    checks.push(check("decoherence_algebra", 20, worst, 1e-10));

    let mut worst: f64 = 0.0;
    let mut instances = 0;
    for da in 2..=10 {
        for _ in 0..2 {
            let spec = JcModelSpec::new(2, da, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
            let closed = jc_unitary_closed_form(&spec).expect("qubit system");
            let exp = spec.unitary().expect("valid spec");
            worst = worst.max((&closed - &exp).max_abs());
            instances += 1;
        }
    }
    checks.push(check("jc_closed_form", instances, worst, 1e-10));

    SelftestReport { seed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_seed_passes_and_repeats() {
        let a = selftest(DEFAULT_SEED);
        assert!(a.passed(), "{a:?}");
        assert_eq!(a, selftest(DEFAULT_SEED));
    }
}
