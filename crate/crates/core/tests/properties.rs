use proptest::prelude::*;

use symcond::engine::{
    apply_instrument, average_after, average_before, conditional_after, conditional_before, conditional_before_model,
    outcome_probabilities, outcome_probability,
};
use symcond::jc::{jc_unitary_closed_form, JcModelSpec};
use symcond::linalg::{commutator, kron, partial_trace, Subsystem};
use symcond::quantum::{born_probability, induced_povm};
use symcond::random::{self, seeded};
use symcond::symmetry::{blockwise_conditional_values, decohere, verify_theorem1};
use symcond::{ComplexMatrix, C64};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn kron_mixed_product_and_trace(seed in any::<u64>(), m in 1usize..4, n in 1usize..4) {
        let mut rng = seeded(seed);
        let a = random::gaussian_matrix(m, m, &mut rng);
        let b = random::gaussian_matrix(n, n, &mut rng);
        let c = random::gaussian_matrix(m, m, &mut rng);
        let d = random::gaussian_matrix(n, n, &mut rng);
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        let rhs = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!(lhs.distance(&rhs) < 1e-10 * (1.0 + rhs.frobenius_norm()));
        let t = kron(&a, &b).trace() - a.trace() * b.trace();
        prop_assert!(t.norm() < 1e-10 * (1.0 + a.frobenius_norm() * b.frobenius_norm()));
    }

    #[test]
    fn kron_is_associative(seed in any::<u64>(), dims in (1usize..4, 1usize..4, 1usize..4)) {
        let mut rng = seeded(seed);
        let a = random::gaussian_matrix(dims.0, dims.0, &mut rng);
        let b = random::gaussian_matrix(dims.1, dims.1, &mut rng);
        let c = random::gaussian_matrix(dims.2, dims.2, &mut rng);
        prop_assert!(kron(&kron(&a, &b), &c).distance(&kron(&a, &kron(&b, &c))) < 1e-10);
    }

    #[test]
    fn partial_traces_of_products(seed in any::<u64>(), ds in 1usize..5, da in 1usize..5) {
        let mut rng = seeded(seed);
        let rho = random::density(ds, &mut rng);
        let sigma = random::density(da, &mut rng);
        let joint = kron(rho.matrix(), sigma.matrix());
        let sys = partial_trace(&joint, ds, da, Subsystem::Apparatus).unwrap();
        let app = partial_trace(&joint, ds, da, Subsystem::System).unwrap();
        prop_assert!(sys.distance(rho.matrix()) < 1e-12);
        prop_assert!(app.distance(sigma.matrix()) < 1e-12);
    }

    #[test]
    fn decoherence_algebra(seed in any::<u64>(), n in 1usize..9, levels in 1u32..4, rotate in any::<bool>()) {
        let mut rng = seeded(seed);
        let l = random::integer_spectrum_operator(n, levels, rotate, &mut rng);
        let rho = random::state(n, &mut rng);
        let out = decohere(rho.matrix(), &l).unwrap();
        prop_assert!(decohere(&out, &l).unwrap().distance(&out) < 1e-10);
        prop_assert!((out.trace() - rho.matrix().trace()).norm() < 1e-10);
        prop_assert!(out.min_eigenvalue(1e-8).unwrap() > -1e-10);
        prop_assert!(commutator(&out, l.matrix()).frobenius_norm() < 1e-10);
    }

    #[test]
    fn jc_unitary_is_a_one_parameter_group(seed in any::<u64>(), ds in 2usize..4, da in 2usize..5) {
        let mut rng = seeded(seed);
        use rand::Rng;
        let t1: f64 = rng.gen_range(-3.0..3.0);
        let t2: f64 = rng.gen_range(-3.0..3.0);
        let u1 = JcModelSpec::new(ds, da, t1).unitary().unwrap();
        let u2 = JcModelSpec::new(ds, da, t2).unitary().unwrap();
        let u12 = JcModelSpec::new(ds, da, t1 + t2).unitary().unwrap();
        prop_assert!(u1.matmul(&u2).distance(&u12) < 1e-10);
        prop_assert!(u1.is_unitary(1e-10));
    }

    #[test]
    fn closed_form_matches_exponential(theta in -6.0f64..6.0, da in 2usize..8) {
        let spec = JcModelSpec::new(2, da, theta);
        let closed = jc_unitary_closed_form(&spec).unwrap();
        let exp = spec.unitary().unwrap();
        prop_assert!(closed.distance(&exp) < 1e-10);
    }

    #[test]
    fn instrument_is_linear_and_complete(seed in any::<u64>(), ds in 1usize..4, da in 1usize..4) {
        let mut rng = seeded(seed);
        let model = random::model(ds, da, &mut rng);
        let a = random::gaussian_matrix(ds, ds, &mut rng);
        let b = random::gaussian_matrix(ds, ds, &mut rng);
        let (x, y) = (C64::new(0.3, -1.2), C64::new(-0.7, 0.4));
        let combo = &a.scale(x) + &b.scale(y);
        let rho = random::state(ds, &mut rng);
        let mut total = 0.0;
        for o in model.outcomes() {
            let lhs = apply_instrument(&model, &combo, &o.label).unwrap();
            let rhs = &apply_instrument(&model, &a, &o.label).unwrap().scale(x)
                + &apply_instrument(&model, &b, &o.label).unwrap().scale(y);
            prop_assert!(lhs.distance(&rhs) < 1e-10 * (1.0 + rhs.frobenius_norm()));
            let post = apply_instrument(&model, rho.matrix(), &o.label).unwrap();
            prop_assert!(post.min_eigenvalue(1e-8).unwrap() > -1e-10);
            total += post.trace().re;
        }
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn povm_and_instrument_agree(seed in any::<u64>(), ds in 1usize..5, da in 1usize..5) {
        let mut rng = seeded(seed);
        let model = random::model(ds, da, &mut rng);
        let povm = induced_povm(&model).unwrap();
        let rho = random::state(ds, &mut rng);
        let obs = random::observable(ds, &mut rng);
        let probs = outcome_probabilities(&model, &rho).unwrap();
        for (o, p) in model.outcomes().iter().zip(probs) {
            let effect = povm.effect(&o.label).unwrap();
            prop_assert!((born_probability(&rho, effect) - p).abs() < 1e-10);
            if p > 1e-6 {
                let via_povm = conditional_before(&povm, &rho, &obs, &o.label).unwrap();
                let via_model = conditional_before_model(&model, &rho, &obs, &o.label).unwrap();
                prop_assert!((via_povm - via_model).abs() * p < 1e-10);
            }
        }
    }

    #[test]
    fn averages_recover_unconditioned_values(seed in any::<u64>(), ds in 1usize..4, da in 1usize..4) {
        let mut rng = seeded(seed);
        let model = random::model(ds, da, &mut rng);
        let rho = random::state(ds, &mut rng);
        let obs = random::observable(ds, &mut rng);
        let before = average_before(&model, &rho, &obs).unwrap();
        prop_assert!((before - obs.expectation(&rho)).abs() < 1e-9);
        let joint = model.unitary().matmul(&kron(rho.matrix(), model.apparatus_state().matrix())).matmul(model.unitary_adjoint());
        let lifted = kron(obs.matrix(), &ComplexMatrix::identity(da));
        let after = average_after(&model, &rho, &obs).unwrap();
        prop_assert!((after - lifted.trace_product(&joint).re).abs() < 1e-9);
    }

    #[test]
    fn conserving_models_satisfy_theorem1(seed in any::<u64>(), ds in 1usize..4, da in 2usize..4, rotate in any::<bool>()) {
        let mut rng = seeded(seed);
        let inst = random::conserving_instance(ds, da, rotate, &mut rng).unwrap();
        let obs = random::commuting_observable(&inst.conserved, &mut rng);
        let rho = random::commuting_state(&inst.conserved, &mut rng);
        let verdict = verify_theorem1(&inst.model, &rho, &obs, &inst.conserved, 1e-9).unwrap();
        prop_assert!(verdict.hypotheses_held(), "{:?}", verdict.hypotheses);
        prop_assert!(verdict.equalities_held(), "max residual {}", verdict.max_equality_residual());
    }

    #[test]
    fn blockwise_path_matches_direct(seed in any::<u64>(), ds in 1usize..4, da in 2usize..4, rotate in any::<bool>()) {
        let mut rng = seeded(seed);
        let inst = random::conserving_instance(ds, da, rotate, &mut rng).unwrap();
        let obs = random::commuting_observable(&inst.conserved, &mut rng);
        let rho = random::state(ds, &mut rng);
        for o in inst.model.outcomes() {
            let p = outcome_probability(&inst.model, &rho, &o.label).unwrap();
            if p <= 1e-6 {
                continue;
            }
            let b = blockwise_conditional_values(&inst.model, &rho, &obs, &inst.conserved, &o.label, 1e-9).unwrap();
            prop_assert!((b.probability - p).abs() < 1e-10);
            prop_assert!((b.after - conditional_after(&inst.model, &rho, &obs, &o.label).unwrap()).abs() < 1e-9);
            prop_assert!((b.before - conditional_before_model(&inst.model, &rho, &obs, &o.label).unwrap()).abs() < 1e-9);
        }
    }
}
