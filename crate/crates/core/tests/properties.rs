use proptest::prelude::*;

use sirlab::asymptotics::{box_counting_dimension, dyadic_schedule, threshold_report, Verdict};
use sirlab::dynamics::{incidence, Integrator, ModelParams, SimOptions, SolverConfig, SolverKind, StateField};
use sirlab::randomness::{mean_value_m, NoiseSpec, Profile, RandomEnvironment};
use sirlab::spatial::{build_grid, first_eigenpair, DiffusionOperator, SpectralData};

fn nonneg(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..10.0f64, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incidence_is_bounded_by_both_classes(s in nonneg(12), i in nonneg(12), r in nonneg(12)) {
        let f = incidence(&s, &i, &r).unwrap();
        for k in 0..12 {
            prop_assert!(f[k] >= 0.0);
            prop_assert!(f[k] <= s[k].min(i[k]) * (1.0 + 1e-15));
        }
    }

    #[test]
    fn operator_is_symmetric_and_coercive(
        a in prop::collection::vec(0.5..2.0f64, 8),
        x in prop::collection::vec(-1.0..1.0f64, 15),
        y in prop::collection::vec(-1.0..1.0f64, 15),
    ) {
        let g = build_grid(1, &[1.0], &[15]).unwrap();
        let op = DiffusionOperator::from_coefficient(&g, None, |p| {
            let k = ((p[0] * 8.0) as usize).min(7);
            a[k]
        });
        let ax = op.apply(&x);
        let ay = op.apply(&y);
        let xy = g.dot(&ax, &y);
        let yx = g.dot(&x, &ay);
        prop_assert!((xy - yx).abs() <= 1e-10 * (1.0 + xy.abs()));
        let lambda1 = first_eigenpair(&g).unwrap().lambda1;
        let amin = a.iter().copied().fold(f64::INFINITY, f64::min);
        let energy = -g.dot(&ax, &x);
        prop_assert!(energy >= amin * lambda1 * g.dot(&x, &x) * (1.0 - 1e-10));
    }

    #[test]
    fn verdict_is_monotone_in_m(m1 in 0.0..40.0f64, m2 in 0.0..40.0f64, a0 in 0.2..1.0f64, spread in 0.0..1.0f64) {
        let p = ModelParams::new(1.0, 0.1, 0.05, 0.2).unwrap();
        let spectral = SpectralData { lambda1: 9.87, v1: vec![], lambda0: a0 * 9.87 };
        let rank = |v: Verdict| match v {
            Verdict::EradicationPredicted => 0,
            Verdict::Gap => 1,
            Verdict::PersistencePredicted => 2,
        };
        let (lo, hi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
        let a1 = a0 + spread;
        let v_lo = threshold_report(&p, &spectral, a0, a1, lo).verdict;
        let v_hi = threshold_report(&p, &spectral, a0, a1, hi).verdict;
        prop_assert!(rank(v_lo) <= rank(v_hi));
    }

    #[test]
    fn box_dimension_ignores_translation(shift in -3.0..3.0f64) {
        let line: Vec<Vec<f64>> = (0..=2000).map(|k| vec![k as f64 / 2000.0, 0.0]).collect();
        let moved: Vec<Vec<f64>> = line.iter().map(|p| vec![p[0] + shift, p[1] + shift]).collect();
        let eps = dyadic_schedule(2, 6);
        let a = box_counting_dimension(&line, &eps).unwrap().slope;
        let b = box_counting_dimension(&moved, &eps).unwrap().slope;
        prop_assert!((a - b).abs() < 0.15);
    }

    #[test]
    fn mean_value_of_constant_transmission_is_exact(g0 in 0.0..20.0f64) {
        let env = RandomEnvironment::sample(&NoiseSpec {
            seed: 1, dt: 0.01, t_lo: -0.5, t_hi: 30.0, kappa: 1.0, sigma: 0.0, phi0: 0.0,
            gamma0: g0, gamma_max: 2.0 * g0, a0: 1.0, a1: 1.0, profile: Profile::Uniform,
        }).unwrap();
        let m = mean_value_m(&env.gamma, 0.0, &[5.0, 10.0]).unwrap();
        prop_assert!((m.value - g0).abs() <= 1e-12 * (1.0 + g0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Any non-negative start stays non-negative and the components always
    /// sum to the linear total-population run.
    #[test]
    fn positivity_and_decoupling(
        s in nonneg(19), i in nonneg(19), r in nonneg(19),
        seed in 0u64..1000, g0 in 0.0..30.0f64, cg in any::<bool>(),
    ) {
        let g = build_grid(1, &[1.0], &[19]).unwrap();
        let env = RandomEnvironment::sample(&NoiseSpec {
            seed, dt: 1e-3, t_lo: -0.1, t_hi: 0.6, kappa: 2.0, sigma: 1.0, phi0: 0.0,
            gamma0: g0, gamma_max: 2.0 * g0 + 1.0, a0: 0.5, a1: 2.0, profile: Profile::Bump,
        }).unwrap();
        let p = ModelParams::new(3.0, 0.2, 0.1, 0.3).unwrap();
        let solver = SolverConfig { kind: if cg { SolverKind::Cg } else { SolverKind::Direct }, ..SolverConfig::default() };
        let it = Integrator::new(&g, p, &env, 2e-3, solver).unwrap();
        let u0 = StateField::new(s, i, r).unwrap();
        let opts = SimOptions { record_every: 10, snapshot_times: vec![], track_total: true };
        let traj = it.simulate(&u0, 0.0, 0.5, &opts).unwrap();
        prop_assert!(traj.final_state.check_non_negative().is_ok());
        let worst = traj.sum_defect.iter().copied().fold(0.0, f64::max);
        prop_assert!(worst <= 1e-8, "sum defect {}", worst);
    }
}
