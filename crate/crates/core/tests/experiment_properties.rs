use std::f64::consts::PI;

use proptest::prelude::*;

use nla_weaksim::experiment::{
    fit_fringe, gain_sweep, gain_vs_phi, linear_fit, phase_grid, visibility_experiment,
    CountingModel, HeraldingModel, SweepOptions, VisibilityOptions,
};
use nla_weaksim::protocol::GateKind;

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[test]
fn output_is_linear_in_input_with_nominal_slope() {
    let inputs = log_grid(1e-5, 1e-3, 12);
    for g2 in [3.0 / 2f64.sqrt(), 3.0, 6.0] {
        for gate in [GateKind::Ideal, GateKind::Ppbs] {
            let opts = SweepOptions {
                gate,
                ..Default::default()
            };
            let sweep = gain_sweep(g2, &inputs, &opts).unwrap();
            let x: Vec<f64> = sweep.rows.iter().map(|r| r.input_measured).collect();
            let y: Vec<f64> = sweep.rows.iter().map(|r| r.output_ideal).collect();
            let fit = linear_fit(&x, &y).unwrap();
            assert!(
                (fit.slope / g2 - 1.0).abs() < 0.01,
                "{gate} {g2}: {}",
                fit.slope
            );
            assert!(fit.r_squared > 0.9999);
        }
    }
}

#[test]
fn herald_model_saturates_below_epsilon() {
    let model = HeraldingModel::new(0.35).unwrap();
    let mut last = 0.0;
    for p in log_grid(1e-6, 1e3, 200) {
        let m = model.apply(p);
        assert!(m > last && m <= 0.35);
        if p < 0.01 * 0.35 {
            assert!((m / p - 1.0).abs() < 0.01);
        }
        last = m;
    }
    assert!((model.apply(0.35) - 0.175).abs() < 1e-15);
}

#[test]
fn herald_model_at_unit_efficiency() {
    let model = HeraldingModel::new(1.0).unwrap();
    // p/(1+p) departs from p by exactly p²/(1+p)
    for p in log_grid(1e-8, 1e-2, 50) {
        let dev = p - model.apply(p);
        assert!((dev - p * p / (1.0 + p)).abs() < 1e-18);
        if p <= 3e-5 {
            assert!(dev < 1e-9);
        }
    }
}

#[test]
fn gain_error_grows_towards_zero_phase() {
    let opts = SweepOptions {
        counting: CountingModel::new(1_000_000, 7),
        rate_scale: 1e4,
        ..Default::default()
    };
    let phis = [PI / 2.0, 1.2, 0.9, 0.6, 0.4, 0.25, 0.15];
    let out = gain_vs_phi(6e-4, &phis, &opts).unwrap();
    let errors: Vec<f64> = out
        .rows
        .iter()
        .map(|r| r.sampled.unwrap().gain_error.unwrap())
        .collect();
    for w in errors.windows(2) {
        assert!(w[1] > w[0], "{errors:?}");
    }
}

#[test]
fn sampling_does_not_depend_on_grid_position() {
    let opts = SweepOptions {
        counting: CountingModel::new(1_000_000, 3),
        rate_scale: 1e3,
        ..Default::default()
    };
    let a = gain_sweep(3.0, &[1e-4, 5e-4], &opts).unwrap();
    let b = gain_sweep(3.0, &[1e-4, 5e-4], &opts).unwrap();
    assert_eq!(a, b);
    let c = gain_sweep(3.0, &[1e-4, 7e-4], &opts).unwrap();
    assert_eq!(a.rows[0], c.rows[0]);
}

#[test]
fn simulated_fringes_are_non_negative() {
    for gate in [GateKind::Ideal, GateKind::Ppbs] {
        let opts = VisibilityOptions {
            gate,
            bias_ratio: Some(0.3),
            ..Default::default()
        };
        let scan = visibility_experiment(3.0, 0.0015, &phase_grid(24), &opts).unwrap();
        assert!(scan.rates.iter().all(|&r| r >= 0.0));
        let v = scan.visibility_fit.visibility;
        assert!(v > 0.0 && v < 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fit_recovers_injected_visibility(
        seed in any::<u64>(),
        v_index in 0usize..4,
        phase in 0.0f64..(2.0 * PI),
    ) {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Poisson};
        let v = [0.2, 0.5, 0.8, 1.0][v_index];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let grid = phase_grid(24);
        let mean = 20_000.0;
        let counts: Vec<f64> = grid
            .iter()
            .map(|t| {
                let lambda = mean * (1.0 + v * (t - phase).cos());
                if lambda > 0.0 { Poisson::new(lambda).unwrap().sample(&mut rng) } else { 0.0 }
            })
            .collect();
        let sigmas: Vec<f64> = counts.iter().map(|c| c.sqrt().max(1.0)).collect();
        let fit = fit_fringe(&grid, &counts, Some(&sigmas)).unwrap();
        let err = fit.uncertainty.unwrap();
        prop_assert!((fit.visibility - v).abs() < 4.0 * err, "{} vs {v} ± {err}", fit.visibility);
    }

    #[test]
    fn fit_is_exact_on_noiseless_fringes(v in 0.01f64..1.0, phase in 0.0f64..(2.0 * PI)) {
        let grid = phase_grid(12);
        let rates: Vec<f64> = grid.iter().map(|t| 3e-7 * (1.0 + v * (t - phase).cos())).collect();
        let fit = fit_fringe(&grid, &rates, None).unwrap();
        prop_assert!((fit.visibility - v).abs() < 1e-9);
    }
}
