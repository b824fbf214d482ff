mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use nla_weaksim::protocol::{
    amplitude_gain, analytic, intensity_gain, meter_horizontal, run_nla, run_reference,
    truncated_coherent, GateKind, MeterSetting, ProtocolConfig, SignalSpec,
};

use common::poisson;

fn coherent(mag: f64, theta: f64) -> SignalSpec {
    SignalSpec::coherent(Complex64::from_polar(mag, theta))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn outcome_ignores_input_phase(
        mag in 1e-3f64..0.1,
        theta in 0.0f64..(2.0 * PI),
        phi in 0.2f64..3.0,
        ppbs in any::<bool>(),
    ) {
        let gate = if ppbs { GateKind::Ppbs } else { GateKind::Ideal };
        let meter = MeterSetting::new(phi).unwrap();
        let config = ProtocolConfig::default();
        let a = run_nla(&coherent(mag, 0.0), &meter, gate, &config).unwrap();
        let b = run_nla(&coherent(mag, theta), &meter, gate, &config).unwrap();
        prop_assert!((a.herald_probability - b.herald_probability).abs() < 1e-12);
        prop_assert!((a.p1_out - b.p1_out).abs() < 1e-12);
        prop_assert!((a.p0_out - b.p0_out).abs() < 1e-12);
    }

    #[test]
    fn amplitude_ratio_follows_input_phase(mag in 1e-3f64..0.05, theta in 0.0f64..(2.0 * PI)) {
        let meter = MeterSetting::new(PI / 3.0).unwrap();
        let out = run_nla(&coherent(mag, theta), &meter, GateKind::Ideal, &ProtocolConfig::default())
            .unwrap();
        let r = out.amplitude_ratio.unwrap();
        let d = (r.arg() - amplitude_gain(PI / 3.0).arg() - theta).rem_euclid(2.0 * PI);
        prop_assert!(d.min(2.0 * PI - d) < 1e-9);
    }

    #[test]
    fn through_gate_gain_is_cot_squared(phi in 0.3f64..2.8, a2 in 1e-7f64..1e-3) {
        let meter = MeterSetting::new(phi).unwrap();
        let config = ProtocolConfig::default();
        let spec = SignalSpec::qubit_truncated(Complex64::new(a2.sqrt(), 0.0));
        for gate in [GateKind::Ideal, GateKind::Ppbs] {
            let out = run_nla(&spec, &meter, gate, &config).unwrap();
            let reference = run_reference(&spec, gate, &config).unwrap();
            let gain = out.state_size_out.unwrap() / reference.state_size_out.unwrap();
            let want = (1.0 / (phi / 2.0).tan()).powi(2);
            prop_assert!((gain / want - 1.0).abs() < 1e-9, "{gate}: {gain} vs {want}");
        }
    }

    #[test]
    fn nondeterministic_gate_scales_by_a_third(phi in 0.3f64..2.8, a2 in 1e-7f64..1e-3) {
        let meter = MeterSetting::new(phi).unwrap();
        let spec = SignalSpec::qubit_truncated(Complex64::new(a2.sqrt(), 0.0));
        let out = run_nla(&spec, &meter, GateKind::Ppbs, &ProtocolConfig::default()).unwrap();
        let ratio = out.state_size_out.unwrap() / out.state_size_in.unwrap();
        prop_assert!((ratio / (intensity_gain(phi) / 3.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn herald_probability_has_closed_form(phi in 0.3f64..2.8, a2 in 1e-7f64..1e-3) {
        let meter = MeterSetting::new(phi).unwrap();
        let spec = SignalSpec::qubit_truncated(Complex64::new(a2.sqrt(), 0.0));
        let config = ProtocolConfig::default();
        let want = analytic(&meter, a2.sqrt()).unwrap();
        let ppbs = run_nla(&spec, &meter, GateKind::Ppbs, &config).unwrap();
        let ideal = run_nla(&spec, &meter, GateKind::Ideal, &config).unwrap();
        prop_assert!((ppbs.herald_probability / want.p_success - 1.0).abs() < 1e-9);
        prop_assert!((ideal.herald_probability / want.p_success_ideal - 1.0).abs() < 1e-9);
    }
}

#[test]
fn phase_averaged_run_is_the_phase_average_of_coherent_runs() {
    let meter = MeterSetting::new(PI / 3.0).unwrap();
    let config = ProtocolConfig::default();
    for gate in [GateKind::Ideal, GateKind::Ppbs] {
        for mag in [0.01, 0.05, 0.2] {
            let mixed = run_nla(&SignalSpec::phase_averaged(mag), &meter, gate, &config).unwrap();
            // uniform nodes integrate e^{ikθ} exactly for |k| below the node count
            let k = 16;
            let (mut herald, mut p1, mut p0) = (0.0, 0.0, 0.0);
            for j in 0..k {
                let theta = 2.0 * PI * j as f64 / k as f64;
                let out = run_nla(&coherent(mag, theta), &meter, gate, &config).unwrap();
                herald += out.herald_probability / k as f64;
                p1 += out.herald_probability * out.p1_out / k as f64;
                p0 += out.herald_probability * out.p0_out / k as f64;
            }
            assert!((mixed.herald_probability - herald).abs() < 1e-9);
            assert!((mixed.p1_out - p1 / herald).abs() < 1e-9);
            assert!((mixed.p0_out - p0 / herald).abs() < 1e-9);
        }
    }
}

#[test]
fn reference_run_reads_a_third_of_the_input() {
    let config = ProtocolConfig::default();
    for a2 in [1e-6f64, 1e-5, 1e-4, 1e-3] {
        let spec = SignalSpec::qubit_truncated(Complex64::new(a2.sqrt(), 0.0));
        let ppbs = run_reference(&spec, GateKind::Ppbs, &config).unwrap();
        let ideal = run_reference(&spec, GateKind::Ideal, &config).unwrap();
        assert!((ppbs.state_size_out.unwrap() / (a2 / 3.0) - 1.0).abs() < 1e-9);
        assert!((ideal.state_size_out.unwrap() / a2 - 1.0).abs() < 1e-9);
    }
}

#[test]
fn tensor_truncation_matches_a_wider_construction() {
    // the meter photon leaves room for two signal photons under a joint cap of 3
    let wide = truncated_coherent(Complex64::new(0.1, 0.0), 6, 1.0)
        .unwrap()
        .state;
    let (joint, discarded) = wide.tensor(&meter_horizontal(), 3).unwrap();
    let kept: f64 = (0..=2).map(|n| poisson(0.01, n)).sum();
    let beyond: f64 = (3..=6).map(|n| poisson(0.01, n)).sum();
    assert!((discarded - beyond).abs() < 1e-18);
    assert!((joint.norm().powi(2) - kept).abs() < 1e-15);
    assert!(discarded < 2e-7 && discarded > 1e-7);
}
