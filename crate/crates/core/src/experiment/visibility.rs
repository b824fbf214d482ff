use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::counting::{simulate_counts, Count, CountingModel};
use super::fit::{fit_fringe, FringeFit};
use crate::elements::{hwp, ModeLayout};
use crate::error::{Error, Result};
use crate::fock::{Evolve, FockState, StateVector};
use crate::protocol::{
    meter_projector, meter_state, phi_for_gain, prepare_signal, run_nla, run_prepared,
    run_reference, signal_basis, GateKind, ProtocolConfig, SignalSpec, Truncated,
};

/// Source of the H:V bias ratio applied before the amplifier.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasCalibration {
    /// The requested `|g|²`.
    #[default]
    Nominal,
    /// The gain the simulated amplifier actually delivers at this input.
    Simulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VisibilityOptions {
    pub gate: GateKind,
    pub calibration: BiasCalibration,
    /// Overrides the calibrated H:V intensity ratio.
    pub bias_ratio: Option<f64>,
    pub counting: CountingModel,
    pub rate_scale: f64,
    pub protocol: ProtocolConfig,
}

impl Default for VisibilityOptions {
    fn default() -> Self {
        VisibilityOptions {
            gate: GateKind::Ppbs,
            calibration: BiasCalibration::Nominal,
            bias_ratio: None,
            counting: CountingModel::new(0, 0),
            rate_scale: 1.0,
            protocol: ProtocolConfig::default(),
        }
    }
}

/// A fringe measured behind the amplifier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FringeScan {
    pub gain_setting: f64,
    pub phi: f64,
    /// H:V intensity ratio prepared by the first half-wave plate.
    pub bias_ratio: f64,
    pub calibration: BiasCalibration,
    /// Magnitude of the vertical input amplitude.
    pub input_mag: f64,
    pub herald_probability: f64,
    pub phase_points: Vec<f64>,
    /// Probability of a herald together with one signal photon passing the
    /// analyser at each phase.
    pub rates: Vec<f64>,
    pub visibility_fit: FringeFit,
    pub sampled_counts: Option<Vec<Count>>,
    pub sampled_fit: Option<FringeFit>,
    pub classical_bound: Option<f64>,
    pub truncation_weight: f64,
}

/// Visibility ceiling `1/√g2` of a classical amplifier of intensity gain
/// `g2`.
pub fn classical_visibility_bound(g2: f64) -> Result<f64> {
    if !(g2 >= 1.0) || g2.is_infinite() {
        return Err(Error::invalid(
            "g2",
            g2,
            "classical bound needs a finite gain of at least 1",
        ));
    }
    Ok(1.0 / g2.sqrt())
}

/// Half-wave plate angle taking `|V>` to an H:V intensity ratio of `ratio`.
pub fn bias_hwp_angle(ratio: f64) -> f64 {
    ratio.sqrt().atan() / 2.0
}

/// `n` evenly spaced analyser phases over one period.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

fn analyser(theta: f64) -> StateVector {
    let basis = signal_basis(1).expect("one-photon signal basis");
    StateVector::from_terms(
        basis,
        &[
            (vec![1, 0], Complex64::new(FRAC_1_SQRT_2, 0.0)),
            (vec![0, 1], Complex64::from_polar(FRAC_1_SQRT_2, theta)),
        ],
    )
    .expect("analyser state fits the basis")
}

fn calibrated_ratio(nominal_g2: f64, input_mag: f64, opts: &VisibilityOptions) -> Result<f64> {
    if let Some(r) = opts.bias_ratio {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid(
                "bias_ratio",
                r,
                "must be finite and non-negative",
            ));
        }
        return Ok(r);
    }
    match opts.calibration {
        BiasCalibration::Nominal => Ok(nominal_g2),
        BiasCalibration::Simulated => {
            let spec = SignalSpec::coherent(Complex64::new(input_mag, 0.0));
            let meter = phi_for_gain(nominal_g2)?;
            let input = run_reference(&spec, opts.gate, &opts.protocol)?.state_size_out;
            let output = run_nla(&spec, &meter, opts.gate, &opts.protocol)?.state_size_out;
            match (output, input) {
                (Some(o), Some(i)) if i > 0.0 => Ok(o / i),
                _ => Err(Error::FitFailed("no measurable gain for calibration")),
            }
        }
    }
}

fn scan(
    nominal_g2: f64,
    input_mag: f64,
    phase_points: &[f64],
    opts: &VisibilityOptions,
    point: u64,
) -> Result<FringeScan> {
    if !(input_mag >= 0.0 && input_mag.is_finite()) {
        return Err(Error::invalid(
            "input_mag",
            input_mag,
            "must be finite and non-negative",
        ));
    }
    let meter = phi_for_gain(nominal_g2)?;
    let ratio = calibrated_ratio(nominal_g2, input_mag, opts)?;

    let cap = opts.protocol.photon_cap.max(1) - 1;
    let total = input_mag * (1.0 + ratio).sqrt();
    let prepared = prepare_signal(&SignalSpec::coherent(Complex64::new(total, 0.0)), cap)?;
    let basis = signal_basis(cap)?;
    let split = hwp(bias_hwp_angle(ratio), ModeLayout::standard().signal).lift(&basis)?;
    let biased = Truncated {
        state: prepared.state.evolve(&split)?,
        truncation_weight: prepared.truncation_weight,
    };
    let out = run_prepared(
        biased,
        &meter_state(meter.phi()),
        &meter_projector(),
        opts.gate,
        &opts.protocol,
    )?;

    let rates = match &out.conditional_state {
        Some(state) => phase_points
            .iter()
            .map(|&t| Ok(out.herald_probability * state.project(&analyser(t))?.probability))
            .collect::<Result<Vec<_>>>()?,
        None => vec![0.0; phase_points.len()],
    };
    let visibility_fit = fit_fringe(phase_points, &rates, None)?;

    let (sampled_counts, sampled_fit) = if opts.counting.is_sampling() {
        let counts = simulate_counts(&rates, opts.rate_scale, &opts.counting, point)?;
        let values: Vec<f64> = counts.iter().map(|c| c.count as f64).collect();
        let sigmas: Vec<f64> = counts.iter().map(|c| c.error.max(1.0)).collect();
        let fit = fit_fringe(phase_points, &values, Some(&sigmas)).ok();
        (Some(counts), fit)
    } else {
        (None, None)
    };

    Ok(FringeScan {
        gain_setting: nominal_g2,
        phi: meter.phi(),
        bias_ratio: ratio,
        calibration: opts.calibration,
        input_mag,
        herald_probability: out.herald_probability,
        phase_points: phase_points.to_vec(),
        rates,
        visibility_fit,
        sampled_counts,
        sampled_fit,
        classical_bound: classical_visibility_bound(nominal_g2).ok(),
        truncation_weight: out.truncation_weight,
    })
}

/// Prepare a coherent signal with H:V intensity `bias:1` (vertical magnitude
/// `input_mag`), amplify it, and fit the fringe seen through an analyser
/// `(|H> + e^{iϑ}|V>)/√2` over `phase_points`.
pub fn visibility_experiment(
    nominal_g2: f64,
    input_mag: f64,
    phase_points: &[f64],
    opts: &VisibilityOptions,
) -> Result<FringeScan> {
    scan(nominal_g2, input_mag, phase_points, opts, 0)
}

/// [`visibility_experiment`] for several gains; gain `i` samples from stream
/// `i` of the counting seed.
pub fn visibility_sweep(
    gains: &[f64],
    input_mag: f64,
    phase_points: &[f64],
    opts: &VisibilityOptions,
) -> Result<Vec<FringeScan>> {
    gains
        .par_iter()
        .enumerate()
        .map(|(i, &g2)| scan(g2, input_mag, phase_points, opts, i as u64))
        .collect()
}
