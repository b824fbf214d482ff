use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::counting::{gain_from_counts, simulate_counts, CountingModel};
use super::measure::HeraldingModel;
use crate::error::Result;
use crate::protocol::{
    intensity_gain, phi_for_gain, run_nla, run_reference, GateKind, MeterSetting, ProtocolConfig,
    ProtocolOutcome, SignalShape, SignalSpec,
};

/// Settings shared by the gain sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepOptions {
    pub gate: GateKind,
    pub shape: SignalShape,
    pub herald_model: Option<HeraldingModel>,
    pub counting: CountingModel,
    /// Expected trials per shot that produce a herald-eligible event.
    pub rate_scale: f64,
    pub protocol: ProtocolConfig,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            gate: GateKind::Ppbs,
            shape: SignalShape::Coherent,
            herald_model: None,
            counting: CountingModel::new(0, 0),
            rate_scale: 1.0,
            protocol: ProtocolConfig::default(),
        }
    }
}

/// Sampled input and output sizes, `C/H` with Poisson errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampledPoint {
    pub input: Option<f64>,
    pub input_error: Option<f64>,
    pub output: Option<f64>,
    pub output_error: Option<f64>,
    pub gain: Option<f64>,
    pub gain_error: Option<f64>,
}

/// Both runs behind one sweep point.
struct PointRuns {
    reference: ProtocolOutcome,
    heralded: ProtocolOutcome,
}

fn run_point(size: f64, meter: &MeterSetting, opts: &SweepOptions) -> Result<PointRuns> {
    let signal = SignalSpec::from_size(opts.shape, size)?;
    Ok(PointRuns {
        reference: run_reference(&signal, opts.gate, &opts.protocol)?,
        heralded: run_nla(&signal, meter, opts.gate, &opts.protocol)?,
    })
}

fn sample_point(runs: &PointRuns, opts: &SweepOptions, index: u64) -> Result<Option<SampledPoint>> {
    if !opts.counting.is_sampling() {
        return Ok(None);
    }
    let (r, h) = (&runs.reference, &runs.heralded);
    let p1_out = match opts.herald_model {
        Some(m) => m.apply(h.p1_out),
        None => h.p1_out,
    };
    let counts = simulate_counts(
        &[
            r.herald_probability * r.p1_out,
            r.herald_probability,
            h.herald_probability * p1_out,
            h.herald_probability,
        ],
        opts.rate_scale,
        &opts.counting,
        index,
    )?;
    let ratio = |c: usize, h: usize| super::counting::count_ratio(&counts[c], &counts[h]);
    let (input, input_error) = ratio(0, 1).unzip();
    let (output, output_error) = ratio(2, 3).unzip();
    let (gain, gain_error) =
        gain_from_counts(&counts[2], &counts[3], &counts[0], &counts[1]).unzip();
    Ok(Some(SampledPoint {
        input,
        input_error,
        output,
        output_error,
        gain,
        gain_error,
    }))
}

/// One input size of a gain sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainSweepRow {
    /// Prepared `|α′|²`.
    pub input_size: f64,
    /// Input size measured through the gate.
    pub input_measured: f64,
    /// Heralded output size `P(1)/P(0)`.
    pub output_ideal: f64,
    /// Output after the heralding-efficiency model.
    pub output_model: Option<f64>,
    /// Nominal gain times the measured input.
    pub output_analytic: f64,
    pub herald_probability: f64,
    pub truncation_weight: f64,
    pub truncation_exceeded: bool,
    pub sampled: Option<SampledPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainSweep {
    pub nominal_g2: f64,
    pub phi: f64,
    pub options: SweepOptions,
    pub rows: Vec<GainSweepRow>,
}

/// Output against input state size at the meter setting for `nominal_g2`.
pub fn gain_sweep(nominal_g2: f64, input_sizes: &[f64], opts: &SweepOptions) -> Result<GainSweep> {
    let meter = phi_for_gain(nominal_g2)?;
    let rows = input_sizes
        .par_iter()
        .enumerate()
        .map(|(i, &size)| {
            let runs = run_point(size, &meter, opts)?;
            let (r, h) = (&runs.reference, &runs.heralded);
            let input_measured = r.state_size_out.unwrap_or(0.0);
            let output_ideal = h.state_size_out.unwrap_or(0.0);
            let truncation_weight = r.truncation_weight.max(h.truncation_weight);
            Ok(GainSweepRow {
                input_size: size,
                input_measured,
                output_ideal,
                output_model: opts.herald_model.map(|m| m.apply(output_ideal)),
                output_analytic: nominal_g2 * input_measured,
                herald_probability: h.herald_probability,
                truncation_weight,
                truncation_exceeded: truncation_weight > opts.protocol.truncation_bound,
                sampled: sample_point(&runs, opts, i as u64)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GainSweep {
        nominal_g2,
        phi: meter.phi(),
        options: *opts,
        rows,
    })
}

/// One meter setting of a gain-versus-phase sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainVsPhiRow {
    pub phi: f64,
    /// `cot²(φ/2)`.
    pub gain_ideal: f64,
    /// Output size over through-gate input size.
    pub gain_measured: Option<f64>,
    /// The same with the heralding-efficiency model applied to the output.
    pub gain_model: Option<f64>,
    pub herald_probability: f64,
    pub zero_herald: bool,
    pub truncation_weight: f64,
    pub sampled: Option<SampledPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainVsPhi {
    pub input_size: f64,
    pub options: SweepOptions,
    pub rows: Vec<GainVsPhiRow>,
}

/// Measured gain across meter phases at a fixed input size.
pub fn gain_vs_phi(input_size: f64, phis: &[f64], opts: &SweepOptions) -> Result<GainVsPhi> {
    let rows = phis
        .par_iter()
        .enumerate()
        .map(|(i, &phi)| {
            let meter = MeterSetting::new(phi)?;
            let runs = run_point(input_size, &meter, opts)?;
            let (r, h) = (&runs.reference, &runs.heralded);
            let input = r.state_size_out.filter(|&s| s > 0.0);
            let gain_measured = h.state_size_out.zip(input).map(|(o, i)| o / i);
            let gain_model = match (opts.herald_model, h.state_size_out, input) {
                (Some(m), Some(o), Some(i)) => Some(m.apply(o) / i),
                _ => None,
            };
            Ok(GainVsPhiRow {
                phi: meter.phi(),
                gain_ideal: intensity_gain(meter.phi()),
                gain_measured,
                gain_model,
                herald_probability: h.herald_probability,
                zero_herald: h.state_size_out.is_none(),
                truncation_weight: r.truncation_weight.max(h.truncation_weight),
                sampled: sample_point(&runs, opts, i as u64)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GainVsPhi {
        input_size,
        options: *opts,
        rows,
    })
}
