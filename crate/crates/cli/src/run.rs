use anyhow::Result;
use serde::Serialize;

use nla_weaksim::elements::LossSpec;
use nla_weaksim::experiment::{
    gain_sweep, gain_vs_phi, phase_grid, visibility_sweep, CountingModel, FringeScan, GainSweep,
    GainVsPhi, HeraldingModel, SweepOptions, VisibilityOptions,
};
use nla_weaksim::protocol::{
    analytic, run_nla, run_reference, AnalyticPrediction, GateKind, MeterSetting, ProtocolOutcome,
    SignalSpec,
};
use nla_weaksim::report::{gain_sweep_table, gain_vs_phi_table, json_envelope, visibility_table};

use crate::config::{CommandConfig, RunConfig};
use crate::svg;

/// Output of `protocol`: the simulated run next to its closed forms.
#[derive(Debug, Serialize)]
pub struct ProtocolReport {
    pub phi: f64,
    /// Output size over the input size measured through the gate.
    pub gain: Option<f64>,
    /// Output size over the prepared input size.
    pub gain_true: Option<f64>,
    pub input_measured: Option<f64>,
    pub herald_probability: f64,
    /// Closed-form herald probability for the chosen gate.
    pub herald_probability_analytic: Option<f64>,
    pub analytic: Option<AnalyticPrediction>,
    pub outcome: ProtocolOutcome,
    pub flags: Vec<&'static str>,
}

#[derive(Debug)]
pub enum RunResult {
    Protocol(Box<ProtocolReport>),
    GainSweep(Vec<GainSweep>),
    GainVsPhi(Vec<GainVsPhi>),
    Visibility(Vec<FringeScan>),
}

impl RunResult {
    /// Whether any point hit a numerical flag (zero herald, infinite gain).
    pub fn flagged(&self) -> bool {
        match self {
            RunResult::Protocol(r) => !r.flags.is_empty(),
            RunResult::GainSweep(s) => s
                .iter()
                .flat_map(|s| &s.rows)
                .any(|r| r.herald_probability == 0.0),
            RunResult::GainVsPhi(s) => s.iter().flat_map(|s| &s.rows).any(|r| r.zero_herald),
            RunResult::Visibility(_) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

fn counting(config: &RunConfig) -> CountingModel {
    CountingModel::new(config.shots, config.seed.unwrap_or(0))
}

fn herald(epsilon: Option<f64>) -> Result<Option<HeraldingModel>> {
    Ok(epsilon.map(HeraldingModel::new).transpose()?)
}

pub fn execute(config: &RunConfig) -> Result<RunResult> {
    config.validate()?;
    let sweep_opts = |epsilon| -> Result<SweepOptions> {
        Ok(SweepOptions {
            gate: config.gate,
            shape: config.signal,
            herald_model: herald(epsilon)?,
            counting: counting(config),
            rate_scale: config.rate_scale,
            protocol: config.protocol,
        })
    };
    Ok(match &config.command {
        CommandConfig::Protocol { phi, alpha2, loss } => {
            RunResult::Protocol(Box::new(protocol(config, *phi, *alpha2, *loss)?))
        }
        CommandConfig::GainSweep {
            gains,
            inputs,
            epsilon,
        } => {
            let opts = sweep_opts(*epsilon)?;
            RunResult::GainSweep(
                gains
                    .iter()
                    .map(|&g| gain_sweep(g, inputs, &opts))
                    .collect::<Result<_, _>>()?,
            )
        }
        CommandConfig::GainVsPhi {
            phis,
            inputs,
            epsilon,
        } => {
            let opts = sweep_opts(*epsilon)?;
            RunResult::GainVsPhi(
                inputs
                    .iter()
                    .map(|&size| gain_vs_phi(size, phis, &opts))
                    .collect::<Result<_, _>>()?,
            )
        }
        CommandConfig::Visibility {
            gains,
            alpha,
            phase_points,
            calibration,
            bias_ratio,
        } => {
            let opts = VisibilityOptions {
                gate: config.gate,
                calibration: *calibration,
                bias_ratio: *bias_ratio,
                counting: counting(config),
                rate_scale: config.rate_scale,
                protocol: config.protocol,
            };
            RunResult::Visibility(visibility_sweep(
                gains,
                *alpha,
                &phase_grid(*phase_points),
                &opts,
            )?)
        }
    })
}

fn protocol(config: &RunConfig, phi: f64, alpha2: f64, loss: f64) -> Result<ProtocolReport> {
    let meter = MeterSetting::new(phi)?;
    let signal = SignalSpec::from_size(config.signal, alpha2)?.with_loss(LossSpec::new(loss)?);
    let outcome = run_nla(&signal, &meter, config.gate, &config.protocol)?;
    let input_measured = run_reference(&signal, config.gate, &config.protocol)?.state_size_out;
    let ratio = |den: Option<f64>| {
        outcome
            .state_size_out
            .zip(den.filter(|&d| d > 0.0))
            .map(|(o, i)| o / i)
    };

    let mut flags = Vec::new();
    if meter.is_infinite_gain() {
        flags.push("infinite_gain");
    }
    if !outcome.heralded() {
        flags.push("zero_herald");
    }
    let prediction = analytic(&meter, (alpha2 * (1.0 - loss)).sqrt()).ok();
    let herald_probability_analytic = prediction.map(|a| match config.gate {
        GateKind::Ideal => a.p_success_ideal,
        GateKind::Ppbs => a.p_success,
    });
    Ok(ProtocolReport {
        phi: meter.phi(),
        gain: ratio(input_measured),
        gain_true: ratio(outcome.state_size_in),
        input_measured,
        herald_probability: outcome.herald_probability,
        herald_probability_analytic,
        analytic: prediction,
        outcome,
        flags,
    })
}

/// Render `result` in `format`. `protocol` supports JSON only.
pub fn render(config: &RunConfig, result: &RunResult, format: Format) -> Result<String> {
    let name = config.command.name();
    Ok(match (result, format) {
        (RunResult::Protocol(r), Format::Json) => json_envelope(name, config, r)?,
        (RunResult::Protocol(_), _) => anyhow::bail!("`protocol` writes JSON only"),
        (RunResult::GainSweep(s), Format::Json) => json_envelope(name, config, s)?,
        (RunResult::GainSweep(s), Format::Csv) => gain_sweep_table(s)?.to_csv(),
        (RunResult::GainSweep(s), Format::Svg) => svg::gain_sweep(s),
        (RunResult::GainVsPhi(s), Format::Json) => json_envelope(name, config, s)?,
        (RunResult::GainVsPhi(s), Format::Csv) => gain_vs_phi_table(s)?.to_csv(),
        (RunResult::GainVsPhi(s), Format::Svg) => svg::gain_vs_phi(s),
        (RunResult::Visibility(s), Format::Json) => json_envelope(name, config, s)?,
        (RunResult::Visibility(s), Format::Csv) => visibility_table(s)?.to_csv(),
        (RunResult::Visibility(s), Format::Svg) => svg::visibility(s),
    })
}
