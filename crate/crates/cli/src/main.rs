//! `nla-weaksim`: run the amplifier simulations and write CSV, JSON or SVG.
//!
//! Exit codes: 0 on success, 1 on I/O failure, 2 on a configuration error,
//! 3 when a run hits a numerical flag (zero herald probability, infinite
//! gain, failed fit).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod grid;
mod run;
mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use nla_weaksim::experiment::BiasCalibration;
use nla_weaksim::fock::DEFAULT_MAX_BASIS_SIZE;
use nla_weaksim::protocol::{
    intensity_gain, phi_for_gain, DumpPorts, GateKind, ProtocolConfig, SignalShape,
};

use config::{parse_saved, CommandConfig, RunConfig};
use grid::parse_grid;
use run::{execute, render, Format};

#[derive(Parser)]
#[command(
    name = "nla-weaksim",
    version,
    about = "Heralded noiseless linear amplification by weak measurement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single heralded run with the closed-form predictions alongside (JSON).
    Protocol(ProtocolArgs),
    /// Output against input state size for fixed gain settings.
    GainSweep(GainSweepArgs),
    /// Measured gain against meter phase for fixed input sizes.
    GainVsPhi(GainVsPhiArgs),
    /// Fringe visibility behind the amplifier for several gains.
    Visibility(VisibilityArgs),
    /// Rerun a saved JSON report or config.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Gate {
    Ideal,
    Ppbs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Signal {
    Coherent,
    PhaseAveraged,
    QubitTruncated,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dumps {
    PostSelected,
    Traced,
}

#[derive(Clone, Copy, ValueEnum)]
enum Calibration {
    Nominal,
    Simulated,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; relative paths resolve against NLA_WEAKSIM_OUTPUT_DIR when
    /// set. Defaults to stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Directory for relative output paths.
    #[arg(long, env = "NLA_WEAKSIM_OUTPUT_DIR", hide_env_values = true)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CommonArgs {
    /// Controlled-Z implementation.
    #[arg(long, value_enum, default_value = "ppbs")]
    gate: Gate,
    /// Signal preparation.
    #[arg(long, value_enum, default_value = "coherent")]
    signal: Signal,
    /// Poisson trials per point (0 disables sampling).
    #[arg(long, default_value_t = 0)]
    shots: u64,
    /// Root seed for sampling (required with --shots > 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Expected events per trial (dimensionless multiplier on probabilities).
    #[arg(long, default_value_t = 1.0)]
    rate_scale: f64,
    /// Total photon cap of the joint signal and meter basis (photons).
    #[arg(long, default_value_t = 3)]
    cap: usize,
    /// Largest Fock basis allowed (states).
    #[arg(long, env = "NLA_WEAKSIM_MAX_BASIS", default_value_t = DEFAULT_MAX_BASIS_SIZE)]
    max_basis: usize,
    /// Truncation weight above which rows are flagged (probability).
    #[arg(long, default_value_t = 1e-3)]
    truncation_bound: f64,
    /// Treatment of light leaving the attenuating PPBS reflected ports.
    #[arg(long, value_enum, default_value = "post-selected")]
    dump_ports: Dumps,
}

#[derive(Args)]
struct ProtocolArgs {
    /// Nominal intensity gain |g|² (dimensionless).
    #[arg(long, conflicts_with = "phi", required_unless_present = "phi")]
    gain: Option<f64>,
    /// Meter phase φ (radians, or degrees with --degrees).
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Read --phi in degrees.
    #[arg(long)]
    degrees: bool,
    /// Input state size |α′|² (mean photon number).
    #[arg(long, default_value_t = 1e-4)]
    alpha2: f64,
    /// Signal loss at preparation (fraction in [0, 1]).
    #[arg(long, default_value_t = 0.0)]
    loss: f64,
    /// Output format (JSON only).
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct GainSweepArgs {
    /// Nominal intensity gains |g|², comma separated or a grid
    /// (default 3/√2, 3, 6).
    #[arg(long, conflicts_with = "phi")]
    gain: Option<String>,
    /// Meter phases instead of gains (radians, or degrees with --degrees).
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Read --phi in degrees.
    #[arg(long)]
    degrees: bool,
    /// Input state sizes |α′|²: `min:max:logN`, `min:max:linN` or a list.
    #[arg(long, default_value = "1e-5:1e-3:log12")]
    inputs: String,
    /// Heralding efficiency ε for the saturation model (fraction in (0, 1]).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct GainVsPhiArgs {
    /// Meter phases φ as a grid or list (radians, or degrees with --degrees).
    #[arg(long, conflicts_with = "gain", allow_hyphen_values = true)]
    phi: Option<String>,
    /// Nominal gains |g|² converted to phases instead of --phi.
    #[arg(long)]
    gain: Option<String>,
    /// Read --phi in degrees.
    #[arg(long)]
    degrees: bool,
    /// Input state sizes |α′|² (default 0.0006, 0.0012).
    #[arg(long, default_value = "0.0006,0.0012")]
    inputs: String,
    /// Heralding efficiency ε for the saturation model (fraction in (0, 1]).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VisibilityArgs {
    /// Nominal intensity gains |g|² (default 2, 3, 4, 5).
    #[arg(long, default_value = "2,3,4,5")]
    gain: String,
    /// Vertical input amplitude |α′| (square root of mean photon number).
    #[arg(long, default_value_t = 0.0015)]
    alpha: f64,
    /// Analyser phases per fringe (evenly spaced over 2π).
    #[arg(long, default_value_t = 16)]
    phase_points: usize,
    /// Where the H:V bias ratio comes from.
    #[arg(long, value_enum, default_value = "nominal")]
    calibration: Calibration,
    /// Fixed H:V intensity ratio, overriding --calibration (dimensionless).
    #[arg(long)]
    bias_ratio: Option<f64>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ReplayArgs {
    /// JSON report or config written by an earlier run.
    file: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    out: OutputArgs,
}

/// A failure together with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn config_error(error: anyhow::Error) -> Failure {
    if error.chain().any(|e| e.is::<std::io::Error>()) {
        return Failure { code: 1, error };
    }
    let code = match error.downcast_ref::<nla_weaksim::Error>() {
        Some(
            nla_weaksim::Error::InfiniteGain
            | nla_weaksim::Error::FitFailed(_)
            | nla_weaksim::Error::CountOverflow(_),
        ) => 3,
        _ => 2,
    };
    Failure { code, error }
}

impl CommonArgs {
    fn into_config(self, command: CommandConfig) -> RunConfig {
        RunConfig {
            command,
            gate: match self.gate {
                Gate::Ideal => GateKind::Ideal,
                Gate::Ppbs => GateKind::Ppbs,
            },
            signal: match self.signal {
                Signal::Coherent => SignalShape::Coherent,
                Signal::PhaseAveraged => SignalShape::PhaseAveraged,
                Signal::QubitTruncated => SignalShape::QubitTruncated,
            },
            shots: self.shots,
            seed: self.seed,
            rate_scale: self.rate_scale,
            protocol: ProtocolConfig {
                photon_cap: self.cap,
                max_basis_size: self.max_basis,
                truncation_bound: self.truncation_bound,
                dump_ports: match self.dump_ports {
                    Dumps::PostSelected => DumpPorts::PostSelected,
                    Dumps::Traced => DumpPorts::Traced,
                },
            },
        }
    }
}

fn angles(values: Vec<f64>, degrees: bool) -> Vec<f64> {
    if degrees {
        values.into_iter().map(f64::to_radians).collect()
    } else {
        values
    }
}

fn gains_to_phis(gains: &[f64]) -> Result<Vec<f64>> {
    Ok(gains
        .iter()
        .map(|&g| phi_for_gain(g).map(|m| m.phi()))
        .collect::<Result<_, _>>()?)
}

fn default_gains() -> Vec<f64> {
    vec![3.0 / 2f64.sqrt(), 3.0, 6.0]
}

fn default_phis() -> Vec<f64> {
    // from gain ≈ 64 down to unity gain
    (0..16)
        .map(|k| 0.25 + (std::f64::consts::FRAC_PI_2 - 0.25) * k as f64 / 15.0)
        .collect()
}

fn build(command: Command) -> Result<(RunConfig, Format, OutputArgs)> {
    Ok(match command {
        Command::Protocol(a) => {
            let phi = match (a.phi, a.gain) {
                (Some(p), _) => angles(vec![p], a.degrees)[0],
                (None, Some(g)) => phi_for_gain(g)?.phi(),
                (None, None) => bail!("one of --gain or --phi is required"),
            };
            let cmd = CommandConfig::Protocol {
                phi,
                alpha2: a.alpha2,
                loss: a.loss,
            };
            (a.common.into_config(cmd), a.format, a.out)
        }
        Command::GainSweep(a) => {
            let gains = match (a.gain, a.phi) {
                (Some(g), _) => parse_grid(&g)?,
                (None, Some(p)) => angles(parse_grid(&p)?, a.degrees)
                    .into_iter()
                    .map(intensity_gain)
                    .collect(),
                (None, None) => default_gains(),
            };
            let cmd = CommandConfig::GainSweep {
                gains,
                inputs: parse_grid(&a.inputs)?,
                epsilon: a.epsilon,
            };
            (a.common.into_config(cmd), a.format, a.out)
        }
        Command::GainVsPhi(a) => {
            let phis = match (a.phi, a.gain) {
                (Some(p), _) => angles(parse_grid(&p)?, a.degrees),
                (None, Some(g)) => gains_to_phis(&parse_grid(&g)?)?,
                (None, None) => default_phis(),
            };
            let cmd = CommandConfig::GainVsPhi {
                phis,
                inputs: parse_grid(&a.inputs)?,
                epsilon: a.epsilon,
            };
            (a.common.into_config(cmd), a.format, a.out)
        }
        Command::Visibility(a) => {
            let cmd = CommandConfig::Visibility {
                gains: parse_grid(&a.gain)?,
                alpha: a.alpha,
                phase_points: a.phase_points,
                calibration: match a.calibration {
                    Calibration::Nominal => BiasCalibration::Nominal,
                    Calibration::Simulated => BiasCalibration::Simulated,
                },
                bias_ratio: a.bias_ratio,
            };
            (a.common.into_config(cmd), a.format, a.out)
        }
        Command::Replay(a) => {
            let text = std::fs::read_to_string(&a.file)
                .with_context(|| format!("reading {}", a.file.display()))?;
            (parse_saved(&text)?, a.format, a.out)
        }
    })
}

fn resolve(out: &OutputArgs) -> Option<PathBuf> {
    let path = out.output.as_ref()?;
    Some(match &out.output_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.clone(),
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn main_inner() -> Result<u8, Failure> {
    let cli = Cli::parse();
    let (config, format, out) = build(cli.command).map_err(config_error)?;
    let result = execute(&config).map_err(config_error)?;
    let text = render(&config, &result, format).map_err(config_error)?;
    write_output(resolve(&out).as_deref(), &text).map_err(|error| Failure { code: 1, error })?;
    if result.flagged() {
        eprintln!("warning: run hit a numerical flag (zero herald probability or infinite gain)");
        return Ok(3);
    }
    Ok(0)
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
