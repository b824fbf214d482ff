use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use nla_weaksim::experiment::BiasCalibration;
use nla_weaksim::protocol::{GateKind, ProtocolConfig, SignalShape};

/// Everything that determines a run's numbers. Output location and format
/// are not part of it, so a saved config can be replayed into any format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: CommandConfig,
    pub gate: GateKind,
    pub signal: SignalShape,
    pub shots: u64,
    pub seed: Option<u64>,
    pub rate_scale: f64,
    pub protocol: ProtocolConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandConfig {
    Protocol {
        /// Meter phase in radians.
        phi: f64,
        /// Input state size `|α′|²`.
        alpha2: f64,
        /// Loss applied to the signal at preparation.
        loss: f64,
    },
    GainSweep {
        gains: Vec<f64>,
        inputs: Vec<f64>,
        epsilon: Option<f64>,
    },
    GainVsPhi {
        phis: Vec<f64>,
        inputs: Vec<f64>,
        epsilon: Option<f64>,
    },
    Visibility {
        gains: Vec<f64>,
        /// Vertical input amplitude `|α′|`.
        alpha: f64,
        phase_points: usize,
        calibration: BiasCalibration,
        bias_ratio: Option<f64>,
    },
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Protocol { .. } => "protocol",
            CommandConfig::GainSweep { .. } => "gain-sweep",
            CommandConfig::GainVsPhi { .. } => "gain-vs-phi",
            CommandConfig::Visibility { .. } => "visibility",
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots > 0 && self.seed.is_none() {
            bail!("--seed is required when --shots is positive");
        }
        if !(self.rate_scale >= 0.0 && self.rate_scale.is_finite()) {
            bail!("--rate-scale must be finite and non-negative");
        }
        let nonempty = |name: &str, v: &[f64]| {
            if v.is_empty() {
                bail!("{name} must not be empty");
            }
            if let Some(x) = v.iter().find(|x| !x.is_finite()) {
                bail!("{name} contains a non-finite value {x}");
            }
            Ok(())
        };
        let sizes = |v: &[f64]| {
            nonempty("--inputs", v)?;
            if let Some(x) = v.iter().find(|&&x| x < 0.0) {
                bail!("input sizes must be non-negative, got {x}");
            }
            Ok(())
        };
        match &self.command {
            CommandConfig::Protocol { alpha2, loss, .. } => {
                if !(*alpha2 >= 0.0 && alpha2.is_finite()) {
                    bail!("--alpha2 must be finite and non-negative");
                }
                if !(0.0..=1.0).contains(loss) {
                    bail!("--loss must lie in [0, 1]");
                }
            }
            CommandConfig::GainSweep { gains, inputs, .. } => {
                nonempty("--gain", gains)?;
                sizes(inputs)?;
            }
            CommandConfig::GainVsPhi { phis, inputs, .. } => {
                nonempty("--phi", phis)?;
                sizes(inputs)?;
            }
            CommandConfig::Visibility {
                gains,
                phase_points,
                ..
            } => {
                nonempty("--gain", gains)?;
                if *phase_points < 3 {
                    bail!("--phase-points must be at least 3");
                }
            }
        }
        Ok(())
    }
}

/// Reads either a bare config or a JSON report whose `config` field holds one.
pub fn parse_saved(text: &str) -> Result<RunConfig> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let inner = match value.get("config") {
        Some(c) if value.get("schema").is_some() => c.clone(),
        _ => value,
    };
    Ok(serde_json::from_value(inner)?)
}
