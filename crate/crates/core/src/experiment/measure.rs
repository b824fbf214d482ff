use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{prepare_signal, run_reference, GateKind, ProtocolConfig, SignalSpec};

/// How the input state size is measured.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementConvention {
    /// Meter prepared in `|H>` and projected on `<H|`, with the signal still
    /// passing through the gate.
    #[default]
    ThroughGateReference,
    /// The prepared state itself.
    TrueInput,
}

impl MeasurementConvention {
    pub fn description(&self) -> &'static str {
        match self {
            MeasurementConvention::ThroughGateReference => {
                "input measured through the gate with meter |H> and projection <H|"
            }
            MeasurementConvention::TrueInput => "state size of the prepared signal",
        }
    }
}

/// State size `P(n=1)/P(n=0)` of the signal under `convention`. Through the
/// three-PPBS gate this is one third of the true size.
pub fn measure_input_size(
    signal: &SignalSpec,
    convention: MeasurementConvention,
    gate: GateKind,
    config: &ProtocolConfig,
) -> Result<f64> {
    let size = match convention {
        MeasurementConvention::ThroughGateReference => {
            run_reference(signal, gate, config)?.state_size_out
        }
        MeasurementConvention::TrueInput => {
            if config.photon_cap < 1 {
                return Err(Error::invalid(
                    "photon_cap",
                    0.0,
                    "must leave room for the meter photon",
                ));
            }
            prepare_signal(signal, config.photon_cap - 1)?
                .state
                .state_size()?
        }
    };
    Ok(size.unwrap_or(0.0))
}

/// Source heralding efficiency `ε ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHerald")]
pub struct HeraldingModel {
    epsilon: f64,
}

#[derive(Deserialize)]
struct RawHerald {
    epsilon: f64,
}

impl TryFrom<RawHerald> for HeraldingModel {
    type Error = Error;

    fn try_from(raw: RawHerald) -> Result<Self> {
        HeraldingModel::new(raw.epsilon)
    }
}

impl HeraldingModel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::invalid("epsilon", epsilon, "must lie in (0, 1]"));
        }
        Ok(HeraldingModel { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `p / (1 + p/ε)`: unit slope at small `p`, saturating at `ε`.
    pub fn apply(&self, p1_ideal: f64) -> f64 {
        p1_ideal / (1.0 + p1_ideal / self.epsilon)
    }
}

pub fn apply_herald_model(p1_ideal: f64, model: &HeraldingModel) -> f64 {
    model.apply(p1_ideal)
}
