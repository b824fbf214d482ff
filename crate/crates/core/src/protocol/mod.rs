//! The weak-measurement amplifier: signal and meter preparation, the CZ
//! coupling, heralding on the meter and closed-form predictions.
//!
//! ```
//! use nla_weaksim::protocol::{phi_for_gain, run_nla, GateKind, ProtocolConfig, SignalSpec};
//! use num_complex::Complex64;
//!
//! let meter = phi_for_gain(3.0).unwrap();
//! let signal = SignalSpec::qubit_truncated(Complex64::new(0.01, 0.0));
//! let out = run_nla(&signal, &meter, GateKind::Ideal, &ProtocolConfig::default()).unwrap();
//! let gain = out.state_size_out.unwrap() / 1e-4;
//! assert!((gain - 3.0).abs() < 1e-9);
//! ```

mod analytic;
mod gate;
mod prepare;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use analytic::{
    amplitude_gain, analytic, intensity_gain, phi_for_gain, AnalyticPrediction, MeterSetting,
};
pub use gate::{gate_operator, ideal_cz, ppbs_cz_circuit, CircuitElement, GateKind};
pub use prepare::{
    meter_basis, meter_horizontal, meter_projector, meter_state, meter_state_from_waveplates,
    meter_waveplate_angles, phase_averaged_state, prepare_signal, signal_basis, truncated_coherent,
    SignalKind, SignalShape, SignalSpec, Truncated,
};

use crate::elements::ModeLayout;
use crate::error::{Error, Result};
use crate::fock::{
    DensityOperator, Evolve, FockBasis, FockOperator, FockState, Projection, StateVector,
    DEFAULT_MAX_BASIS_SIZE,
};

/// Pure or mixed state on the signal modes `[s_H, s_V]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalState {
    Pure(StateVector),
    Mixed(DensityOperator),
}

impl SignalState {
    pub fn to_density(&self) -> DensityOperator {
        match self {
            SignalState::Pure(s) => s.to_density(),
            SignalState::Mixed(r) => r.clone(),
        }
    }

    /// `P(n_V = 1) / P(n_V = 0)` in the signal vertical mode. Equals `|α|²`
    /// for any Poissonian input regardless of normalisation.
    pub fn state_size(&self) -> Result<Option<f64>> {
        let v = ModeLayout::standard().signal.v;
        let p0 = self.occupancy_probability(v, 0)?;
        let p1 = self.occupancy_probability(v, 1)?;
        Ok((p0 > 0.0).then(|| p1 / p0))
    }

    /// `<0,1|ψ> / <0,0|ψ>` for pure states.
    pub fn amplitude_ratio(&self) -> Option<Complex64> {
        match self {
            SignalState::Pure(s) => {
                let a0 = s.amplitude(&[0, 0]);
                (a0.norm() > 0.0).then(|| s.amplitude(&[0, 1]) / a0)
            }
            SignalState::Mixed(_) => None,
        }
    }
}

impl FockState for SignalState {
    fn basis(&self) -> &Arc<FockBasis> {
        match self {
            SignalState::Pure(s) => s.basis(),
            SignalState::Mixed(r) => r.basis(),
        }
    }

    fn weight(&self) -> f64 {
        match self {
            SignalState::Pure(s) => s.weight(),
            SignalState::Mixed(r) => r.weight(),
        }
    }

    fn occupancy_probability(&self, mode: usize, n: u32) -> Result<f64> {
        match self {
            SignalState::Pure(s) => s.occupancy_probability(mode, n),
            SignalState::Mixed(r) => r.occupancy_probability(mode, n),
        }
    }

    fn project(&self, projector: &StateVector) -> Result<Projection<Self>> {
        Ok(match self {
            SignalState::Pure(s) => {
                let p = s.project(projector)?;
                Projection {
                    state: p.state.map(SignalState::Pure),
                    probability: p.probability,
                }
            }
            SignalState::Mixed(r) => {
                let p = r.project(projector)?;
                Projection {
                    state: p.state.map(SignalState::Mixed),
                    probability: p.probability,
                }
            }
        })
    }
}

impl Evolve for SignalState {
    fn evolve(&self, op: &FockOperator) -> Result<Self> {
        Ok(match self {
            SignalState::Pure(s) => SignalState::Pure(s.evolve(op)?),
            SignalState::Mixed(r) => SignalState::Mixed(r.evolve(op)?),
        })
    }
}

/// How light reflected out of the two attenuating PPBS is handled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DumpPorts {
    /// Keep only the transmitted amplitudes; runs are conditioned on the
    /// dumps staying dark.
    #[default]
    PostSelected,
    /// Route the reflections into explicit vacuum modes and trace them out.
    Traced,
}

impl DumpPorts {
    pub fn layout(self) -> ModeLayout {
        match self {
            DumpPorts::PostSelected => ModeLayout::standard(),
            DumpPorts::Traced => ModeLayout::with_dump_ports(),
        }
    }
}

/// Numerical settings shared by every protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolConfig {
    /// Total photon cap of the joint signal + meter basis.
    pub photon_cap: usize,
    pub max_basis_size: usize,
    /// Truncation weight above which a run is flagged.
    pub truncation_bound: f64,
    pub dump_ports: DumpPorts,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            photon_cap: 3,
            max_basis_size: DEFAULT_MAX_BASIS_SIZE,
            truncation_bound: 1e-3,
            dump_ports: DumpPorts::PostSelected,
        }
    }
}

impl ProtocolConfig {
    fn validate(&self) -> Result<()> {
        if self.photon_cap < 1 {
            return Err(Error::invalid(
                "photon_cap",
                self.photon_cap as f64,
                "must leave room for the meter photon",
            ));
        }
        if !(self.truncation_bound >= 0.0) {
            return Err(Error::invalid(
                "truncation_bound",
                self.truncation_bound,
                "must be non-negative",
            ));
        }
        Ok(())
    }
}

/// Result of one heralded run.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolOutcome {
    /// Conditional signal state, `None` when the herald never fires.
    pub conditional_state: Option<SignalState>,
    pub herald_probability: f64,
    /// Conditional probability of one photon in `s_V`.
    pub p1_out: f64,
    /// Conditional probability of vacuum in `s_V`.
    pub p0_out: f64,
    /// `p1_out / p0_out`.
    pub state_size_out: Option<f64>,
    /// The same ratio for the prepared signal.
    pub state_size_in: Option<f64>,
    /// `<0,1|ψ> / <0,0|ψ>` of a pure conditional state.
    pub amplitude_ratio: Option<Complex64>,
    /// Probability weight lost to the photon cap.
    pub truncation_weight: f64,
    pub truncation_exceeded: bool,
}

impl ProtocolOutcome {
    pub fn heralded(&self) -> bool {
        self.conditional_state.is_some()
    }
}

/// Prepare `signal`, couple it to the meter set at `meter`, and herald on
/// the meter being found in `(|H> − i|V>)/√2`.
pub fn run_nla(
    signal: &SignalSpec,
    meter: &MeterSetting,
    gate: GateKind,
    config: &ProtocolConfig,
) -> Result<ProtocolOutcome> {
    run_heralded(
        signal,
        &meter_state(meter.phi()),
        &meter_projector(),
        gate,
        config,
    )
}

/// Input state size as seen through the gate: meter prepared and projected
/// in `|H>`. The three-PPBS gate scales the measured size by 1/3.
pub fn run_reference(
    signal: &SignalSpec,
    gate: GateKind,
    config: &ProtocolConfig,
) -> Result<ProtocolOutcome> {
    let h = meter_horizontal();
    run_heralded(signal, &h, &h, gate, config)
}

/// General form of [`run_nla`] with arbitrary meter preparation and
/// heralding projector.
pub fn run_heralded(
    signal: &SignalSpec,
    meter: &StateVector,
    projector: &StateVector,
    gate: GateKind,
    config: &ProtocolConfig,
) -> Result<ProtocolOutcome> {
    config.validate()?;
    let prepared = prepare_signal(signal, config.photon_cap - 1)?;
    run_prepared(prepared, meter, projector, gate, config)
}

/// Run the protocol on an already prepared signal state.
pub fn run_prepared(
    prepared: Truncated<SignalState>,
    meter: &StateVector,
    projector: &StateVector,
    gate: GateKind,
    config: &ProtocolConfig,
) -> Result<ProtocolOutcome> {
    config.validate()?;
    let layout = config.dump_ports.layout();
    let state_size_in = prepared.state.state_size()?;
    let cap = config.photon_cap;

    let core_modes: Vec<usize> = layout
        .signal
        .modes()
        .into_iter()
        .chain(layout.meter.modes())
        .collect();
    let full = FockBasis::over_modes_with_limit(&layout.modes(), cap, config.max_basis_size)?;
    let core = if layout.has_dump_ports() {
        FockBasis::over_modes_with_limit(&core_modes, cap, config.max_basis_size)?
    } else {
        full.clone()
    };
    let dumps = FockBasis::over_modes(&layout.dump_modes(), 0)?;

    let (joint, discarded) = match &prepared.state {
        SignalState::Pure(s) => {
            let (j, d) = s.tensor_on(meter, core)?;
            let j = if layout.has_dump_ports() {
                j.tensor_on(&StateVector::vacuum(dumps), full.clone())?.0
            } else {
                j
            };
            (SignalState::Pure(j), d)
        }
        SignalState::Mixed(r) => {
            let (j, d) = r.tensor_on(&meter.to_density(), core)?;
            let j = if layout.has_dump_ports() {
                j.tensor_on(&StateVector::vacuum(dumps).to_density(), full.clone())?
                    .0
            } else {
                j
            };
            (SignalState::Mixed(j), d)
        }
    };

    let evolved = gate_operator(gate, &full, &layout)?.apply(&joint)?;
    let projection = evolved.project(projector)?;
    let conditional_state = match projection.state {
        Some(s) if layout.has_dump_ports() => Some(SignalState::Mixed(
            s.to_density().partial_trace(&layout.dump_modes())?,
        )),
        other => other,
    };

    let truncation_weight = prepared.truncation_weight + discarded;
    let (p0_out, p1_out, state_size_out, amplitude_ratio) = match &conditional_state {
        Some(s) => {
            let v = layout.signal.v;
            let p0 = s.occupancy_probability(v, 0)?;
            let p1 = s.occupancy_probability(v, 1)?;
            (p0, p1, (p0 > 0.0).then(|| p1 / p0), s.amplitude_ratio())
        }
        None => (0.0, 0.0, None, None),
    };
    Ok(ProtocolOutcome {
        conditional_state,
        herald_probability: projection.probability.clamp(0.0, 1.0),
        p1_out,
        p0_out,
        state_size_out,
        state_size_in,
        amplitude_ratio,
        truncation_weight,
        truncation_exceeded: truncation_weight > config.truncation_bound,
    })
}
