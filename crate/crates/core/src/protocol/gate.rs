use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elements::{ppbs, ppbs_transmitted, ModeLayout, PpbsSpec};
use crate::error::Result;
use crate::fock::{FockBasis, FockOperator, ModeTransform};

/// Which controlled-Z coupling the protocol uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    /// Deterministic CZ acting as `(−1)^{n_sV · n_mV}`.
    Ideal,
    /// Three-PPBS linear-optics gate, heralded by one photon per output.
    Ppbs,
}

impl std::str::FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ideal" => Ok(GateKind::Ideal),
            "ppbs" => Ok(GateKind::Ppbs),
            other => Err(format!(
                "unknown gate `{other}` (expected `ideal` or `ppbs`)"
            )),
        }
    }
}

impl std::fmt::Display for GateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GateKind::Ideal => "ideal",
            GateKind::Ppbs => "ppbs",
        })
    }
}

/// One optical element of a circuit, in the order light meets it.
#[derive(Debug, Clone)]
pub struct CircuitElement {
    pub label: &'static str,
    pub transform: ModeTransform,
}

/// Controlled-Z on the signal and meter vertical modes, extended beyond the
/// qubit subspace as `(−1)^{n_sV · n_mV}`.
pub fn ideal_cz(basis: &Arc<FockBasis>, layout: &ModeLayout) -> Result<FockOperator> {
    let positions = basis.positions(&[layout.signal.v, layout.meter.v])?;
    let (s, m) = (positions[0], positions[1]);
    Ok(FockOperator::diagonal(basis.clone(), |occ| {
        if (occ[s] * occ[m]) % 2 == 1 {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    }))
}

/// The three-PPBS gate: a horizontal-attenuating PPBS on the signal, the
/// central vertical-interfering PPBS coupling `s_V` and `m_V`, and a
/// horizontal-attenuating PPBS on the meter.
///
/// With dump ports in the layout the two outer PPBS are full unitaries that
/// reflect into those ports. Without them only the transmitted amplitudes
/// are kept, which post-selects on nothing leaving through the dumps.
pub fn ppbs_cz_circuit(layout: &ModeLayout) -> Result<Vec<CircuitElement>> {
    let outer = |mode, dump: Option<_>| match dump {
        Some(d) => ppbs(PpbsSpec::horizontal(), mode, d),
        None => ppbs_transmitted(PpbsSpec::horizontal(), mode),
    };
    Ok(vec![
        CircuitElement {
            label: "PPBS_H signal",
            transform: outer(layout.signal, layout.signal_dump)?,
        },
        CircuitElement {
            label: "PPBS_V centre",
            transform: ppbs(PpbsSpec::vertical(), layout.signal, layout.meter)?,
        },
        CircuitElement {
            label: "PPBS_H meter",
            transform: outer(layout.meter, layout.meter_dump)?,
        },
    ])
}

/// Fock operator of the chosen gate on `basis`.
pub fn gate_operator(
    gate: GateKind,
    basis: &Arc<FockBasis>,
    layout: &ModeLayout,
) -> Result<FockOperator> {
    match gate {
        GateKind::Ideal => ideal_cz(basis, layout),
        GateKind::Ppbs => {
            let circuit = ppbs_cz_circuit(layout)?;
            ModeTransform::sequence(circuit.iter().map(|e| &e.transform))?.lift(basis)
        }
    }
}
