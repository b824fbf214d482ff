use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SignalState;
use crate::elements::{hwp, loss_channel, qwp, LossSpec, ModeLayout};
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, FockBasis, ModeTransform, StateVector};

/// A prepared state together with the probability weight its truncation
/// discarded.
#[derive(Debug, Clone)]
pub struct Truncated<S> {
    pub state: S,
    pub truncation_weight: f64,
}

impl<S> Truncated<S> {
    fn check(self, bound: f64) -> Result<Self> {
        if self.truncation_weight > bound {
            return Err(Error::TruncationExceeded {
                weight: self.truncation_weight,
                bound,
            });
        }
        Ok(self)
    }
}

/// How the signal mode is populated before the gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalKind {
    /// Coherent state `|α>`, Fock-expanded up to the photon cap.
    Coherent { alpha: Complex64 },
    /// Uniform phase mixture of coherent states of magnitude `|α|`:
    /// Poissonian and diagonal in the Fock basis.
    PhaseAveraged { magnitude: f64 },
    /// Two-level approximation `N(|0> + α|1>)`, `N = exp(−|α|²/2)`.
    QubitTruncated { alpha: Complex64 },
}

/// Signal preparation: a state in `s_V`, optionally attenuated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    #[serde(flatten)]
    pub kind: SignalKind,
    #[serde(default)]
    pub loss: LossSpec,
}

impl SignalSpec {
    pub fn coherent(alpha: Complex64) -> Self {
        SignalSpec {
            kind: SignalKind::Coherent { alpha },
            loss: LossSpec::none(),
        }
    }

    pub fn phase_averaged(magnitude: f64) -> Self {
        SignalSpec {
            kind: SignalKind::PhaseAveraged { magnitude },
            loss: LossSpec::none(),
        }
    }

    pub fn qubit_truncated(alpha: Complex64) -> Self {
        SignalSpec {
            kind: SignalKind::QubitTruncated { alpha },
            loss: LossSpec::none(),
        }
    }

    /// Spec of the given kind ("coherent", "phase_averaged",
    /// "qubit_truncated") with mean photon number `size = |α|²`, real `α`.
    pub fn from_size(kind: SignalShape, size: f64) -> Result<Self> {
        if !(size >= 0.0 && size.is_finite()) {
            return Err(Error::invalid(
                "state size",
                size,
                "must be finite and non-negative",
            ));
        }
        let a = size.sqrt();
        Ok(match kind {
            SignalShape::Coherent => Self::coherent(Complex64::new(a, 0.0)),
            SignalShape::PhaseAveraged => Self::phase_averaged(a),
            SignalShape::QubitTruncated => Self::qubit_truncated(Complex64::new(a, 0.0)),
        })
    }

    pub fn with_loss(mut self, loss: LossSpec) -> Self {
        self.loss = loss;
        self
    }

    /// `|α|²` before loss.
    pub fn size(&self) -> f64 {
        match self.kind {
            SignalKind::Coherent { alpha } | SignalKind::QubitTruncated { alpha } => {
                alpha.norm_sqr()
            }
            SignalKind::PhaseAveraged { magnitude } => magnitude * magnitude,
        }
    }
}

/// Shape of a signal without its amplitude, for building specs from sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalShape {
    Coherent,
    PhaseAveraged,
    QubitTruncated,
}

/// Fock basis of the signal's two polarisation modes `[s_H, s_V]`.
pub fn signal_basis(photon_cap: usize) -> Result<Arc<FockBasis>> {
    FockBasis::over_modes(&ModeLayout::standard().signal.modes(), photon_cap)
}

/// Fock basis of the meter's two polarisation modes `[m_H, m_V]`, single
/// photon.
pub fn meter_basis() -> Arc<FockBasis> {
    FockBasis::over_modes(&ModeLayout::standard().meter.modes(), 1)
        .expect("a one-photon two-mode basis is tiny")
}

fn poisson_weights(mean: f64, cap: usize) -> (Vec<f64>, f64) {
    let mut w = Vec::with_capacity(cap + 1);
    let mut term = (-mean).exp();
    for n in 0..=cap {
        if n > 0 {
            term *= mean / n as f64;
        }
        w.push(term);
    }
    let tail = (1.0 - w.iter().sum::<f64>()).max(0.0);
    (w, tail)
}

/// `exp(−|α|²/2) Σ αⁿ/√n! |n>` in `s_V` for `n ≤ photon_cap`, without
/// renormalising: the missing Poisson tail is the truncation weight.
pub fn truncated_coherent(
    alpha: Complex64,
    photon_cap: usize,
    bound: f64,
) -> Result<Truncated<StateVector>> {
    coherent_unchecked(alpha, photon_cap)?.check(bound)
}

fn coherent_unchecked(alpha: Complex64, photon_cap: usize) -> Result<Truncated<StateVector>> {
    let basis = signal_basis(photon_cap)?;
    let mut amp = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    let mut terms = Vec::with_capacity(photon_cap + 1);
    for n in 0..=photon_cap as u32 {
        if n > 0 {
            amp *= alpha / f64::from(n).sqrt();
        }
        terms.push((vec![0, n], amp));
    }
    let state = StateVector::from_terms(basis, &terms)?;
    let truncation_weight = (1.0 - state.amplitudes().norm_squared()).max(0.0);
    Ok(Truncated {
        state,
        truncation_weight,
    })
}

/// Diagonal Poissonian state `Σ e^{−|α|²} |α|^{2n}/n! |n><n|` in `s_V`, the
/// phase average of `|α e^{iθ}>` over θ.
pub fn phase_averaged_state(
    magnitude: f64,
    photon_cap: usize,
    bound: f64,
) -> Result<Truncated<DensityOperator>> {
    phase_averaged_unchecked(magnitude, photon_cap)?.check(bound)
}

fn phase_averaged_unchecked(
    magnitude: f64,
    photon_cap: usize,
) -> Result<Truncated<DensityOperator>> {
    if !(magnitude >= 0.0 && magnitude.is_finite()) {
        return Err(Error::invalid(
            "magnitude",
            magnitude,
            "must be finite and non-negative",
        ));
    }
    let basis = signal_basis(photon_cap)?;
    let (w, tail) = poisson_weights(magnitude * magnitude, photon_cap);
    let state =
        DensityOperator::diagonal(
            basis,
            |occ| {
                if occ[0] == 0 {
                    w[occ[1] as usize]
                } else {
                    0.0
                }
            },
        );
    Ok(Truncated {
        state,
        truncation_weight: tail,
    })
}

fn qubit_truncated(alpha: Complex64, photon_cap: usize) -> Result<Truncated<StateVector>> {
    let basis = signal_basis(photon_cap.max(1))?;
    let n = (-alpha.norm_sqr() / 2.0).exp();
    let state = StateVector::from_terms(
        basis,
        &[
            (vec![0, 0], Complex64::new(n, 0.0)),
            (vec![0, 1], alpha * n),
        ],
    )?;
    let truncation_weight = (1.0 - state.amplitudes().norm_squared()).max(0.0);
    Ok(Truncated {
        state,
        truncation_weight,
    })
}

/// Build the signal state on `[s_H, s_V]` with total photon number at most
/// `photon_cap`. Never fails on truncation; callers compare the reported
/// weight against their own bound.
pub fn prepare_signal(spec: &SignalSpec, photon_cap: usize) -> Result<Truncated<SignalState>> {
    let prepared = match spec.kind {
        SignalKind::Coherent { alpha } => {
            let t = coherent_unchecked(alpha, photon_cap)?;
            Truncated {
                state: SignalState::Pure(t.state),
                truncation_weight: t.truncation_weight,
            }
        }
        SignalKind::QubitTruncated { alpha } => {
            let t = qubit_truncated(alpha, photon_cap)?;
            Truncated {
                state: SignalState::Pure(t.state),
                truncation_weight: t.truncation_weight,
            }
        }
        SignalKind::PhaseAveraged { magnitude } => {
            let t = phase_averaged_unchecked(magnitude, photon_cap)?;
            Truncated {
                state: SignalState::Mixed(t.state),
                truncation_weight: t.truncation_weight,
            }
        }
    };
    if spec.loss.loss == 0.0 {
        return Ok(prepared);
    }
    let channel = loss_channel(spec.loss, ModeLayout::standard().signal.v)?;
    let rho = channel.apply(&prepared.state.to_density())?;
    Ok(Truncated {
        state: SignalState::Mixed(rho),
        truncation_weight: prepared.truncation_weight,
    })
}

/// Meter qubit `(|H> + i e^{iφ}|V>)/√2` as one photon across `[m_H, m_V]`.
pub fn meter_state(phi: f64) -> StateVector {
    let v = Complex64::i() * Complex64::from_polar(1.0, phi);
    StateVector::from_terms(
        meter_basis(),
        &[
            (vec![1, 0], Complex64::new(FRAC_1_SQRT_2, 0.0)),
            (vec![0, 1], v * FRAC_1_SQRT_2),
        ],
    )
    .expect("single-photon meter states fit the meter basis")
}

/// The heralding outcome `(|H> − i|V>)/√2`.
pub fn meter_projector() -> StateVector {
    StateVector::from_terms(
        meter_basis(),
        &[
            (vec![1, 0], Complex64::new(FRAC_1_SQRT_2, 0.0)),
            (vec![0, 1], Complex64::new(0.0, -FRAC_1_SQRT_2)),
        ],
    )
    .expect("single-photon meter states fit the meter basis")
}

/// Meter photon in `|H>`, used both as preparation and projection when
/// measuring the input through the gate.
pub fn meter_horizontal() -> StateVector {
    StateVector::from_terms(meter_basis(), &[(vec![1, 0], Complex64::new(1.0, 0.0))])
        .expect("single-photon meter states fit the meter basis")
}

/// Half- and quarter-wave plate angles that turn `|H>` into the meter state
/// for `phi` (up to global phase): HWP at `π/4 + φ/4`, then QWP at `π/4`.
pub fn meter_waveplate_angles(phi: f64) -> (f64, f64) {
    (FRAC_PI_4 + phi / 4.0, FRAC_PI_4)
}

/// Prepare the meter from `|H>` with the two waveplates.
pub fn meter_state_from_waveplates(hwp_angle: f64, qwp_angle: f64) -> Result<StateVector> {
    let meter = ModeLayout::standard().meter;
    let t = ModeTransform::sequence([&hwp(hwp_angle, meter), &qwp(qwp_angle, meter)])?;
    t.lift(&meter_basis())?.apply(&meter_horizontal())
}
