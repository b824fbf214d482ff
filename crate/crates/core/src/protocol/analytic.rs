use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Meter phase `φ`, kept in `(−π, π]`. Negative values give the
/// phase-conjugate gain with the same magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeter")]
pub struct MeterSetting {
    phi: f64,
}

#[derive(Deserialize)]
struct RawMeter {
    phi: f64,
}

impl TryFrom<RawMeter> for MeterSetting {
    type Error = Error;

    fn try_from(raw: RawMeter) -> Result<Self> {
        MeterSetting::new(raw.phi)
    }
}

impl MeterSetting {
    pub fn new(phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::invalid("phi", phi, "must be finite"));
        }
        let mut p = phi.rem_euclid(2.0 * PI);
        if p > PI {
            p -= 2.0 * PI;
        }
        Ok(MeterSetting { phi: p })
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(deg.to_radians())
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `φ = 0`: the heralding outcome is orthogonal to the meter state.
    pub fn is_infinite_gain(&self) -> bool {
        self.phi == 0.0
    }
}

/// Amplitude gain `(1 + e^{iφ}) / (1 − e^{iφ}) = i·cot(φ/2)`.
pub fn amplitude_gain(phi: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, phi);
    (1.0 + e) / (1.0 - e)
}

/// Intensity gain `cot²(φ/2)` of the ideal gate.
pub fn intensity_gain(phi: f64) -> f64 {
    let t = (phi / 2.0).tan();
    1.0 / (t * t)
}

/// Meter setting with ideal-gate intensity gain `target_g2`:
/// `φ = 2·arccot(√target)`. A target of zero gives `φ = π`.
pub fn phi_for_gain(target_g2: f64) -> Result<MeterSetting> {
    if !(target_g2 >= 0.0 && target_g2.is_finite()) {
        return Err(Error::invalid(
            "target gain",
            target_g2,
            "must be finite and non-negative",
        ));
    }
    MeterSetting::new(2.0 * 1.0f64.atan2(target_g2.sqrt()))
}

/// Closed-form predictions for one meter setting and input amplitude
/// magnitude `|α|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticPrediction {
    pub phi: f64,
    /// Amplitude gain of the ideal gate.
    pub g: Complex64,
    /// `|g|²`.
    pub g2: f64,
    /// Intensity gain of the three-PPBS gate, `|g|²/3`.
    pub g2_nondet: f64,
    /// Herald probability of the three-PPBS gate,
    /// `𝓝²/3 · sin²(φ/2) · (1 + |g′α|²)`, with the input normalisation.
    pub p_success: f64,
    /// The same expression with the output normalisation `𝓝′` in place of `𝓝`.
    pub p_success_output_norm: f64,
    /// Herald probability of the ideal gate, `𝓝² sin²(φ/2) (1 + |gα|²)`.
    pub p_success_ideal: f64,
    /// `𝓝 = exp(−|α|²/2)`.
    pub norm_in: f64,
    /// `𝓝′ = exp(−|g′α|²/2)`.
    pub norm_out: f64,
}

/// Predictions for the two-level input `𝓝(|0> + α|1>)`, for which they are
/// exact.
pub fn analytic(meter: &MeterSetting, alpha: f64) -> Result<AnalyticPrediction> {
    if meter.is_infinite_gain() {
        return Err(Error::InfiniteGain);
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(
            "alpha",
            alpha,
            "magnitude must be finite and non-negative",
        ));
    }
    let phi = meter.phi();
    let g = amplitude_gain(phi);
    let g2 = g.norm_sqr();
    let g2_nondet = g2 / 3.0;
    let a2 = alpha * alpha;
    let s2 = (phi / 2.0).sin().powi(2);
    let norm_in = (-a2 / 2.0).exp();
    let norm_out = (-g2_nondet * a2 / 2.0).exp();
    // 1/(1 + 3|g'|²) = sin²(φ/2)
    let shape = s2 * (1.0 + g2_nondet * a2) / 3.0;
    Ok(AnalyticPrediction {
        phi,
        g,
        g2,
        g2_nondet,
        p_success: norm_in * norm_in * shape,
        p_success_output_norm: norm_out * norm_out * shape,
        p_success_ideal: norm_in * norm_in * s2 * (1.0 + g2 * a2),
        norm_in,
        norm_out,
    })
}
