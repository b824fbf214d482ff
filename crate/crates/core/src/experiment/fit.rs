use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};

/// Ordinary least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::FitFailed("a line needs at least two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FitFailed("all abscissae are equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Fit of `R(ϑ) = offset + amplitude·cos(ϑ − phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FringeFit {
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
    /// `amplitude / offset`.
    pub visibility: f64,
    /// Standard error of the visibility; `None` without error estimates and
    /// with no spare degrees of freedom.
    pub uncertainty: Option<f64>,
}

/// Weighted least squares of `A + B cos ϑ + C sin ϑ`. With `sigmas` the
/// covariance comes from the supplied errors, otherwise from the residuals.
pub fn fit_fringe(phases: &[f64], rates: &[f64], sigmas: Option<&[f64]>) -> Result<FringeFit> {
    if phases.len() != rates.len() {
        return Err(Error::DimensionMismatch {
            expected: phases.len(),
            found: rates.len(),
        });
    }
    if let Some(s) = sigmas {
        if s.len() != rates.len() {
            return Err(Error::DimensionMismatch {
                expected: rates.len(),
                found: s.len(),
            });
        }
    }
    if phases.len() < 3 {
        return Err(Error::FitFailed(
            "a fringe needs at least three phase points",
        ));
    }
    let peak = rates.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if !(peak > 1e-300) {
        return Err(Error::FitFailed("all rates vanish"));
    }

    // normal equations in units of the peak rate to keep them well scaled
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for (i, (&t, &r)) in phases.iter().zip(rates).enumerate() {
        let w = match sigmas {
            Some(s) if s[i] > 0.0 => (peak / s[i]).powi(2),
            Some(_) => 1.0,
            None => 1.0,
        };
        let row = Vector3::new(1.0, t.cos(), t.sin());
        ata += w * row * row.transpose();
        atb += w * row * (r / peak);
    }
    let inv = ata
        .try_inverse()
        .ok_or(Error::FitFailed("phase points do not resolve a cosine"))?;
    let p = inv * atb;
    let (a, b, c) = (p[0], p[1], p[2]);
    if !(a > 0.0) {
        return Err(Error::FitFailed("fitted offset is not positive"));
    }
    let amp = b.hypot(c);
    let visibility = amp / a;

    let cov = match sigmas {
        Some(_) => Some(inv),
        None => {
            let dof = phases.len() as f64 - 3.0;
            (dof > 0.0).then(|| {
                let rss: f64 = phases
                    .iter()
                    .zip(rates)
                    .map(|(&t, &r)| (r / peak - (a + b * t.cos() + c * t.sin())).powi(2))
                    .sum();
                inv * (rss / dof)
            })
        }
    };
    let uncertainty = cov.map(|cov| {
        // gradient of sqrt(B² + C²)/A
        let grad = if amp > 0.0 {
            Vector3::new(-amp / (a * a), b / (amp * a), c / (amp * a))
        } else {
            Vector3::new(0.0, 1.0 / a, 1.0 / a)
        };
        (grad.transpose() * cov * grad)[(0, 0)].max(0.0).sqrt()
    });

    Ok(FringeFit {
        offset: a * peak,
        amplitude: amp * peak,
        phase: c.atan2(b),
        visibility,
        uncertainty,
    })
}
