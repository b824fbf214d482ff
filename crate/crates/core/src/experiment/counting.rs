use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expected counts above this are refused rather than sampled.
pub const MAX_EXPECTED_COUNT: f64 = 1e15;

/// Poisson counting settings. `shots = 0` means no sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingModel {
    pub shots: u64,
    pub seed: u64,
}

impl CountingModel {
    pub const DEFAULT_SHOTS: u64 = 1_000_000;

    pub fn new(shots: u64, seed: u64) -> Self {
        CountingModel { shots, seed }
    }

    pub fn is_sampling(&self) -> bool {
        self.shots > 0
    }

    /// Generator for sweep point `index`: the root seed with its own stream,
    /// so results do not depend on evaluation order.
    pub fn rng_for_point(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// One sampled count with its Poisson standard error `√count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Count {
    pub expected: f64,
    pub count: u64,
    pub error: f64,
}

/// Draw one count with mean `expected`.
pub fn sample_count(expected: f64, rng: &mut ChaCha8Rng) -> Result<Count> {
    if !(expected >= 0.0) {
        return Err(Error::invalid(
            "expected count",
            expected,
            "must be non-negative",
        ));
    }
    if expected > MAX_EXPECTED_COUNT {
        return Err(Error::CountOverflow(expected));
    }
    let count = if expected == 0.0 {
        0
    } else {
        Poisson::new(expected)
            .map_err(|_| Error::CountOverflow(expected))?
            .sample(rng) as u64
    };
    Ok(Count {
        expected,
        count,
        error: (count as f64).sqrt(),
    })
}

/// Sample counts for `probabilities`, each with mean
/// `probability · rate_scale · shots`, from the generator of `point`.
pub fn simulate_counts(
    probabilities: &[f64],
    rate_scale: f64,
    counting: &CountingModel,
    point: u64,
) -> Result<Vec<Count>> {
    if counting.shots == 0 {
        return Err(Error::invalid(
            "shots",
            0.0,
            "sampling needs at least one shot",
        ));
    }
    if !(rate_scale >= 0.0 && rate_scale.is_finite()) {
        return Err(Error::invalid(
            "rate_scale",
            rate_scale,
            "must be finite and non-negative",
        ));
    }
    let mut rng = counting.rng_for_point(point);
    probabilities
        .iter()
        .map(|&p| {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid("probability", p, "must lie in [0, 1]"));
            }
            sample_count(p * rate_scale * counting.shots as f64, &mut rng)
        })
        .collect()
}

/// Ratio `num/den` with first-order relative error from independent Poisson
/// counts.
pub fn count_ratio(num: &Count, den: &Count) -> Option<(f64, f64)> {
    if num.count == 0 || den.count == 0 {
        return None;
    }
    let (n, d) = (num.count as f64, den.count as f64);
    let r = n / d;
    Some((r, r * (1.0 / n + 1.0 / d).sqrt()))
}

/// Gain `(C_out/H_out) / (C_in/H_in)` from coincidence and herald counts with
/// its propagated standard error.
pub fn gain_from_counts(
    coinc_out: &Count,
    herald_out: &Count,
    coinc_in: &Count,
    herald_in: &Count,
) -> Option<(f64, f64)> {
    let (out, _) = count_ratio(coinc_out, herald_out)?;
    let (inp, _) = count_ratio(coinc_in, herald_in)?;
    let rel = [coinc_out, herald_out, coinc_in, herald_in]
        .iter()
        .map(|c| 1.0 / c.count as f64)
        .sum::<f64>()
        .sqrt();
    let g = out / inp;
    Some((g, g * rel))
}
