use anyhow::{bail, Context, Result};

/// Parses `min:max:logN`, `min:max:linN`, or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [lo, hi, step] => {
            let lo: f64 = parse_value(lo)?;
            let hi: f64 = parse_value(hi)?;
            let (log, n) = if let Some(n) = step.strip_prefix("log") {
                (true, n)
            } else if let Some(n) = step.strip_prefix("lin") {
                (false, n)
            } else {
                bail!("grid step `{step}` must be `logN` or `linN`");
            };
            let n: usize = n
                .parse()
                .with_context(|| format!("bad point count in `{step}`"))?;
            spaced(lo, hi, n, log)
        }
        [_] => spec.split(',').map(parse_value).collect(),
        _ => bail!("grid `{spec}` is neither `min:max:logN|linN` nor a list"),
    }
}

fn parse_value(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .with_context(|| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        bail!("`{s}` is not finite");
    }
    Ok(v)
}

fn spaced(lo: f64, hi: f64, n: usize, log: bool) -> Result<Vec<f64>> {
    if n == 0 {
        bail!("a grid needs at least one point");
    }
    if log && !(lo > 0.0 && hi > 0.0) {
        bail!("log grids need positive endpoints");
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|k| {
            let t = k as f64 / last;
            if k == n - 1 {
                hi
            } else if log {
                lo * (hi / lo).powf(t)
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect())
}
