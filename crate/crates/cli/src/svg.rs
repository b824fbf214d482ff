//! Minimal self-contained SVG line plots.

use std::fmt::Write;

use nla_weaksim::experiment::{FringeScan, GainSweep, GainVsPhi};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;
const PALETTE: [&str; 6] = [
    "#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#555555",
];

#[derive(Clone, Copy, PartialEq)]
enum Style {
    Solid,
    Dashed,
    Markers,
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
    errors: Option<Vec<f64>>,
    style: Style,
    color: &'static str,
}

struct Plot {
    title: String,
    x_label: &'static str,
    y_label: &'static str,
    series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() < 1e-2 || v.abs() >= 1e4 {
        format!("{v:.1e}")
    } else {
        format!("{}", (v * 1e4).round() / 1e4)
    }
}

impl Plot {
    fn render(&self) -> String {
        let pts = || {
            self.series
                .iter()
                .flat_map(|s| s.points.iter().copied())
                .filter(|(x, y)| x.is_finite() && y.is_finite())
        };
        let (mut x0, mut x1) =
            pts().fold((f64::MAX, f64::MIN), |(a, b), (x, _)| (a.min(x), b.max(x)));
        let (y0, mut y1) = pts().fold((0.0f64, f64::MIN), |(a, b), (_, y)| (a.min(y), b.max(y)));
        if x0 > x1 {
            (x0, x1) = (0.0, 1.0);
        }
        if y1 <= y0 {
            y1 = y0 + 1.0;
        }
        if x1 == x0 {
            x1 = x0 + 1.0;
        }
        y1 += 0.05 * (y1 - y0);
        let pw = WIDTH - MARGIN_L - MARGIN_R;
        let ph = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_T + ph - (y - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            MARGIN_L + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for t in ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                MARGIN_T + ph,
                MARGIN_T + ph + 5.0,
                MARGIN_T + ph + 20.0,
                label(t)
            );
        }
        for t in ticks(y0, y1) {
            let y = sy(t);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN_L - 5.0,
                MARGIN_L - 8.0,
                y + 4.0,
                label(t)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            MARGIN_L + pw / 2.0,
            HEIGHT - 15.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(18 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
            MARGIN_T + ph / 2.0,
            escape(self.y_label)
        );

        for (k, series) in self.series.iter().enumerate() {
            let finite: Vec<(usize, (f64, f64))> = series
                .points
                .iter()
                .copied()
                .enumerate()
                .filter(|(_, (x, y))| x.is_finite() && y.is_finite())
                .collect();
            match series.style {
                Style::Solid | Style::Dashed => {
                    let path: Vec<String> = finite
                        .iter()
                        .map(|(_, (x, y))| format!("{:.2},{:.2}", sx(*x), sy(*y)))
                        .collect();
                    let dash = if series.style == Style::Dashed {
                        r#" stroke-dasharray="6 4""#
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
                        path.join(" "),
                        series.color
                    );
                }
                Style::Markers => {
                    for (i, (x, y)) in &finite {
                        if let Some(e) = series.errors.as_ref().and_then(|e| e.get(*i)) {
                            if e.is_finite() {
                                let _ = writeln!(
                                    s,
                                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}"/>"#,
                                    sx(*x),
                                    sy(y - e),
                                    sx(*x),
                                    sy(y + e),
                                    series.color
                                );
                            }
                        }
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                            sx(*x),
                            sy(*y),
                            series.color
                        );
                    }
                }
            }
            let ly = MARGIN_T + 10.0 + 18.0 * k as f64;
            let lx = WIDTH - MARGIN_R + 12.0;
            let swatch = match series.style {
                Style::Markers => format!(
                    r#"<circle cx="{:.1}" cy="{ly:.1}" r="3" fill="{}"/>"#,
                    lx + 10.0,
                    series.color
                ),
                Style::Solid | Style::Dashed => format!(
                    r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="1.5"{}/>"#,
                    lx + 20.0,
                    series.color,
                    if series.style == Style::Dashed {
                        r#" stroke-dasharray="6 4""#
                    } else {
                        ""
                    }
                ),
            };
            let _ = writeln!(
                s,
                r#"{swatch}<text x="{:.1}" y="{:.1}">{}</text>"#,
                lx + 26.0,
                ly + 4.0,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Output against measured input size: simulated curves solid, the
/// efficiency model dashed, sampled points with error bars.
pub fn gain_sweep(sweeps: &[GainSweep]) -> String {
    let mut series = Vec::new();
    for (k, sweep) in sweeps.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let g = sweep.nominal_g2;
        let rows = &sweep.rows;
        series.push(Series {
            label: format!("|g|²={g:.3} ideal"),
            points: rows
                .iter()
                .map(|r| (r.input_measured, r.output_ideal))
                .collect(),
            errors: None,
            style: Style::Solid,
            color,
        });
        if rows.iter().any(|r| r.output_model.is_some()) {
            series.push(Series {
                label: format!("|g|²={g:.3} model"),
                points: rows
                    .iter()
                    .map(|r| (r.input_measured, r.output_model.unwrap_or(f64::NAN)))
                    .collect(),
                errors: None,
                style: Style::Dashed,
                color,
            });
        }
        if rows.iter().any(|r| r.sampled.is_some()) {
            series.push(Series {
                label: format!("|g|²={g:.3} sampled"),
                points: rows
                    .iter()
                    .map(|r| {
                        let s = r.sampled;
                        (
                            s.and_then(|s| s.input).unwrap_or(f64::NAN),
                            s.and_then(|s| s.output).unwrap_or(f64::NAN),
                        )
                    })
                    .collect(),
                errors: Some(
                    rows.iter()
                        .map(|r| r.sampled.and_then(|s| s.output_error).unwrap_or(f64::NAN))
                        .collect(),
                ),
                style: Style::Markers,
                color,
            });
        }
    }
    Plot {
        title: "Output against input state size".into(),
        x_label: "measured input size",
        y_label: "output size",
        series,
    }
    .render()
}

/// Gain against meter phase.
pub fn gain_vs_phi(sweeps: &[GainVsPhi]) -> String {
    let mut series = Vec::new();
    if let Some(first) = sweeps.first() {
        series.push(Series {
            label: "cot²(φ/2)".into(),
            points: first.rows.iter().map(|r| (r.phi, r.gain_ideal)).collect(),
            errors: None,
            style: Style::Solid,
            color: PALETTE[5],
        });
    }
    for (k, sweep) in sweeps.iter().enumerate() {
        let color = PALETTE[k % (PALETTE.len() - 1)];
        let a = sweep.input_size;
        series.push(Series {
            label: format!("|α|²={a} simulated"),
            points: sweep
                .rows
                .iter()
                .map(|r| (r.phi, r.gain_measured.unwrap_or(f64::NAN)))
                .collect(),
            errors: None,
            style: Style::Markers,
            color,
        });
        if sweep.rows.iter().any(|r| r.gain_model.is_some()) {
            series.push(Series {
                label: format!("|α|²={a} model"),
                points: sweep
                    .rows
                    .iter()
                    .map(|r| (r.phi, r.gain_model.unwrap_or(f64::NAN)))
                    .collect(),
                errors: None,
                style: Style::Dashed,
                color,
            });
        }
        if sweep.rows.iter().any(|r| r.sampled.is_some()) {
            series.push(Series {
                label: format!("|α|²={a} sampled"),
                points: sweep
                    .rows
                    .iter()
                    .map(|r| (r.phi, r.sampled.and_then(|s| s.gain).unwrap_or(f64::NAN)))
                    .collect(),
                errors: Some(
                    sweep
                        .rows
                        .iter()
                        .map(|r| r.sampled.and_then(|s| s.gain_error).unwrap_or(f64::NAN))
                        .collect(),
                ),
                style: Style::Markers,
                color,
            });
        }
    }
    Plot {
        title: "Gain against measurement strength".into(),
        x_label: "meter phase φ (rad)",
        y_label: "intensity gain",
        series,
    }
    .render()
}

/// Normalised fringes with their fitted cosines.
pub fn visibility(scans: &[FringeScan]) -> String {
    let mut series = Vec::new();
    for (k, scan) in scans.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let f = scan.visibility_fit;
        let norm = f.offset + f.amplitude;
        if !(norm > 0.0) {
            continue;
        }
        series.push(Series {
            label: format!("|g|²={} V={:.3}", scan.gain_setting, f.visibility),
            points: scan
                .phase_points
                .iter()
                .zip(&scan.rates)
                .map(|(&t, &r)| (t, r / norm))
                .collect(),
            errors: None,
            style: Style::Markers,
            color,
        });
        let fine: Vec<(f64, f64)> = (0..=120)
            .map(|i| {
                let t = i as f64 / 120.0 * std::f64::consts::TAU;
                (t, (f.offset + f.amplitude * (t - f.phase).cos()) / norm)
            })
            .collect();
        series.push(Series {
            label: format!("|g|²={} fit", scan.gain_setting),
            points: fine,
            errors: None,
            style: Style::Solid,
            color,
        });
    }
    Plot {
        title: "Interference fringes behind the amplifier".into(),
        x_label: "analyser phase ϑ (rad)",
        y_label: "normalised coincidence rate",
        series,
    }
    .render()
}
