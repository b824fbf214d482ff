//! Tabular and JSON output for sweep results.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{FringeScan, GainSweep, GainVsPhi};

/// Schema tag written into every JSON document.
pub const SCHEMA: &str = "nla-weaksim/1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl Cell {
    /// Shortest representation that parses back to the same `f64`.
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => quote(s),
            Cell::Empty => String::new(),
        }
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// A header row and data rows of equal width.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.headers.len() {
            return Err(Error::DimensionMismatch {
                expected: self.headers.len(),
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// CSV with `\n` line endings and RFC 4180 quoting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.headers.iter().map(|h| quote(h)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Rows of one or more gain sweeps, input size first.
pub fn gain_sweep_table(sweeps: &[GainSweep]) -> Result<Table> {
    let sampled = sweeps.iter().any(|s| s.options.counting.is_sampling());
    let mut headers = vec![
        "input_size",
        "gain_setting",
        "input_measured",
        "output_ideal",
        "output_analytic",
        "output_model",
        "herald_prob",
    ];
    if sampled {
        headers.extend([
            "sampled_input",
            "sampled_output",
            "sampled_gain",
            "sampled_input_err",
            "sampled_output_err",
            "sampled_gain_err",
        ]);
    }
    headers.extend(["truncation_weight", "truncation_flag"]);
    let mut table = Table::new(headers);
    for sweep in sweeps {
        for r in &sweep.rows {
            let mut row: Vec<Cell> = vec![
                r.input_size.into(),
                sweep.nominal_g2.into(),
                r.input_measured.into(),
                r.output_ideal.into(),
                r.output_analytic.into(),
                r.output_model.into(),
                r.herald_probability.into(),
            ];
            if sampled {
                let s = r.sampled;
                row.extend([
                    s.and_then(|s| s.input).into(),
                    s.and_then(|s| s.output).into(),
                    s.and_then(|s| s.gain).into(),
                    s.and_then(|s| s.input_error).into(),
                    s.and_then(|s| s.output_error).into(),
                    s.and_then(|s| s.gain_error).into(),
                ]);
            }
            row.extend([r.truncation_weight.into(), r.truncation_exceeded.into()]);
            table.push(row)?;
        }
    }
    Ok(table)
}

/// Rows of one or more gain-versus-phase sweeps, phase first.
pub fn gain_vs_phi_table(sweeps: &[GainVsPhi]) -> Result<Table> {
    let sampled = sweeps.iter().any(|s| s.options.counting.is_sampling());
    let mut headers = vec![
        "phi",
        "input_size",
        "gain_ideal",
        "gain_measured",
        "gain_model",
        "herald_prob",
    ];
    if sampled {
        headers.extend(["sampled_gain", "sampled_gain_err"]);
    }
    headers.extend(["truncation_weight", "zero_herald"]);
    let mut table = Table::new(headers);
    for sweep in sweeps {
        for r in &sweep.rows {
            let mut row: Vec<Cell> = vec![
                r.phi.into(),
                sweep.input_size.into(),
                r.gain_ideal.into(),
                r.gain_measured.into(),
                r.gain_model.into(),
                r.herald_probability.into(),
            ];
            if sampled {
                row.extend([
                    r.sampled.and_then(|s| s.gain).into(),
                    r.sampled.and_then(|s| s.gain_error).into(),
                ]);
            }
            row.extend([r.truncation_weight.into(), r.zero_herald.into()]);
            table.push(row)?;
        }
    }
    Ok(table)
}

/// One row per gain setting with the fitted visibility.
pub fn visibility_table(scans: &[FringeScan]) -> Result<Table> {
    let sampled = scans.iter().any(|s| s.sampled_counts.is_some());
    let mut headers = vec![
        "gain_setting",
        "phi",
        "bias_ratio",
        "visibility",
        "classical_bound",
        "herald_prob",
    ];
    if sampled {
        headers.push("sampled_visibility");
    }
    headers.push("visibility_err");
    if sampled {
        headers.push("sampled_visibility_err");
    }
    let mut table = Table::new(headers);
    for s in scans {
        let mut row: Vec<Cell> = vec![
            s.gain_setting.into(),
            s.phi.into(),
            s.bias_ratio.into(),
            s.visibility_fit.visibility.into(),
            s.classical_bound.into(),
            s.herald_probability.into(),
        ];
        if sampled {
            row.push(s.sampled_fit.map(|f| f.visibility).into());
        }
        row.push(s.visibility_fit.uncertainty.into());
        if sampled {
            row.push(s.sampled_fit.and_then(|f| f.uncertainty).into());
        }
        table.push(row)?;
    }
    Ok(table)
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    schema: &'static str,
    command: &'a str,
    config: &'a C,
    result: &'a R,
}

/// Pretty-printed `{schema, command, config, result}` document.
pub fn json_envelope<C: Serialize, R: Serialize>(
    command: &str,
    config: &C,
    result: &R,
) -> Result<String> {
    let doc = Envelope {
        schema: SCHEMA,
        command,
        config,
        result,
    };
    let mut s =
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Serialization(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
