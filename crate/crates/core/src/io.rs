//! Dataset and chain files. Every writer goes through a temporary file in
//! the target directory and an atomic rename, so a failed run never leaves
//! a partial artifact behind.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::copula::CopulaFamily;
use crate::error::{Error, Result};
use crate::inference::{param_names, Chain};
use crate::joint_model::{Dataset, ModelParams};

/// Unit of angles in a dataset file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Radians,
    Degrees,
}

impl AngleUnit {
    pub fn to_radians(self, v: f64) -> f64 {
        match self {
            AngleUnit::Radians => v,
            AngleUnit::Degrees => v.to_radians(),
        }
    }

    pub fn from_radians(self, v: f64) -> f64 {
        match self {
            AngleUnit::Radians => v,
            AngleUnit::Degrees => v.to_degrees(),
        }
    }
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_cell(s: &str, line: u64, col: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| {
        Error::Data(format!("line {line}, column {}: '{s}' is not a number", col + 1))
    })
}

/// Reads a CSV dataset with a header row; values are converted from
/// `unit` to radians once, here.
pub fn read_dataset(path: &Path, unit: AngleUnit) -> Result<Dataset> {
    let text = read_text(path)?;
    parse_dataset(&text, unit)
}

pub fn parse_dataset(text: &str, unit: AngleUnit) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let labels: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let m = labels.len();
    let mut values = Vec::new();
    let mut n = 0;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != m {
            return Err(Error::Data(format!(
                "line {line}: expected {m} fields, found {}",
                record.len()
            )));
        }
        for (col, cell) in record.iter().enumerate() {
            values.push(unit.to_radians(parse_cell(cell, line, col)?));
        }
        n += 1;
    }
    Dataset::new(n, m, values)?.with_labels(labels)
}

/// CSV text of a dataset with header `theta_1,…,theta_m`.
pub fn format_dataset(data: &Dataset, unit: AngleUnit) -> String {
    let mut out = (1..=data.n_cols())
        .map(|j| format!("theta_{j}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for row in data.rows() {
        let cells: Vec<String> = row.iter().map(|&v| unit.from_radians(v).to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_dataset(path: &Path, data: &Dataset, unit: AngleUnit) -> Result<()> {
    write_atomic(path, format_dataset(data, unit).as_bytes())
}

/// CSV text of a chain: `iteration` followed by the parameter columns.
pub fn format_chain(chain: &Chain) -> String {
    let mut out = String::from("iteration,");
    out.push_str(&chain.param_names().join(","));
    out.push('\n');
    for (it, draw) in chain.iterations().iter().zip(chain.draws()) {
        out.push_str(&it.to_string());
        for v in draw.to_flat() {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn write_chain(path: &Path, chain: &Chain) -> Result<()> {
    write_atomic(path, format_chain(chain).as_bytes())
}

pub fn read_chain(path: &Path) -> Result<Chain> {
    parse_chain(&read_text(path)?)
}

/// Parses chain CSV; the family and dimension are inferred from the header.
pub fn parse_chain(text: &str) -> Result<Chain> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.first().map(String::as_str) != Some("iteration") {
        return Err(Error::Data("chain CSV must start with an 'iteration' column".into()));
    }
    let family = if header.last().map(String::as_str) == Some("nu") {
        CopulaFamily::StudentT
    } else {
        CopulaFamily::Gaussian
    };
    let m = header.iter().filter(|h| h.starts_with("beta_")).count();
    if m < 2 || header[1..] != param_names(m, family)[..] {
        return Err(Error::Data(format!(
            "chain CSV header does not match any model layout: {}",
            header.join(",")
        )));
    }
    let mut draws = Vec::new();
    let mut iterations = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let it = record[0].trim().parse::<usize>().map_err(|_| {
            Error::Data(format!("line {line}: bad iteration '{}'", &record[0]))
        })?;
        let values = record
            .iter()
            .enumerate()
            .skip(1)
            .map(|(col, s)| parse_cell(s, line, col))
            .collect::<Result<Vec<_>>>()?;
        let draw = ModelParams::from_flat(m, family, &values)
            .map_err(|e| Error::Data(format!("line {line}: {e}")))?;
        draws.push(draw);
        iterations.push(it);
    }
    Chain::from_draws(draws, iterations)
}

/// `key = value` metadata lines for a fitted chain.
pub fn format_chain_meta(chain: &Chain, extra: &[(&str, String)]) -> String {
    let mut lines = vec![
        format!("stage = {}", chain.stage()),
        format!("family = {}", chain.family()),
        format!("dim = {}", chain.dim()),
        format!("draws = {}", chain.len()),
    ];
    if let Some(c) = chain.config() {
        lines.push(format!("seed = {}", c.seed));
        lines.push(format!(
            "mcmc = {}",
            serde_json::to_string(c).expect("config serializes")
        ));
    }
    for a in chain.acceptance() {
        lines.push(format!("acceptance_{} = {}", a.block, a.rate));
    }
    for (k, v) in extra {
        lines.push(format!("{k} = {v}"));
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}
