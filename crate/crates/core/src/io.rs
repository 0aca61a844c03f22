//! Text and JSON formats for graphs, signals, ground truth and results.
//!
//! Edge lists are tab-separated `i  j  w` lines under a `#n=<N>` header;
//! coordinates are `i  x  y` lines. Signals and ground truth are CSV with a
//! header row. Results are versioned JSON.

use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle::OracleFixture;
use crate::sampler::{ModelConfig, PosteriorSummary};
use crate::synth::GroundTruth;

/// Version stamped into every JSON record written by this module.
pub const RECORD_VERSION: u32 = 1;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn field<T: std::str::FromStr>(
    source: &str,
    line: usize,
    name: &str,
    raw: Option<&str>,
) -> Result<T> {
    let raw = raw.ok_or_else(|| Error::parse(source, line, format!("missing field `{name}`")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::parse(source, line, format!("field `{name}` is not valid: {raw:?}")))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn format_edge_list(g: &Graph<f64>) -> String {
    let mut out = format!("#n={}\n", g.n());
    for (i, j, w) in g.edges() {
        out.push_str(&format!("{i}\t{j}\t{w}\n"));
    }
    out
}

/// Parses an edge list; `source` names the input in diagnostics.
pub fn parse_edge_list(text: &str, source: &str) -> Result<Graph<f64>> {
    let header = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or_else(|| Error::parse(source, 1, "empty file; expected `#n=<N>` header"))?;
    let n: usize = header
        .strip_prefix("#n=")
        .ok_or_else(|| Error::parse(source, 1, "expected `#n=<N>` header"))
        .and_then(|v| field(source, 1, "n", Some(v)))?;
    let mut edges = Vec::new();
    for (line, l) in data_lines(text) {
        let mut parts = l.split_whitespace();
        let i = field(source, line, "i", parts.next())?;
        let j = field(source, line, "j", parts.next())?;
        let w = field(source, line, "w", parts.next())?;
        if parts.next().is_some() {
            return Err(Error::parse(source, line, "expected three fields `i j w`"));
        }
        edges.push((i, j, w));
    }
    Graph::build(n, &edges)
}

pub fn format_coords(coords: &[[f64; 2]]) -> String {
    coords
        .iter()
        .enumerate()
        .map(|(i, [x, y])| format!("{i}\t{x}\t{y}\n"))
        .collect()
}

/// Parses a coordinates file covering nodes `0..n` in any order.
pub fn parse_coords(text: &str, source: &str) -> Result<Vec<[f64; 2]>> {
    let mut rows: Vec<(usize, [f64; 2])> = Vec::new();
    for (line, l) in data_lines(text) {
        let mut parts = l.split_whitespace();
        let i = field(source, line, "i", parts.next())?;
        let x = field(source, line, "x", parts.next())?;
        let y = field(source, line, "y", parts.next())?;
        rows.push((i, [x, y]));
    }
    rows.sort_by_key(|r| r.0);
    for (k, (i, _)) in rows.iter().enumerate() {
        if *i != k {
            return Err(Error::parse(
                source,
                0,
                format!("coordinates must cover nodes 0..{} exactly once", rows.len()),
            ));
        }
    }
    Ok(rows.into_iter().map(|r| r.1).collect())
}

pub fn read_graph(edges: &Path, coords: Option<&Path>) -> Result<Graph<f64>> {
    let g = parse_edge_list(&read(edges)?, &edges.display().to_string())?;
    match coords {
        Some(p) => g.with_coords(parse_coords(&read(p)?, &p.display().to_string())?),
        None => Ok(g),
    }
}

/// Writes the edge list, and the coordinates file when the graph has them.
pub fn write_graph(g: &Graph<f64>, edges: &Path, coords: Option<&Path>) -> Result<()> {
    write(edges, &format_edge_list(g))?;
    if let (Some(path), Some(c)) = (coords, g.coords()) {
        write(path, &format_coords(c))?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SignalRow {
    node: usize,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct TruthRow {
    node: usize,
    f: f64,
    y: f64,
    is_outlier: u8,
    injected_value: f64,
}

fn to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses CSV rows whose `node` column must run `0, 1, 2, ...`.
fn from_csv<R: DeserializeOwned>(text: &str, source: &str, node: fn(&R) -> usize) -> Result<Vec<R>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (k, rec) in reader.deserialize::<R>().enumerate() {
        let line = k + 2;
        let row = rec.map_err(|e| Error::parse(source, line, e.to_string()))?;
        if node(&row) != k {
            return Err(Error::parse(
                source,
                line,
                format!("field `node` must be {k}, found {}", node(&row)),
            ));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn format_signal(y: &[f64]) -> Result<String> {
    to_csv(y.iter().enumerate().map(|(node, &value)| SignalRow { node, value }))
}

pub fn parse_signal(text: &str, source: &str) -> Result<Vec<f64>> {
    let rows = from_csv(text, source, |r: &SignalRow| r.node)?;
    if rows.is_empty() {
        return Err(Error::parse(source, 1, "signal has no rows"));
    }
    Ok(rows.into_iter().map(|r| r.value).collect())
}

pub fn read_signal(path: &Path) -> Result<Vec<f64>> {
    parse_signal(&read(path)?, &path.display().to_string())
}

pub fn write_signal(y: &[f64], path: &Path) -> Result<()> {
    write(path, &format_signal(y)?)
}

pub fn format_ground_truth(t: &GroundTruth<f64>) -> Result<String> {
    to_csv((0..t.y.len()).map(|node| TruthRow {
        node,
        f: t.f[node],
        y: t.y[node],
        is_outlier: t.outlier_mask[node] as u8,
        injected_value: t.outlier_values[node],
    }))
}

/// Parses ground truth; the noise column is recovered as `y - f - injected`.
pub fn parse_ground_truth(text: &str, source: &str) -> Result<GroundTruth<f64>> {
    let rows = from_csv(text, source, |r: &TruthRow| r.node)?;
    for (k, r) in rows.iter().enumerate() {
        if r.is_outlier > 1 {
            return Err(Error::parse(source, k + 2, "field `is_outlier` must be 0 or 1"));
        }
    }
    Ok(GroundTruth {
        noise: rows.iter().map(|r| r.y - r.f - r.injected_value).collect(),
        f: rows.iter().map(|r| r.f).collect(),
        y: rows.iter().map(|r| r.y).collect(),
        outlier_mask: rows.iter().map(|r| r.is_outlier == 1).collect(),
        outlier_values: rows.iter().map(|r| r.injected_value).collect(),
    })
}

pub fn write_ground_truth(t: &GroundTruth<f64>, path: &Path) -> Result<()> {
    write(path, &format_ground_truth(t)?)
}

pub fn read_ground_truth(path: &Path) -> Result<GroundTruth<f64>> {
    parse_ground_truth(&read(path)?, &path.display().to_string())
}

/// Output of a single detection run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub version: u32,
    pub p_outlier: Vec<f64>,
    pub classified: Vec<bool>,
    pub f_mean: Vec<f64>,
    pub tau_mean: f64,
    pub gamma_mean: f64,
    pub tau_delta: f64,
    pub n_kept: usize,
    pub threshold: f64,
    pub seed: u64,
    pub config: ModelConfig,
    pub warnings: Vec<String>,
}

impl DetectionRecord {
    pub fn new(summary: &PosteriorSummary<f64>, config: &ModelConfig) -> Self {
        Self {
            version: RECORD_VERSION,
            p_outlier: summary.p_outlier.clone(),
            classified: summary.classified.clone(),
            f_mean: summary.f_mean.clone(),
            tau_mean: summary.tau_mean,
            gamma_mean: summary.gamma_mean,
            tau_delta: summary.tau_delta,
            n_kept: summary.n_kept,
            threshold: summary.threshold,
            seed: summary.seed,
            config: config.clone(),
            warnings: summary.warnings.clone(),
        }
    }
}

pub fn to_json<R: Serialize>(record: &R) -> Result<String> {
    let mut s = serde_json::to_string_pretty(record)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<R: Serialize>(record: &R, path: &Path) -> Result<()> {
    write(path, &to_json(record)?)
}

pub fn read_json<R: DeserializeOwned>(path: &Path) -> Result<R> {
    Ok(serde_json::from_str(&read(path)?)?)
}

/// Loads an oracle fixture and checks its version.
pub fn read_fixture(path: &Path) -> Result<OracleFixture> {
    let fx: OracleFixture = read_json(path)?;
    if fx.version != crate::oracle::FIXTURE_VERSION {
        return Err(Error::parse(
            path.display().to_string(),
            0,
            format!("fixture version {} is not supported", fx.version),
        ));
    }
    Ok(fx)
}

pub fn write_text(text: &str, path: &Path) -> Result<()> {
    write(path, text)
}
