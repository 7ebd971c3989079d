//! CSV and JSON report writers.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{BenchError, Result};

/// Header of [`emit_table`].
pub const TABLE_HEADER: [&str; 5] = ["estimator", "n", "mise", "stderr", "seed"];

/// `printf("%.6e")`: six fraction digits and a signed, two-digit exponent.
pub fn fmt_e(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.6e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub estimator: String,
    pub n: usize,
    pub mise: f64,
    pub stderr: f64,
    pub seed: u64,
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// `estimator,n,mise,stderr,seed` with `%.6e` numbers.
pub fn emit_table(rows: &[TableRow]) -> String {
    csv_string(
        &TABLE_HEADER,
        rows.iter().map(|r| vec![r.estimator.clone(), r.n.to_string(), fmt_e(r.mise), fmt_e(r.stderr), r.seed.to_string()]),
    )
}

/// `(x, y[, z])` triples; the header has as many columns as the first point.
pub fn emit_plot_data(points: &[Vec<f64>]) -> String {
    let width = points.first().map_or(2, Vec::len).clamp(2, 3);
    let header = &["x", "y", "z"][..width];
    csv_string(header, points.iter().map(|p| p.iter().take(width).map(|v| fmt_e(*v)).collect()))
}

/// Generic CSV with `%.6e` numbers.
pub fn emit_numeric_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    csv_string(header, rows.iter().map(|r| r.iter().map(|v| fmt_e(*v)).collect()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| BenchError::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| BenchError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| BenchError::Json { path: path.to_path_buf(), source })?;
    text.push('\n');
    write_text(path, &text)
}

/// Parses a table written by [`emit_table`].
pub fn parse_table(text: &str) -> Result<Vec<TableRow>> {
    let path = Path::new("<table>");
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|source| BenchError::Csv { path: path.into(), source })?.clone();
    if header.iter().ne(TABLE_HEADER) {
        return Err(BenchError::Parse { path: path.into(), line: 1, message: format!("unexpected header {header:?}") });
    }
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|source| BenchError::Csv { path: path.into(), source })?;
        let bad = |m: String| BenchError::Parse { path: path.into(), line: k + 2, message: m };
        let num = |i: usize| rec[i].parse::<f64>().map_err(|e| bad(format!("{}: {e}", &rec[i])));
        rows.push(TableRow {
            estimator: rec[0].to_string(),
            n: rec[1].parse().map_err(|e| bad(format!("n: {e}")))?,
            mise: num(2)?,
            stderr: num(3)?,
            seed: rec[4].parse().map_err(|e| bad(format!("seed: {e}")))?,
        });
    }
    Ok(rows)
}
