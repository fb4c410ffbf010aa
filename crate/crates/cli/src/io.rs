//! Flat-file input and output.

use std::fs;
use std::path::Path;

use serde::Serialize;
use tcross::montecarlo::ReplicateRecord;

use crate::error::{CliError, CliResult};

/// `x` with `digits` significant digits, in plain notation for moderate
/// magnitudes and scientific notation otherwise.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        let decimals = (digits as i32 - 1 - e).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

fn ensure_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|e| CliError::io("cannot create directory", dir, e))
        }
        _ => Ok(()),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(format!("json: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io("cannot write", path, e))
}

pub fn records_to_csv(records: &[ReplicateRecord]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| CliError::Numerical(format!("csv: {e}")))?;
    }
    if records.is_empty() {
        w.write_record(["replicate", "rho", "window_area", "z", "edge_length", "cell_count", "seed", "millis"])
            .map_err(|e| CliError::Numerical(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| CliError::Numerical(format!("csv: {e}")))
}

pub fn write_records(path: &Path, records: &[ReplicateRecord]) -> CliResult<()> {
    ensure_parent(path)?;
    let bytes = records_to_csv(records)?;
    fs::write(path, bytes).map_err(|e| CliError::io("cannot write", path, e))
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io("cannot read", path, e))
}

/// Replicate records as written by `simulate`.
pub fn read_records(path: &Path) -> CliResult<Vec<ReplicateRecord>> {
    let text = read_text(path)?;
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in rd.deserialize().enumerate() {
        let r: ReplicateRecord =
            row.map_err(|e| CliError::Input(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        out.push(r);
    }
    Ok(out)
}

/// `(window_area, z)` pairs from a CSV with (at least) those two columns.
/// Rows are numbered from 1 after the header.
pub fn parse_sample(text: &str) -> CliResult<Vec<(f64, f64)>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rd.headers().map_err(|e| CliError::Input(format!("bad header: {e}")))?.clone();
    if headers.is_empty() {
        return Err(CliError::Input("empty sample file".into()));
    }
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Input(format!("missing column `{name}`")))
    };
    let (ia, iz) = (col("window_area")?, col("z")?);
    let mut out = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let n = i + 1;
        let row = row.map_err(|e| CliError::Input(format!("row {n}: {e}")))?;
        let field = |j: usize, name: &str| -> CliResult<f64> {
            let s = row.get(j).ok_or_else(|| CliError::Input(format!("row {n}: missing `{name}`")))?;
            s.parse::<f64>().map_err(|_| CliError::Input(format!("row {n}: `{name}` is not a number: {s:?}")))
        };
        let (a, z) = (field(ia, "window_area")?, field(iz, "z")?);
        if !(a > 0.0) || !a.is_finite() {
            return Err(CliError::Input(format!("row {n}: window_area must be positive, got {a}")));
        }
        if !(z >= 0.0) || !z.is_finite() {
            return Err(CliError::Input(format!("row {n}: z must be non-negative, got {z}")));
        }
        out.push((a, z));
    }
    Ok(out)
}

pub fn read_sample(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let text = read_text(path)?;
    parse_sample(&text).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}
