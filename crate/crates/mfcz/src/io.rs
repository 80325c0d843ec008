//! File formats: the `x,re,im` signal CSV, the `k,v1[,v2,…]` sequence CSV,
//! the decomposition JSON, and the scan CSV / fit JSON pair.
//!
//! All writers are deterministic: fixed column order, fixed float formatting
//! (shortest round-trippable via Ryu, as emitted by the csv and serde_json
//! crates), no timestamps.

use num_complex::Complex64;
use serde::Serialize;
use std::io::Write as _;
use std::path::Path;

use crate::czdecomp::CzOutput;
use crate::grid::SampledSignal;
use crate::multifreq::{ScanRecord, ScanSummary};
use crate::variation::VectorSequence;
use crate::{Error, Result};

/// Relative tolerance for uniform grid spacing in signal files.
pub const SPACING_TOL: f64 = 1e-9;

fn malformed(row: usize, message: impl Into<String>) -> Error {
    Error::Malformed {
        row,
        message: message.into(),
    }
}

fn parse_field(row: usize, name: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| malformed(row, format!("cannot parse {name} value {s:?}")))
}

/// Read a signal from CSV with header `x,re,im`; x must be strictly
/// increasing and equispaced to `SPACING_TOL` relative.
pub fn read_signal_csv(path: &Path) -> Result<SampledSignal> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    {
        let headers = rdr.headers().map_err(|e| malformed(1, e.to_string()))?;
        let want = ["x", "re", "im"];
        let got: Vec<&str> = headers.iter().collect();
        if got != want {
            return Err(malformed(1, format!("expected header x,re,im, got {got:?}")));
        }
    }
    let mut xs = Vec::new();
    let mut samples = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2; // 1-based, after the header
        let record = record.map_err(|e| malformed(row, e.to_string()))?;
        if record.len() != 3 {
            return Err(malformed(row, format!("expected 3 fields, got {}", record.len())));
        }
        let x = parse_field(row, "x", &record[0])?;
        let re = parse_field(row, "re", &record[1])?;
        let im = parse_field(row, "im", &record[2])?;
        if !(x.is_finite() && re.is_finite() && im.is_finite()) {
            return Err(malformed(row, "non-finite value"));
        }
        if let Some(&prev) = xs.last() {
            if x <= prev {
                return Err(malformed(row, format!("x not strictly increasing: {prev} then {x}")));
            }
        }
        xs.push(x);
        samples.push(Complex64::new(re, im));
    }
    if xs.len() < 2 {
        return Err(malformed(xs.len() + 1, "need at least 2 samples"));
    }
    let dx = xs[1] - xs[0];
    for (i, w) in xs.windows(2).enumerate() {
        let step = w[1] - w[0];
        if (step - dx).abs() > SPACING_TOL * dx.abs().max(1.0) {
            return Err(malformed(
                i + 3,
                format!("non-uniform spacing: step {step} vs {dx}"),
            ));
        }
    }
    SampledSignal::new(samples, xs[0], dx)
}

pub fn write_signal_csv(path: &Path, f: &SampledSignal) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "re", "im"])?;
    for i in 0..f.len() {
        let s = f.samples()[i];
        w.write_record([
            format!("{}", f.point(i)),
            format!("{}", s.re),
            format!("{}", s.im),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a sequence from CSV with header `k,v1,v2,…`. Value columns come in
/// re/im pairs, two per complex component, so a ℂ^d sequence has 2d value
/// columns.
pub fn read_sequence_csv(path: &Path) -> Result<VectorSequence> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let ncols = {
        let headers = rdr.headers().map_err(|e| malformed(1, e.to_string()))?;
        if headers.get(0) != Some("k") {
            return Err(malformed(1, "expected first header column `k`"));
        }
        headers.len()
    };
    if ncols < 3 || (ncols - 1) % 2 != 0 {
        return Err(malformed(
            1,
            format!("expected k plus re/im column pairs, got {ncols} columns"),
        ));
    }
    let dim = (ncols - 1) / 2;
    let mut keys = Vec::new();
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| malformed(row, e.to_string()))?;
        if record.len() != ncols {
            return Err(malformed(row, format!("expected {ncols} fields, got {}", record.len())));
        }
        let k: i64 = record[0]
            .trim()
            .parse()
            .map_err(|_| malformed(row, format!("cannot parse key {:?}", &record[0])))?;
        let mut v = Vec::with_capacity(dim);
        for c in 0..dim {
            let re = parse_field(row, "re", &record[1 + 2 * c])?;
            let im = parse_field(row, "im", &record[2 + 2 * c])?;
            v.push(Complex64::new(re, im));
        }
        keys.push(k);
        values.push(v);
    }
    VectorSequence::new(keys, values)
}

pub fn write_sequence_csv(path: &Path, s: &VectorSequence) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["k".to_string()];
    for c in 1..=s.dim() {
        header.push(format!("v{}", 2 * c - 1));
        header.push(format!("v{}", 2 * c));
    }
    w.write_record(&header)?;
    for pos in 0..s.len() {
        let mut rec = vec![format!("{}", s.keys()[pos])];
        for z in s.value(pos) {
            rec.push(format!("{}", z.re));
            rec.push(format!("{}", z.im));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct IntervalJson {
    a: f64,
    b: f64,
    regularized: bool,
}

#[derive(Serialize)]
struct CzJson<'a> {
    lambda: f64,
    #[serde(rename = "N")]
    n: usize,
    xi: &'a [f64],
    #[serde(rename = "E_measure")]
    e_measure: f64,
    intervals: Vec<IntervalJson>,
    diagnostics: &'a crate::czdecomp::CzDiagnostics,
}

/// Serialize a decomposition to its JSON schema.
pub fn cz_output_json(out: &CzOutput) -> Result<String> {
    let doc = CzJson {
        lambda: out.lambda,
        n: out.xi.len(),
        xi: out.xi.values(),
        e_measure: out.e.measure(),
        intervals: out
            .pieces
            .iter()
            .map(|p| IntervalJson {
                a: p.interval.a,
                b: p.interval.b,
                regularized: p.regularized,
            })
            .collect(),
        diagnostics: &out.diagnostics,
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn write_scan_csv(path: &Path, records: &[ScanRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn scan_summary_json(summary: &ScanSummary) -> Result<String> {
    Ok(serde_json::to_string_pretty(summary)?)
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}
