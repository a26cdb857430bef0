//! CSV and JSON writers for sample batches, density curves and walk batches.
//!
//! Numbers use Rust's shortest round-trip formatting; every CSV has a header.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::closed_form::{DensityCurve, LawSpec};
use crate::error::Result;
use crate::sampler::{Batch, SampleLaw};
use crate::scalar::Real;
use crate::spider::{last_zero_fraction, SpiderConfig, StopBatch, Stopped};

/// JSON sidecar written next to a sample CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSidecar {
    pub law: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub stream_count: u64,
    pub n_samples: usize,
    pub redraw_count: u64,
}

impl BatchSidecar {
    pub fn from_batch(batch: &Batch) -> Self {
        let mut parameters: BTreeMap<String, Value> = match serde_json::to_value(batch.law) {
            Ok(Value::Object(map)) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        let law = parameters
            .remove("law")
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        Self {
            law,
            parameters,
            seed: batch.seed,
            stream_count: batch.stream_count,
            n_samples: batch.n_samples(),
            redraw_count: batch.redraw_count,
        }
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// One row per draw, one column per coordinate.
pub fn write_batch_csv(batch: &Batch, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(batch.law.columns())?;
    for row in batch.rows() {
        w.write_record(row.iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_batch_sidecar(batch: &Batch, path: &Path) -> Result<()> {
    write_json(&BatchSidecar::from_batch(batch), path)
}

/// Parses a sample CSV back; used by tests and downstream tools.
pub fn read_batch_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| crate::Error::Usage(format!("bad number {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Sidecar describing a density curve CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSidecar {
    pub law: LawSpec,
    pub label: String,
    pub interior_points: usize,
    pub columns: [String; 3],
}

/// Columns `z, pdf, cdf`; `pdf` is empty at the two endpoints.
pub fn write_curve_csv<T: Real>(curve: &DensityCurve<T>, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["z", "pdf", "cdf"])?;
    for ((x, p), c) in curve.grid.iter().zip(&curve.pdf).zip(&curve.cdf) {
        let p = p.map(|p| p.to_string()).unwrap_or_default();
        w.write_record([x.to_string(), p, c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve_sidecar<T: Real>(curve: &DensityCurve<T>, path: &Path) -> Result<()> {
    write_json(
        &CurveSidecar {
            law: curve.law,
            label: curve.law.label(),
            interior_points: curve.grid.len() - 2,
            columns: ["z".into(), "pdf".into(), "cdf".into()],
        },
        path,
    )
}

/// Per-path CSV of a stopped batch.
///
/// Columns: `path_id`, `frac_1..frac_n`, `zero_visits`, `last_zero_fraction`,
/// `stopped_step`, `discarded`. Fractions are empty for discarded paths.
pub fn write_stop_batch_csv(config: &SpiderConfig, batch: &StopBatch, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["path_id".to_string()];
    header.extend((1..=config.n).map(|j| format!("frac_{j}")));
    header.extend(["zero_visits", "last_zero_fraction", "stopped_step", "discarded"].map(String::from));
    w.write_record(&header)?;
    for (i, p) in batch.paths.iter().enumerate() {
        let s = p.summary();
        let mut rec = vec![i.to_string()];
        match p {
            Stopped::Hit { fractions, .. } => rec.extend(fractions.as_slice().iter().map(f64::to_string)),
            Stopped::Discarded { .. } => rec.extend((0..config.n).map(|_| String::new())),
        }
        rec.push(s.zero_visits.to_string());
        rec.push(last_zero_fraction(s).to_string());
        rec.push(s.steps().to_string());
        rec.push(u8::from(p.is_discarded()).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Column names a sample CSV will carry, for callers that stream rows.
pub fn batch_header(law: &SampleLaw) -> Vec<String> {
    law.columns()
}
