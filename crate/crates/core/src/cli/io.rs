//! CSV and JSON artifacts. Floats are written in shortest round-trip form, so
//! reading a file back reproduces the written values exactly.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::LabeledSeries;
use crate::measures::Stream;

/// Prices with the timestamp text exactly as read or written.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    pub timestamps: Vec<String>,
    pub stream: Stream,
}

impl PriceTable {
    /// Integer timestamps `0..N`.
    pub fn indexed(stream: Stream) -> Self {
        PriceTable {
            timestamps: (0..stream.len()).map(|t| t.to_string()).collect(),
            stream,
        }
    }
}

/// Integer index, RFC 3339, `YYYY-MM-DD[ T]HH:MM:SS[.f]` or `YYYY-MM-DD`.
/// Dates become seconds since the Unix epoch.
pub fn parse_timestamp(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(i) = s.parse::<i64>() {
        return Some(i as f64);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp() as f64 + f64::from(dt.timestamp_subsec_nanos()) * 1e-9);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            let utc = dt.and_utc();
            return Some(utc.timestamp() as f64 + f64::from(utc.timestamp_subsec_nanos()) * 1e-9);
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|dt| dt.and_utc().timestamp() as f64)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::format(path, e.to_string())
}

fn reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes)
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn check_header(path: &Path, found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    if found.iter().ne(expected.iter().copied()) {
        return Err(Error::format(
            path,
            format!("expected header '{}', found '{}'", expected.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(())
}

pub fn prices_csv(table: &PriceTable) -> Result<Vec<u8>> {
    let d = table.stream.dim();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["timestamp".to_string()];
    header.extend((0..d).map(|j| format!("c{j}")));
    w.write_record(&header).map_err(|e| csv_error(Path::new("<prices>"), e))?;
    for (t, ts) in table.timestamps.iter().enumerate() {
        let mut rec = vec![ts.clone()];
        rec.extend(table.stream.row(t).iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(|e| csv_error(Path::new("<prices>"), e))?;
    }
    w.into_inner().map_err(|e| Error::Contract(e.to_string()))
}

pub fn parse_prices(bytes: &[u8], path: &Path) -> Result<PriceTable> {
    let mut r = reader(bytes);
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    let d = header.len().saturating_sub(1);
    let expected: Vec<String> = std::iter::once("timestamp".to_string())
        .chain((0..d).map(|j| format!("c{j}")))
        .collect();
    if d == 0 || header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::format(
            path,
            format!("expected header 'timestamp,c0,...', found '{}'", header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut timestamps = Vec::new();
    let mut numeric = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = i + 2;
        if rec.len() != d + 1 {
            return Err(Error::format(path, format!("line {line}: expected {} fields, found {}", d + 1, rec.len())));
        }
        let ts = &rec[0];
        numeric.push(
            parse_timestamp(ts)
                .ok_or_else(|| Error::format(path, format!("line {line}: unrecognized timestamp '{ts}'")))?,
        );
        timestamps.push(ts.to_string());
        for field in rec.iter().skip(1) {
            values.push(
                field
                    .parse::<f64>()
                    .map_err(|_| Error::format(path, format!("line {line}: bad price '{field}'")))?,
            );
        }
    }
    let stream = Stream::new(values, d, Some(numeric)).map_err(|e| Error::format(path, e.to_string()))?;
    Ok(PriceTable { timestamps, stream })
}

pub fn read_prices(path: &Path) -> Result<PriceTable> {
    parse_prices(&read_file(path)?, path)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRow {
    pub timestamp: String,
    pub regime: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub timestamp: String,
    pub label: Option<usize>,
    pub votes_for: u32,
    pub votes_total: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub run: usize,
    pub iteration: usize,
    pub mean_sq_point_centroid: f64,
    pub mean_centroid_centroid: f64,
    pub centroid_shift: f64,
    pub assignments_changed: usize,
}

/// One sweep cell. Accuracy fields are empty when the cell failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h1: usize,
    pub h2: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub n_runs: usize,
    pub ta_median: Option<f64>,
    pub ta_max: Option<f64>,
    pub ta_metric_selected: Option<f64>,
}

pub const TRUTH_HEADER: &[&str] = &["timestamp", "regime"];
pub const LABELS_HEADER: &[&str] = &["timestamp", "label", "votes_for", "votes_total"];
pub const DIAGNOSTICS_HEADER: &[&str] = &[
    "run",
    "iteration",
    "mean_sq_point_centroid",
    "mean_centroid_centroid",
    "centroid_shift",
    "assignments_changed",
];
pub const SWEEP_HEADER: &[&str] = &["h1", "h2", "L", "K", "n_runs", "ta_median", "ta_max", "ta_metric_selected"];

/// Serializes rows under `header`; the header is written even for no rows.
pub fn rows_csv<T: Serialize>(header: &[&str], rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let fail = |e: csv::Error| Error::Contract(format!("csv serialization failed: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.serialize(row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Error::Contract(e.to_string()))
}

pub fn parse_rows<T: DeserializeOwned>(bytes: &[u8], path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let mut r = reader(bytes);
    check_header(path, r.headers().map_err(|e| csv_error(path, e))?, header)?;
    r.deserialize().map(|row| row.map_err(|e| csv_error(path, e))).collect()
}

pub fn read_rows<T: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    parse_rows(&read_file(path)?, path, header)
}

pub fn truth_rows(timestamps: &[String], truth: &[usize]) -> Vec<TruthRow> {
    timestamps
        .iter()
        .zip(truth)
        .map(|(t, &regime)| TruthRow {
            timestamp: t.clone(),
            regime,
        })
        .collect()
}

/// Truth aligned with `table`, one regime per observation.
pub fn read_truth(path: &Path, table: &PriceTable) -> Result<Vec<usize>> {
    let rows: Vec<TruthRow> = read_rows(path, TRUTH_HEADER)?;
    if rows.len() != table.timestamps.len() {
        return Err(Error::format(
            path,
            format!("{} truth rows for {} price rows", rows.len(), table.timestamps.len()),
        ));
    }
    let stamps = table.stream.timestamps().expect("csv streams carry timestamps");
    for (i, row) in rows.iter().enumerate() {
        if parse_timestamp(&row.timestamp) != Some(stamps[i]) {
            return Err(Error::format(
                path,
                format!("line {}: timestamp '{}' does not match prices ('{}')", i + 2, row.timestamp, table.timestamps[i]),
            ));
        }
    }
    Ok(rows.into_iter().map(|r| r.regime).collect())
}

/// Labels for return points; return `i` is stamped with observation `i + 1`.
pub fn label_rows(timestamps: &[String], labels: &LabeledSeries) -> Vec<LabelRow> {
    (0..labels.len())
        .map(|i| LabelRow {
            timestamp: timestamps[i + 1].clone(),
            label: labels.labels[i],
            votes_for: labels.votes_for[i],
            votes_total: labels.coverage[i],
        })
        .collect()
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value).map_err(|e| Error::Contract(e.to_string()))?;
    v.push(b'\n');
    Ok(v)
}

/// Writes every file into `dir`, or none of them. Files are staged under
/// temporary names and renamed once all writes succeed; on failure the staged
/// files, and the directory if it was created here, are removed.
pub fn write_bundle(dir: &Path, files: &[(&str, Vec<u8>)]) -> Result<()> {
    let created = !dir.exists();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let staged: Vec<PathBuf> = files.iter().map(|(name, _)| dir.join(format!(".{name}.partial"))).collect();
    let cleanup = |upto: usize| {
        for p in &staged[..upto] {
            let _ = fs::remove_file(p);
        }
        if created {
            let _ = fs::remove_dir(dir);
        }
    };
    for (i, (_, bytes)) in files.iter().enumerate() {
        if let Err(e) = fs::write(&staged[i], bytes) {
            cleanup(i + 1);
            return Err(Error::io(&staged[i], e));
        }
    }
    for (i, (name, _)) in files.iter().enumerate() {
        let target = dir.join(name);
        if let Err(e) = fs::rename(&staged[i], &target) {
            cleanup(files.len());
            return Err(Error::io(target, e));
        }
    }
    Ok(())
}
