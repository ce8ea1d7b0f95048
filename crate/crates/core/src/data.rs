//! CSV ingestion, summary statistics, missing-value handling, min-max
//! scaling, chronological train/test splitting, and sliding-window
//! construction for supervised learning.

use std::path::Path;

use chrono::{DateTime, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Header names recognized as the timestamp column, checked case-insensitively.
/// Falls back to the first column when none matches.
const TIMESTAMP_NAMES: &[&str] = &["time", "timestamp", "datetime", "date", "utc_timestamp"];

/// Index of the header treated as the timestamp column: the first
/// case-insensitive match of a known name, else the first column.
pub fn timestamp_column_index<S: AsRef<str>>(headers: &[S]) -> usize {
    headers
        .iter()
        .position(|h| TIMESTAMP_NAMES.contains(&h.as_ref().to_lowercase().as_str()))
        .unwrap_or(0)
}

/// A parsed time-series table: one shared hourly timestamp axis plus named
/// value columns. Cells that were empty or unparseable are `None`.
#[derive(Debug, Clone)]
pub struct TimeSeriesTable {
    timestamps: Vec<DateTime<Utc>>,
    columns: Vec<(String, Vec<Option<f64>>)>,
}

impl TimeSeriesTable {
    /// Builds a table, validating that timestamps are strictly increasing and
    /// every column matches the timestamp axis in length.
    pub fn new(
        timestamps: Vec<DateTime<Utc>>,
        columns: Vec<(String, Vec<Option<f64>>)>,
    ) -> Result<Self> {
        if timestamps.is_empty() {
            return Err(Error::invalid("table has zero data rows"));
        }
        for pair in timestamps.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::invalid(format!(
                    "timestamps not strictly increasing: {} followed by {}",
                    pair[0], pair[1]
                )));
            }
        }
        for (name, values) in &columns {
            if values.len() != timestamps.len() {
                return Err(Error::invalid(format!(
                    "column {:?} has {} entries for {} timestamps",
                    name,
                    values.len(),
                    timestamps.len()
                )));
            }
        }
        Ok(Self {
            timestamps,
            columns,
        })
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn timestamps(&self) -> &[DateTime<Utc>] {
        &self.timestamps
    }

    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }
}

/// A gap-free load series in MWh on an hourly (strictly increasing) axis.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadSeries {
    timestamps: Vec<DateTime<Utc>>,
    values: Vec<f64>,
}

impl LoadSeries {
    pub fn new(timestamps: Vec<DateTime<Utc>>, values: Vec<f64>) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} timestamps for {} values",
                timestamps.len(),
                values.len()
            )));
        }
        if values.len() < 2 {
            return Err(Error::invalid("load series needs at least 2 points"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite load value {v}")));
        }
        for pair in timestamps.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::invalid(format!(
                    "timestamps not strictly increasing: {} followed by {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self { timestamps, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamps(&self) -> &[DateTime<Utc>] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Summary of one column; statistics cover non-missing entries only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    #[serde(rename = "valid")]
    pub valid_count: usize,
    #[serde(rename = "missing")]
    pub missing_count: usize,
    pub mean: f64,
    /// Sample standard deviation (n-1 denominator); 0 for a single value.
    #[serde(rename = "std")]
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

/// Min-max scaler bounds, fit on training data only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub min: f64,
    pub max: f64,
}

/// Supervised sliding-window pairs in scaled space: each row of `inputs`
/// holds the `lookback` values immediately preceding its target.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    inputs: Vec<f64>,
    targets: Vec<f64>,
    lookback: usize,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn lookback(&self) -> usize {
        self.lookback
    }

    pub fn input_row(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.lookback..(i + 1) * self.lookback]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// A view of the dataset restricted to rows `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> WindowedDataset {
        WindowedDataset {
            inputs: self.inputs[start * self.lookback..end * self.lookback].to_vec(),
            targets: self.targets[start..end].to_vec(),
            lookback: self.lookback,
        }
    }
}

fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    let s = raw.trim();
    if s.is_empty() {
        return None;
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc));
    }
    if let Ok(dt) = DateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S%#z") {
        return Some(dt.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(Utc.from_utc_datetime(&naive));
        }
    }
    None
}

fn parse_cell(raw: &str) -> Option<f64> {
    raw.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads the header row of a CSV file.
pub fn csv_headers(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => {
            let io = std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string());
            Error::io(path, io)
        }
        _ => Error::Csv(e),
    })?;
    let headers = reader.headers()?;
    Ok(headers.iter().map(|h| h.trim().to_string()).collect())
}

/// Loads the requested columns from an hourly CSV file.
///
/// The timestamp column is found by name (`time`, `timestamp`, ...) or
/// defaults to the first column. Timestamps are parsed to UTC and must be
/// strictly increasing in file order. Empty or unparseable value cells
/// become missing entries.
pub fn load_csv<S: AsRef<str>>(
    path: impl AsRef<Path>,
    column_names: &[S],
) -> Result<TimeSeriesTable> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => {
            let io = std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string());
            Error::io(path, io)
        }
        _ => Error::Csv(e),
    })?;

    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let ts_idx = timestamp_column_index(&headers);

    let mut col_indices = Vec::with_capacity(column_names.len());
    for name in column_names {
        let name = name.as_ref();
        let idx = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        col_indices.push((name.to_string(), idx));
    }

    let mut timestamps = Vec::new();
    let mut columns: Vec<(String, Vec<Option<f64>>)> = col_indices
        .iter()
        .map(|(name, _)| (name.clone(), Vec::new()))
        .collect();

    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        let raw_ts = record.get(ts_idx).unwrap_or("");
        let ts = parse_timestamp(raw_ts).ok_or_else(|| {
            Error::invalid(format!(
                "row {}: unparseable timestamp {:?}",
                row_no + 2,
                raw_ts
            ))
        })?;
        timestamps.push(ts);
        for (slot, (_, idx)) in columns.iter_mut().zip(&col_indices) {
            slot.1.push(record.get(*idx).and_then(parse_cell));
        }
    }

    TimeSeriesTable::new(timestamps, columns)
}

/// Summary statistics over the non-missing entries of a column.
pub fn summarize(column: &[Option<f64>]) -> Result<SummaryStats> {
    if column.is_empty() {
        return Err(Error::invalid("cannot summarize an empty column"));
    }
    let present: Vec<f64> = column.iter().filter_map(|v| *v).collect();
    let missing_count = column.len() - present.len();
    if present.is_empty() {
        return Err(Error::invalid("all values missing"));
    }
    let n = present.len() as f64;
    let mean = present.iter().sum::<f64>() / n;
    let std_dev = if present.len() < 2 {
        0.0
    } else {
        let ss = present.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        (ss / (n - 1.0)).sqrt()
    };
    let min = present.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = present.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(SummaryStats {
        valid_count: present.len(),
        missing_count,
        mean,
        std_dev,
        min,
        max,
    })
}

/// Drops missing rows of `column`, keeping (timestamp, value) pairs in order.
pub fn drop_missing(table: &TimeSeriesTable, column: &str) -> Result<LoadSeries> {
    let values = table
        .column(column)
        .ok_or_else(|| Error::MissingColumn(column.to_string()))?;
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for (t, v) in table.timestamps().iter().zip(values) {
        if let Some(v) = v {
            ts.push(*t);
            vs.push(*v);
        }
    }
    if vs.len() < 2 {
        return Err(Error::invalid(format!(
            "column {column:?} has fewer than 2 non-missing values"
        )));
    }
    LoadSeries::new(ts, vs)
}

/// Captures min and max of the training values for min-max scaling.
pub fn fit_scaler(train_values: &[f64]) -> Result<ScalerParams> {
    if train_values.len() < 2 {
        return Err(Error::invalid("scaler needs at least 2 values"));
    }
    let min = train_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = train_values
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    // Also rejects NaN inputs, which poison both folds.
    if max.partial_cmp(&min) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::invalid(format!(
            "constant input: min == max == {min}"
        )));
    }
    Ok(ScalerParams { min, max })
}

/// Maps values to [0, 1] over the training range. Out-of-range inputs map
/// outside [0, 1] on purpose: test data may exceed the training range.
pub fn scale(values: &[f64], params: &ScalerParams) -> Vec<f64> {
    let span = params.max - params.min;
    values.iter().map(|v| (v - params.min) / span).collect()
}

/// Inverse of [`scale`], back to MWh.
pub fn inverse_scale(scaled: &[f64], params: &ScalerParams) -> Vec<f64> {
    let span = params.max - params.min;
    scaled.iter().map(|v| v * span + params.min).collect()
}

/// Chronological split: train takes the first `floor(ratio * n)` points.
pub fn train_test_split(series: &LoadSeries, ratio: f64) -> Result<(LoadSeries, LoadSeries)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid(format!(
            "split ratio must be in (0, 1), got {ratio}"
        )));
    }
    let n = series.len();
    let n_train = (ratio * n as f64).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::invalid(format!(
            "split of {n} points at ratio {ratio} leaves an empty side"
        )));
    }
    let train = LoadSeries {
        timestamps: series.timestamps[..n_train].to_vec(),
        values: series.values[..n_train].to_vec(),
    };
    let test = LoadSeries {
        timestamps: series.timestamps[n_train..].to_vec(),
        values: series.values[n_train..].to_vec(),
    };
    Ok((train, test))
}

/// Builds sliding windows: `inputs[i]` is `values[i..i+lookback]` and
/// `targets[i]` is `values[i+lookback]`, giving `n - lookback` pairs.
pub fn make_windows(values: &[f64], lookback: usize) -> Result<WindowedDataset> {
    if lookback < 1 {
        return Err(Error::invalid("lookback must be at least 1"));
    }
    if values.len() <= lookback {
        return Err(Error::invalid(format!(
            "series length {} does not exceed lookback {}",
            values.len(),
            lookback
        )));
    }
    let n = values.len() - lookback;
    let mut inputs = Vec::with_capacity(n * lookback);
    let mut targets = Vec::with_capacity(n);
    for i in 0..n {
        inputs.extend_from_slice(&values[i..i + lookback]);
        targets.push(values[i + lookback]);
    }
    Ok(WindowedDataset {
        inputs,
        targets,
        lookback,
    })
}
