//! MAE/MAPE error metrics and the cross-model comparison harness that
//! produces the report files (metrics CSV, predictions CSV, JSON report).

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::baselines::{
    moving_average_forecast, rolling_forecast, ArimaModel, EvalMode, ForecastSeries,
};
use crate::data::{inverse_scale, ScalerParams};
use crate::error::{Error, Result};
use crate::lstm::{network_forward, LstmConfig, LstmParams};

/// Mean absolute error, in the units of its inputs (MWh in reports).
pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.is_empty() {
        return Err(Error::invalid("mae of empty vectors"));
    }
    if actual.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "mae length mismatch: {} vs {}",
            actual.len(),
            predicted.len()
        )));
    }
    for (i, v) in actual.iter().chain(predicted).enumerate() {
        if !v.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite value {v} at position {i} in mae input"
            )));
        }
    }
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).abs())
        .sum();
    Ok(sum / actual.len() as f64)
}

/// Mean absolute percentage error: 100 · mean(|a − p| / |a|). Any zero
/// actual value is an error (the index is reported).
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    if actual.is_empty() {
        return Err(Error::invalid("mape of empty vectors"));
    }
    if actual.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "mape length mismatch: {} vs {}",
            actual.len(),
            predicted.len()
        )));
    }
    let mut sum = 0.0;
    for (i, (a, p)) in actual.iter().zip(predicted).enumerate() {
        if !a.is_finite() || !p.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite value at position {i} in mape input"
            )));
        }
        if *a == 0.0 {
            return Err(Error::numerical(format!(
                "zero actual value at position {i}: percentage error undefined"
            )));
        }
        sum += (a - p).abs() / a.abs();
    }
    Ok(100.0 * sum / actual.len() as f64)
}

/// A fitted model that can forecast the scaled test region.
pub trait Forecaster {
    fn name(&self) -> &str;

    /// Scaled one-step predictions over `test`, given the scaled `warmup`
    /// history preceding it. Rolling mode reads true history; static mode
    /// recurses on the model's own output.
    fn forecast(&self, warmup: &[f64], test: &[f64], mode: EvalMode) -> Result<Vec<f64>>;
}

/// AR / ARMA / ARIMA adapter.
pub struct ArimaForecaster {
    pub name: String,
    pub model: ArimaModel,
}

impl Forecaster for ArimaForecaster {
    fn name(&self) -> &str {
        &self.name
    }

    fn forecast(&self, warmup: &[f64], test: &[f64], mode: EvalMode) -> Result<Vec<f64>> {
        Ok(rolling_forecast(&self.model, test, warmup, mode)?.predicted)
    }
}

/// Moving-average smoother over the last `window` hours.
pub struct MovingAverageForecaster {
    pub window: usize,
}

impl Forecaster for MovingAverageForecaster {
    fn name(&self) -> &str {
        "ma"
    }

    fn forecast(&self, warmup: &[f64], test: &[f64], mode: EvalMode) -> Result<Vec<f64>> {
        match mode {
            EvalMode::Rolling => {
                let mut history = warmup.to_vec();
                let mut out = Vec::with_capacity(test.len());
                for &actual in test {
                    out.push(moving_average_forecast(&history, self.window, 1)?[0]);
                    history.push(actual);
                }
                Ok(out)
            }
            EvalMode::Static => moving_average_forecast(warmup, self.window, test.len()),
        }
    }
}

/// Next value = last observed value.
pub struct PersistenceForecaster;

impl Forecaster for PersistenceForecaster {
    fn name(&self) -> &str {
        "persistence"
    }

    fn forecast(&self, warmup: &[f64], test: &[f64], mode: EvalMode) -> Result<Vec<f64>> {
        let last = *warmup
            .last()
            .ok_or_else(|| Error::invalid("persistence needs at least one warmup value"))?;
        match mode {
            EvalMode::Rolling => {
                let mut out = Vec::with_capacity(test.len());
                let mut prev = last;
                for &actual in test {
                    out.push(prev);
                    prev = actual;
                }
                Ok(out)
            }
            EvalMode::Static => Ok(vec![last; test.len()]),
        }
    }
}

/// Trained-network adapter; windows slide over true history (rolling) or
/// over the network's own predictions (static).
pub struct LstmForecaster {
    pub params: LstmParams,
    pub config: LstmConfig,
}

impl Forecaster for LstmForecaster {
    fn name(&self) -> &str {
        "lstm"
    }

    fn forecast(&self, warmup: &[f64], test: &[f64], mode: EvalMode) -> Result<Vec<f64>> {
        let window_len = self.config.window_len();
        if warmup.len() < window_len {
            return Err(Error::invalid(format!(
                "warmup of {} cannot fill a {window_len}-step window",
                warmup.len()
            )));
        }
        let mut buffer = warmup[warmup.len() - window_len..].to_vec();
        let mut out = Vec::with_capacity(test.len());
        for &actual in test {
            let (pred, _) = network_forward(&buffer, &self.params, self.config.seq_len, None)?;
            out.push(pred);
            buffer.remove(0);
            buffer.push(match mode {
                EvalMode::Rolling => actual,
                EvalMode::Static => pred,
            });
        }
        Ok(out)
    }
}

/// One model's error metrics in MWh / percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub model_name: String,
    pub mae: f64,
    pub mape: f64,
}

/// A model whose evaluation failed; other models still report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedModel {
    pub model_name: String,
    pub error: String,
}

/// Run context recorded alongside the metric rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub split_ratio: f64,
    pub seed: u64,
    pub mode: EvalMode,
    /// Human-readable order/config description per model.
    pub orders: BTreeMap<String, String>,
}

/// The full comparison: rows sorted by MAE ascending (ties by name),
/// retained forecasts in MWh for plotting, and failures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<MetricsRow>,
    pub failures: Vec<FailedModel>,
    pub forecasts: BTreeMap<String, ForecastSeries>,
    pub metadata: ReportMetadata,
}

/// Shared evaluation context for [`compare`]: the scaled test region and
/// warmup, the exact actual values in MWh, and the scaler that maps model
/// output back to MWh.
pub struct CompareInputs<'a> {
    pub warmup_scaled: &'a [f64],
    pub test_scaled: &'a [f64],
    pub actual_mwh: &'a [f64],
    pub test_timestamps: Option<&'a [DateTime<Utc>]>,
    pub scaler: &'a ScalerParams,
    pub mode: EvalMode,
    pub metadata: ReportMetadata,
}

/// Evaluates every forecaster over the same test region, computing MAE and
/// MAPE in MWh. Per-model failures become failure records; the comparison
/// aborts only if no model succeeds.
pub fn compare(models: &[Box<dyn Forecaster>], inputs: &CompareInputs) -> Result<ComparisonReport> {
    if inputs.test_scaled.len() != inputs.actual_mwh.len() {
        return Err(Error::invalid(format!(
            "{} scaled test values vs {} actuals",
            inputs.test_scaled.len(),
            inputs.actual_mwh.len()
        )));
    }
    if inputs.test_scaled.is_empty() {
        return Err(Error::invalid("empty test region"));
    }
    if models.is_empty() {
        return Err(Error::invalid("no models selected"));
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut forecasts = BTreeMap::new();
    for model in models {
        let name = model.name().to_string();
        let result = model
            .forecast(inputs.warmup_scaled, inputs.test_scaled, inputs.mode)
            .and_then(|scaled| {
                let predicted = inverse_scale(&scaled, inputs.scaler);
                let row = MetricsRow {
                    model_name: name.clone(),
                    mae: mae(inputs.actual_mwh, &predicted)?,
                    mape: mape(inputs.actual_mwh, &predicted)?,
                };
                let series = ForecastSeries::new(
                    inputs.test_timestamps.map(<[DateTime<Utc>]>::to_vec),
                    predicted,
                    Some(inputs.actual_mwh.to_vec()),
                )?;
                Ok((row, series))
            });
        match result {
            Ok((row, series)) => {
                rows.push(row);
                forecasts.insert(name, series);
            }
            Err(e) => failures.push(FailedModel {
                model_name: name,
                error: e.to_string(),
            }),
        }
    }
    if rows.is_empty() {
        let detail = failures
            .iter()
            .map(|f| format!("{}: {}", f.model_name, f.error))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::numerical(format!("every model failed ({detail})")));
    }
    rows.sort_by(|a, b| {
        a.mae
            .partial_cmp(&b.mae)
            .expect("finite mae")
            .then_with(|| a.model_name.cmp(&b.model_name))
    });
    Ok(ComparisonReport {
        rows,
        failures,
        forecasts,
        metadata: inputs.metadata.clone(),
    })
}

/// Writes `model,mae,mape` rows in report order.
pub fn write_metrics_csv(report: &ComparisonReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
        _ => Error::Csv(e),
    })?;
    writer.write_record(["model", "mae", "mape"])?;
    for row in &report.rows {
        writer.write_record([
            row.model_name.clone(),
            row.mae.to_string(),
            row.mape.to_string(),
        ])?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Writes the plot bundle: timestamp, actual, then one prediction column
/// per model (in report row order).
pub fn write_predictions_csv(report: &ComparisonReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let names: Vec<&str> = report.rows.iter().map(|r| r.model_name.as_str()).collect();
    let series: Vec<&ForecastSeries> = names
        .iter()
        .map(|n| {
            report
                .forecasts
                .get(*n)
                .ok_or_else(|| Error::invalid(format!("missing forecast for model {n}")))
        })
        .collect::<Result<_>>()?;
    let first = series
        .first()
        .ok_or_else(|| Error::invalid("no forecasts to write"))?;
    let len = first.len();
    for s in &series {
        if s.len() != len {
            return Err(Error::invalid("forecast series lengths differ"));
        }
    }
    let mut writer = csv::Writer::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
        _ => Error::Csv(e),
    })?;
    let mut header = vec!["timestamp".to_string(), "actual".to_string()];
    header.extend(names.iter().map(|n| n.to_string()));
    writer.write_record(&header)?;
    let actual = first
        .actual
        .as_ref()
        .ok_or_else(|| Error::invalid("forecast series carries no actuals"))?;
    for k in 0..len {
        let mut record = Vec::with_capacity(2 + series.len());
        match &first.timestamps {
            Some(ts) => record.push(ts[k].format("%Y-%m-%d %H:%M:%S").to_string()),
            None => record.push(k.to_string()),
        }
        record.push(actual[k].to_string());
        for s in &series {
            record.push(s.predicted[k].to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Serializes the whole report as JSON.
pub fn write_report_json(report: &ComparisonReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::invalid(format!("report serialization failed: {e}")))?;
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}
