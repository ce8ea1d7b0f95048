//! Command-line pipeline: `summarize`, `correlate`, `train`, `compare`, and
//! `synth`, driven by a JSON config file with flag overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::baselines::{fit_ar, fit_arima, fit_arma, EvalMode};
use crate::correlation::correlation_table;
use crate::data::{
    csv_headers, drop_missing, fit_scaler, load_csv, make_windows, scale, summarize,
    timestamp_column_index, train_test_split, LoadSeries, ScalerParams, WindowedDataset,
};
use crate::error::{Error, Result};
use crate::lstm::{load_checkpoint, save_checkpoint, train, LstmConfig, LstmParams};
use crate::metrics::{
    compare, write_metrics_csv, write_predictions_csv, write_report_json, ArimaForecaster,
    CompareInputs, FailedModel, Forecaster, LstmForecaster, MovingAverageForecaster,
    PersistenceForecaster, ReportMetadata,
};
use crate::synth::{generate_load_series, write_csv as write_synth_csv, SynthConfig};

/// Model identifiers accepted in config files and `--models`.
const KNOWN_MODELS: &[&str] = &["ar", "ma", "arma", "arima", "lstm", "persistence"];

#[derive(Parser, Debug)]
#[command(
    name = "gridcast",
    version,
    about = "Hourly electricity-demand forecasting pipeline"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Summary statistics for the requested CSV columns
    Summarize(CommonArgs),
    /// Pearson correlations of every feature against the target column
    Correlate(CommonArgs),
    /// Preprocess the load series and train the LSTM
    Train(CommonArgs),
    /// Fit all selected models and compare their test-set errors
    Compare(CommonArgs),
    /// Generate a synthetic hourly load CSV (sine + trend + AR noise)
    Synth(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Summarize(a)
            | Command::Correlate(a)
            | Command::Train(a)
            | Command::Compare(a)
            | Command::Synth(a) => a,
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// JSON run-configuration file (defaults apply when omitted)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Random seed override (applies to every seeded stage)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated model selection: ar,ma,arma,arima,lstm,persistence
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<String>>,
    /// Evaluation mode: rolling (true history) or static (recursive)
    #[arg(long)]
    pub mode: Option<String>,
    /// Output directory override
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Run configuration: one JSON artifact plus flag overrides (flags win).
/// Every field has a default, so partial files are valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Input CSV path.
    pub data: PathBuf,
    /// Column the models forecast.
    pub target: String,
    /// Columns for `summarize` (defaults to the target when empty).
    pub columns: Vec<String>,
    /// Input window length in hours.
    pub lookback: usize,
    /// Chronological train fraction.
    pub split_ratio: f64,
    /// Models evaluated by `compare`.
    pub models: Vec<String>,
    pub ar_order: usize,
    pub ma_window: usize,
    /// (p, q).
    pub arma_order: (usize, usize),
    /// (p, d, q).
    pub arima_order: (usize, usize, usize),
    pub lstm: LstmConfig,
    /// Master seed; also drives the LSTM and the synthetic generator.
    pub seed: u64,
    pub mode: EvalMode,
    pub out_dir: PathBuf,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: PathBuf::from("data/energy_dataset.csv"),
            target: "total load actual".to_string(),
            columns: Vec::new(),
            lookback: 25,
            split_ratio: 0.8,
            models: vec![
                "ar".to_string(),
                "ma".to_string(),
                "arma".to_string(),
                "arima".to_string(),
                "lstm".to_string(),
            ],
            ar_order: 25,
            ma_window: 24,
            arma_order: (2, 2),
            arima_order: (2, 1, 2),
            lstm: LstmConfig::default(),
            seed: 42,
            mode: EvalMode::Rolling,
            out_dir: PathBuf::from("outputs"),
            synth: SynthConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lookback < 1 {
            return Err(Error::invalid("lookback must be at least 1"));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::invalid(format!(
                "split_ratio must be in (0, 1), got {}",
                self.split_ratio
            )));
        }
        for m in &self.models {
            if !KNOWN_MODELS.contains(&m.as_str()) {
                return Err(Error::invalid(format!(
                    "unknown model {m:?} (expected one of {KNOWN_MODELS:?})"
                )));
            }
        }
        self.lstm.validate()
    }

    /// Loads a config file, or the defaults when no path is given.
    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        let config = match path {
            None => RunConfig::default(),
            Some(p) => {
                let raw = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str(&raw)
                    .map_err(|e| Error::invalid(format!("bad config {}: {e}", p.display())))?
            }
        };
        config.validate()?;
        Ok(config)
    }

    /// Applies flag overrides; the seed flag reseeds every stage.
    pub fn apply_overrides(&mut self, args: &CommonArgs) -> Result<()> {
        if let Some(seed) = args.seed {
            self.seed = seed;
            self.synth.seed = seed;
        }
        if let Some(models) = &args.models {
            self.models = models.clone();
        }
        if let Some(mode) = &args.mode {
            self.mode = mode.parse()?;
        }
        if let Some(out) = &args.out {
            self.out_dir = out.clone();
        }
        self.validate()
    }

    /// The LSTM configuration actually trained: seeded by the master seed,
    /// with the input width following `lookback` in the one-step layout.
    pub fn effective_lstm(&self) -> Result<LstmConfig> {
        let mut cfg = self.lstm.clone();
        cfg.seed = self.seed;
        if cfg.seq_len == 1 {
            cfg.input_size = self.lookback;
        } else if cfg.window_len() != self.lookback {
            return Err(Error::invalid(format!(
                "lstm seq_len × input_size = {} does not cover lookback {}",
                cfg.window_len(),
                self.lookback
            )));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Preprocessed load pipeline shared by `train` and `compare`.
struct Prepared {
    series: LoadSeries,
    scaler: ScalerParams,
    full_scaled: Vec<f64>,
    n_train: usize,
}

fn prepare(config: &RunConfig) -> Result<Prepared> {
    let table = load_csv(&config.data, &[config.target.as_str()])?;
    let series = drop_missing(&table, &config.target)?;
    let (train_part, _) = train_test_split(&series, config.split_ratio)?;
    let scaler = fit_scaler(train_part.values())?;
    let n_train = train_part.len();
    let full_scaled = scale(series.values(), &scaler);
    Ok(Prepared {
        series,
        scaler,
        full_scaled,
        n_train,
    })
}

/// Windowed train/validation pair: windows before the split boundary train
/// the network, the rest (whose inputs may straddle the boundary, exactly
/// like rolling evaluation) report validation loss.
fn split_windows(
    prepared: &Prepared,
    lookback: usize,
) -> Result<(WindowedDataset, WindowedDataset)> {
    let windows = make_windows(&prepared.full_scaled, lookback)?;
    let boundary = prepared
        .n_train
        .checked_sub(lookback)
        .filter(|b| *b >= 1)
        .ok_or_else(|| {
            Error::invalid(format!(
                "training split of {} leaves no window of {lookback}",
                prepared.n_train
            ))
        })?;
    if boundary >= windows.len() {
        return Err(Error::invalid("test split leaves no validation windows"));
    }
    Ok((
        windows.slice(0, boundary),
        windows.slice(boundary, windows.len()),
    ))
}

fn ensure_out_dir(config: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))
}

/// Emits per-column summary statistics as JSON (stdout and summary.json).
pub fn cmd_summarize(config: &RunConfig) -> Result<()> {
    let columns: Vec<String> = if config.columns.is_empty() {
        vec![config.target.clone()]
    } else {
        config.columns.clone()
    };
    let table = load_csv(&config.data, &columns)?;
    let mut out = BTreeMap::new();
    for name in &columns {
        let column = table
            .column(name)
            .ok_or_else(|| Error::MissingColumn(name.clone()))?;
        out.insert(name.clone(), summarize(column)?);
    }
    let json = serde_json::to_string_pretty(&out)
        .map_err(|e| Error::invalid(format!("summary serialization failed: {e}")))?;
    ensure_out_dir(config)?;
    let path = config.out_dir.join("summary.json");
    std::fs::write(&path, &json).map_err(|e| Error::io(&path, e))?;
    println!("{json}");
    Ok(())
}

/// Correlates every non-timestamp column against the target and emits the
/// sorted table (JSON to stdout, CSV to correlations.csv).
pub fn cmd_correlate(config: &RunConfig) -> Result<()> {
    let headers = csv_headers(&config.data)?;
    let ts_idx = timestamp_column_index(&headers);
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != ts_idx)
        .map(|(_, h)| h.clone())
        .collect();
    if !feature_names.contains(&config.target) {
        return Err(Error::MissingColumn(config.target.clone()));
    }
    let table = load_csv(&config.data, &feature_names)?;
    let corr = correlation_table(&table, &config.target)?;
    for skipped in &corr.skipped {
        eprintln!(
            "warning: skipped column {:?}: {}",
            skipped.feature_name, skipped.reason
        );
    }
    if corr.rows.is_empty() {
        eprintln!("warning: no feature column could be correlated against the target");
    }
    ensure_out_dir(config)?;
    let path = config.out_dir.join("correlations.csv");
    let mut writer = csv::Writer::from_path(&path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => Error::io(&path, std::io::Error::other(e.to_string())),
        _ => Error::Csv(e),
    })?;
    writer.write_record(["feature", "coefficient"])?;
    for row in &corr.rows {
        writer.write_record([row.feature_name.clone(), row.coefficient.to_string()])?;
    }
    writer.flush().map_err(|e| Error::io(&path, e))?;
    let json = serde_json::to_string_pretty(&corr.rows)
        .map_err(|e| Error::invalid(format!("correlation serialization failed: {e}")))?;
    println!("{json}");
    Ok(())
}

fn train_and_save(config: &RunConfig, prepared: &Prepared) -> Result<(LstmConfig, LstmParams)> {
    let lstm_cfg = config.effective_lstm()?;
    let (train_ds, val_ds) = split_windows(prepared, config.lookback)?;
    let (params, log) = train(&train_ds, Some(&val_ds), &lstm_cfg)?;
    ensure_out_dir(config)?;
    save_checkpoint(
        config.out_dir.join("checkpoint.json"),
        &lstm_cfg,
        &params,
        None,
    )?;
    log.write_csv(config.out_dir.join("training_log.csv"))?;
    let last = log.records.last().expect("at least one epoch");
    println!(
        "trained {} epochs: train_loss={:.6e} val_loss={}",
        log.records.len(),
        last.train_loss,
        last.val_loss
            .map(|v| format!("{v:.6e}"))
            .unwrap_or_else(|| "n/a".to_string()),
    );
    Ok((lstm_cfg, params))
}

/// Full preprocess → train → persist pipeline.
pub fn cmd_train(config: &RunConfig) -> Result<()> {
    let prepared = prepare(config)?;
    let (_, params) = train_and_save(config, &prepared)?;
    println!(
        "checkpoint: {} ({} trainable values)",
        config.out_dir.join("checkpoint.json").display(),
        params.total_len()
    );
    Ok(())
}

/// Loads the trained network from checkpoint.json when its shape matches
/// the current run; otherwise trains (and saves) a fresh one.
fn obtain_lstm(config: &RunConfig, prepared: &Prepared) -> Result<(LstmConfig, LstmParams)> {
    let path = config.out_dir.join("checkpoint.json");
    if path.exists() {
        let (ckpt_cfg, params, _) = load_checkpoint(&path)?;
        if ckpt_cfg.window_len() == config.lookback {
            return Ok((ckpt_cfg, params));
        }
        eprintln!(
            "note: checkpoint window {} does not match lookback {}; retraining",
            ckpt_cfg.window_len(),
            config.lookback
        );
    }
    train_and_save(config, prepared)
}

/// Fits/loads the selected models, evaluates them over the shared test
/// split, and writes metrics.csv, predictions.csv, and report.json.
pub fn cmd_compare(config: &RunConfig) -> Result<()> {
    let prepared = prepare(config)?;
    let n_train = prepared.n_train;
    let warmup_scaled = &prepared.full_scaled[..n_train];
    let test_scaled = &prepared.full_scaled[n_train..];
    let actual_mwh = &prepared.series.values()[n_train..];
    let test_timestamps = &prepared.series.timestamps()[n_train..];

    let mut orders = BTreeMap::new();
    let mut models: Vec<Box<dyn Forecaster>> = Vec::new();
    let mut prefit_failures: Vec<FailedModel> = Vec::new();
    for name in &config.models {
        let built: Result<Box<dyn Forecaster>> = match name.as_str() {
            "ar" => {
                orders.insert(name.clone(), format!("AR({})", config.ar_order));
                fit_ar(warmup_scaled, config.ar_order).map(|model| {
                    Box::new(ArimaForecaster {
                        name: name.clone(),
                        model,
                    }) as Box<dyn Forecaster>
                })
            }
            "ma" => {
                orders.insert(name.clone(), format!("MA(window {})", config.ma_window));
                Ok(Box::new(MovingAverageForecaster {
                    window: config.ma_window,
                }))
            }
            "arma" => {
                let (p, q) = config.arma_order;
                orders.insert(name.clone(), format!("ARMA({p},{q})"));
                fit_arma(warmup_scaled, p, q).map(|model| {
                    Box::new(ArimaForecaster {
                        name: name.clone(),
                        model,
                    }) as Box<dyn Forecaster>
                })
            }
            "arima" => {
                let (p, d, q) = config.arima_order;
                orders.insert(name.clone(), format!("ARIMA({p},{d},{q})"));
                fit_arima(warmup_scaled, p, d, q).map(|model| {
                    Box::new(ArimaForecaster {
                        name: name.clone(),
                        model,
                    }) as Box<dyn Forecaster>
                })
            }
            "lstm" => obtain_lstm(config, &prepared).map(|(cfg, params)| {
                orders.insert(
                    name.clone(),
                    format!(
                        "LSTM(H={}, window={}, epochs={})",
                        cfg.hidden_size,
                        cfg.window_len(),
                        cfg.epochs
                    ),
                );
                Box::new(LstmForecaster {
                    params,
                    config: cfg,
                }) as Box<dyn Forecaster>
            }),
            "persistence" => {
                orders.insert(name.clone(), "persistence".to_string());
                Ok(Box::new(PersistenceForecaster))
            }
            other => Err(Error::invalid(format!("unknown model {other:?}"))),
        };
        match built {
            Ok(model) => models.push(model),
            Err(e) => prefit_failures.push(FailedModel {
                model_name: name.clone(),
                error: e.to_string(),
            }),
        }
    }
    for failure in &prefit_failures {
        eprintln!(
            "warning: model {} failed to fit: {}",
            failure.model_name, failure.error
        );
    }
    if models.is_empty() {
        return Err(Error::numerical("no model could be fitted"));
    }

    let inputs = CompareInputs {
        warmup_scaled,
        test_scaled,
        actual_mwh,
        test_timestamps: Some(test_timestamps),
        scaler: &prepared.scaler,
        mode: config.mode,
        metadata: ReportMetadata {
            split_ratio: config.split_ratio,
            seed: config.seed,
            mode: config.mode,
            orders,
        },
    };
    let mut report = compare(&models, &inputs)?;
    report.failures.extend(prefit_failures);

    ensure_out_dir(config)?;
    write_metrics_csv(&report, config.out_dir.join("metrics.csv"))?;
    write_predictions_csv(&report, config.out_dir.join("predictions.csv"))?;
    write_report_json(&report, config.out_dir.join("report.json"))?;

    println!(
        "model            mae (MWh)      mape (%)   [{} mode]",
        config.mode
    );
    for row in &report.rows {
        println!(
            "{:<15} {:>12.3} {:>12.3}",
            row.model_name, row.mae, row.mape
        );
    }
    for failure in &report.failures {
        println!("{:<15} failed: {}", failure.model_name, failure.error);
    }
    Ok(())
}

/// Writes a synthetic hourly load CSV to out_dir/synthetic.csv.
pub fn cmd_synth(config: &RunConfig) -> Result<()> {
    let series = generate_load_series(&config.synth)?;
    ensure_out_dir(config)?;
    let path = config.out_dir.join("synthetic.csv");
    write_synth_csv(&series, &path)?;
    println!("wrote {} rows to {}", series.len(), path.display());
    Ok(())
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    let args = cli.command.args();
    let mut config = RunConfig::load(args.config.as_deref())?;
    config.apply_overrides(args)?;
    match &cli.command {
        Command::Summarize(_) => cmd_summarize(&config),
        Command::Correlate(_) => cmd_correlate(&config),
        Command::Train(_) => cmd_train(&config),
        Command::Compare(_) => cmd_compare(&config),
        Command::Synth(_) => cmd_synth(&config),
    }
}
