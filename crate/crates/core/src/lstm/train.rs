//! Minibatch Adam training with dropout and per-epoch loss logging, plus
//! rolling one-step series prediction with a trained network.

use std::path::Path;

use chrono::{DateTime, Utc};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    adam_step, backward, init_params, mse_loss, network_forward, sample_dropout_mask, AdamState,
    LstmConfig, LstmParams,
};
use crate::baselines::ForecastSeries;
use crate::data::{inverse_scale, ScalerParams, WindowedDataset};
use crate::error::{Error, Result};

/// Distinct stream for shuffling/dropout so it never collides with the
/// weight-initialization draws made from the same user seed.
const TRAIN_RNG_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Losses for one epoch, in scaled (training) units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: Option<f64>,
}

/// Per-epoch training history.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingLog {
    pub records: Vec<EpochRecord>,
}

impl TrainingLog {
    pub fn final_train_loss(&self) -> Option<f64> {
        self.records.last().map(|r| r.train_loss)
    }

    /// Writes the log as CSV: epoch, train_loss, val_loss (empty when no
    /// validation set was supplied).
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut writer = csv::Writer::from_path(path).map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
            _ => Error::Csv(e),
        })?;
        writer.write_record(["epoch", "train_loss", "val_loss"])?;
        for r in &self.records {
            writer.write_record([
                r.epoch.to_string(),
                r.train_loss.to_string(),
                r.val_loss.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
        writer.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Mean squared error of the network over a dataset without dropout.
fn evaluate(params: &LstmParams, dataset: &WindowedDataset, seq_len: usize) -> Result<f64> {
    let mut preds = Vec::with_capacity(dataset.len());
    for i in 0..dataset.len() {
        let (p, _) = network_forward(dataset.input_row(i), params, seq_len, None)?;
        preds.push(p);
    }
    mse_loss(&preds, dataset.targets())
}

/// Trains the network: `epochs × ceil(n / batch_size)` Adam updates over
/// seeded-shuffled minibatches (the last partial batch is trained). Logs the
/// epoch-mean training loss (dropout active, as optimized) and, when a
/// validation set is given, its loss without dropout at each epoch end.
/// Fully deterministic in (data, config, seed).
pub fn train(
    train_set: &WindowedDataset,
    val_set: Option<&WindowedDataset>,
    config: &LstmConfig,
) -> Result<(LstmParams, TrainingLog)> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::invalid("training dataset is empty"));
    }
    if train_set.lookback() != config.window_len() {
        return Err(Error::invalid(format!(
            "dataset window length {} does not match seq_len × input_size = {}",
            train_set.lookback(),
            config.window_len()
        )));
    }
    if let Some(vs) = val_set {
        if vs.lookback() != config.window_len() {
            return Err(Error::invalid("validation window length mismatch"));
        }
    }

    let mut params = init_params(config, config.seed);
    let mut adam = AdamState::new(params.total_len());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ TRAIN_RNG_SALT);
    let n = train_set.len();
    let h = config.hidden_size;
    let use_dropout = config.dropout_rate > 0.0;
    let mut log = TrainingLog::default();

    let mut indices: Vec<usize> = (0..n).collect();
    for epoch in 1..=config.epochs {
        indices.shuffle(&mut rng);
        let mut epoch_sq_sum = 0.0;
        for (batch_no, chunk) in indices.chunks(config.batch_size).enumerate() {
            let mut preds = Vec::with_capacity(chunk.len());
            let mut targets = Vec::with_capacity(chunk.len());
            let mut caches = Vec::with_capacity(chunk.len());
            for &i in chunk {
                let mask =
                    use_dropout.then(|| sample_dropout_mask(&mut rng, h, config.dropout_rate));
                let (pred, cache) = network_forward(
                    train_set.input_row(i),
                    &params,
                    config.seq_len,
                    mask.as_deref(),
                )?;
                if !pred.is_finite() {
                    return Err(Error::numerical(format!(
                        "non-finite prediction at epoch {epoch}, batch {batch_no}"
                    )));
                }
                let target = train_set.targets()[i];
                epoch_sq_sum += (pred - target) * (pred - target);
                preds.push(pred);
                targets.push(target);
                caches.push(cache);
            }
            let grads = backward(&preds, &targets, &caches, &params)?;
            adam_step(&mut params, &grads, &mut adam, config.learning_rate);
        }
        let train_loss = epoch_sq_sum / n as f64;
        if !train_loss.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite training loss at epoch {epoch}"
            )));
        }
        let val_loss = match val_set {
            Some(vs) => Some(evaluate(&params, vs, config.seq_len)?),
            None => None,
        };
        log.records.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
        });
    }
    Ok((params, log))
}

/// Rolling one-step predictions over the last `test_length` points of
/// `history_scaled`, always reading true observed windows, inverse-scaled
/// to MWh. `history_scaled` must hold the scaled train and test values
/// end to end.
pub fn predict_series(
    params: &LstmParams,
    config: &LstmConfig,
    history_scaled: &[f64],
    test_length: usize,
    scaler: &ScalerParams,
    timestamps: Option<Vec<DateTime<Utc>>>,
) -> Result<ForecastSeries> {
    let window_len = config.window_len();
    if test_length == 0 {
        return Err(Error::invalid("test_length must be at least 1"));
    }
    if history_scaled.len() < test_length + window_len {
        return Err(Error::invalid(format!(
            "history of {} cannot cover {test_length} test points plus a {window_len}-step window",
            history_scaled.len()
        )));
    }
    let n = history_scaled.len();
    let test_start = n - test_length;
    let mut preds_scaled = Vec::with_capacity(test_length);
    for k in 0..test_length {
        let end = test_start + k;
        let window = &history_scaled[end - window_len..end];
        let (pred, _) = network_forward(window, params, config.seq_len, None)?;
        preds_scaled.push(pred);
    }
    let predicted = inverse_scale(&preds_scaled, scaler);
    let actual = inverse_scale(&history_scaled[test_start..], scaler);
    ForecastSeries::new(timestamps, predicted, Some(actual))
}
