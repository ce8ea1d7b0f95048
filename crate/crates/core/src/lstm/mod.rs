//! From-scratch LSTM regressor: flat parameter storage, fan-based
//! initialization, the Adam optimizer, and versioned JSON checkpoints.
//! The forward/backward passes live in [`network`], the training loop and
//! series prediction in [`train`].

mod network;
mod train;

pub use network::{
    backward, cell_forward, mse_loss, network_forward, sample_dropout_mask, ForwardCache,
    LstmState, StepCache,
};
pub use train::{predict_series, train, EpochRecord, TrainingLog};

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

/// Architecture and training hyperparameters. Defaults follow the reference
/// setup: 100 hidden units over a 25-value input window, 50 epochs, batch
/// 70, Adam at 0.001.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LstmConfig {
    pub hidden_size: usize,
    pub input_size: usize,
    pub seq_len: usize,
    pub dropout_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for LstmConfig {
    fn default() -> Self {
        Self {
            hidden_size: 100,
            input_size: 25,
            seq_len: 1,
            dropout_rate: 0.2,
            epochs: 50,
            batch_size: 70,
            learning_rate: 0.001,
            seed: 42,
        }
    }
}

impl LstmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_size < 1 || self.input_size < 1 || self.seq_len < 1 {
            return Err(Error::invalid(
                "hidden_size, input_size, seq_len must be >= 1",
            ));
        }
        if self.epochs < 1 || self.batch_size < 1 {
            return Err(Error::invalid("epochs and batch_size must be >= 1"));
        }
        if !(self.dropout_rate >= 0.0 && self.dropout_rate < 1.0) {
            return Err(Error::invalid(format!(
                "dropout_rate must be in [0, 1), got {}",
                self.dropout_rate
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }

    /// Flat window length the network consumes: one `input_size` vector per
    /// time step.
    pub fn window_len(&self) -> usize {
        self.seq_len * self.input_size
    }
}

/// Trainable parameter counts: the recurrent block 4·(H·(D+H) + H) and the
/// dense head H + 1.
pub fn param_count(config: &LstmConfig) -> (usize, usize) {
    let h = config.hidden_size;
    let d = config.input_size;
    (4 * (h * (d + h) + h), h + 1)
}

/// All trainable parameters in one flat buffer:
/// `[W | b | dense_w | dense_b]` where W is 4H × (D+H) row-major with gate
/// row blocks ordered [input i, forget f, candidate g, output o] over the
/// concatenation [x_t; h_{t−1}], b is 4H in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    hidden_size: usize,
    input_size: usize,
    values: Vec<f64>,
}

impl LstmParams {
    pub fn zeros(hidden_size: usize, input_size: usize) -> Self {
        let len = 4 * hidden_size * (input_size + hidden_size) + 4 * hidden_size + hidden_size + 1;
        Self {
            hidden_size,
            input_size,
            values: vec![0.0; len],
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    fn w_len(&self) -> usize {
        4 * self.hidden_size * (self.input_size + self.hidden_size)
    }

    fn b_offset(&self) -> usize {
        self.w_len()
    }

    fn dense_w_offset(&self) -> usize {
        self.b_offset() + 4 * self.hidden_size
    }

    fn dense_b_offset(&self) -> usize {
        self.dense_w_offset() + self.hidden_size
    }

    pub fn w(&self) -> &[f64] {
        &self.values[..self.w_len()]
    }

    pub fn b(&self) -> &[f64] {
        &self.values[self.b_offset()..self.dense_w_offset()]
    }

    pub fn dense_w(&self) -> &[f64] {
        &self.values[self.dense_w_offset()..self.dense_b_offset()]
    }

    pub fn dense_b(&self) -> f64 {
        self.values[self.dense_b_offset()]
    }

    pub(crate) fn w_mut(&mut self) -> &mut [f64] {
        let end = self.w_len();
        &mut self.values[..end]
    }

    pub(crate) fn b_mut(&mut self) -> &mut [f64] {
        let (start, end) = (self.b_offset(), self.dense_w_offset());
        &mut self.values[start..end]
    }

    pub(crate) fn dense_w_mut(&mut self) -> &mut [f64] {
        let (start, end) = (self.dense_w_offset(), self.dense_b_offset());
        &mut self.values[start..end]
    }

    pub(crate) fn dense_b_mut(&mut self) -> &mut f64 {
        let off = self.dense_b_offset();
        &mut self.values[off]
    }

    /// Flat view of every trainable value (optimizer order).
    pub fn flat(&self) -> &[f64] {
        &self.values
    }

    pub fn flat_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn total_len(&self) -> usize {
        self.values.len()
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Draws initial parameters: each weight block uniform in
/// ±√(6 / (fan_in + fan_out)), biases zero except the forget-gate bias at
/// 1.0. Deterministic in `seed`.
pub fn init_params(config: &LstmConfig, seed: u64) -> LstmParams {
    let h = config.hidden_size;
    let d = config.input_size;
    let mut params = LstmParams::zeros(h, d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Every gate block is H × (D+H): fan_in D+H, fan_out H.
    let gate_bound = (6.0 / (d + 2 * h) as f64).sqrt();
    for w in params.w_mut() {
        *w = rng.random_range(-gate_bound..gate_bound);
    }
    let dense_bound = (6.0 / (h + 1) as f64).sqrt();
    for w in params.dense_w_mut() {
        *w = rng.random_range(-dense_bound..dense_bound);
    }
    // Forget-gate rows are the second block of b.
    for fb in &mut params.b_mut()[h..2 * h] {
        *fb = 1.0;
    }
    params
}

/// Adam optimizer state over the flat parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// One Adam update: m ← β₁m + (1−β₁)g, v ← β₂v + (1−β₂)g², bias-corrected,
/// params ← params − lr·m̂/(√v̂ + ε).
pub fn adam_step(params: &mut LstmParams, grads: &LstmParams, state: &mut AdamState, lr: f64) {
    debug_assert_eq!(params.total_len(), grads.total_len());
    debug_assert_eq!(params.total_len(), state.m.len());
    state.t += 1;
    let t = state.t as i32;
    let bc1 = 1.0 - ADAM_BETA1.powi(t);
    let bc2 = 1.0 - ADAM_BETA2.powi(t);
    for (((p, g), m), v) in params
        .flat_mut()
        .iter_mut()
        .zip(grads.flat())
        .zip(&mut state.m)
        .zip(&mut state.v)
    {
        *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
        *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
    }
}

/// On-disk checkpoint: versioned JSON with flattened weight arrays in the
/// declared gate order [i, f, g, o].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub config: LstmConfig,
    pub gate_weights: Vec<f64>,
    pub gate_biases: Vec<f64>,
    pub dense_weights: Vec<f64>,
    pub dense_bias: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adam: Option<AdamState>,
}

/// Saves parameters (and optionally optimizer state) as JSON. The encoding
/// is deterministic, so identical parameters yield byte-identical files.
pub fn save_checkpoint(
    path: impl AsRef<Path>,
    config: &LstmConfig,
    params: &LstmParams,
    adam: Option<&AdamState>,
) -> Result<()> {
    let path = path.as_ref();
    let checkpoint = Checkpoint {
        schema_version: CHECKPOINT_SCHEMA_VERSION,
        config: config.clone(),
        gate_weights: params.w().to_vec(),
        gate_biases: params.b().to_vec(),
        dense_weights: params.dense_w().to_vec(),
        dense_bias: params.dense_b(),
        adam: adam.cloned(),
    };
    let json = serde_json::to_string_pretty(&checkpoint)
        .map_err(|e| Error::invalid(format!("checkpoint serialization failed: {e}")))?;
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}

/// Loads and validates a checkpoint written by [`save_checkpoint`].
pub fn load_checkpoint(
    path: impl AsRef<Path>,
) -> Result<(LstmConfig, LstmParams, Option<AdamState>)> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ckpt: Checkpoint = serde_json::from_str(&raw)
        .map_err(|e| Error::invalid(format!("malformed checkpoint {}: {e}", path.display())))?;
    if ckpt.schema_version != CHECKPOINT_SCHEMA_VERSION {
        return Err(Error::invalid(format!(
            "unsupported checkpoint schema version {}",
            ckpt.schema_version
        )));
    }
    ckpt.config.validate()?;
    let h = ckpt.config.hidden_size;
    let d = ckpt.config.input_size;
    let mut params = LstmParams::zeros(h, d);
    if ckpt.gate_weights.len() != params.w_len()
        || ckpt.gate_biases.len() != 4 * h
        || ckpt.dense_weights.len() != h
    {
        return Err(Error::invalid(format!(
            "checkpoint weight shapes disagree with config H={h}, D={d}"
        )));
    }
    params.w_mut().copy_from_slice(&ckpt.gate_weights);
    params.b_mut().copy_from_slice(&ckpt.gate_biases);
    params.dense_w_mut().copy_from_slice(&ckpt.dense_weights);
    *params.dense_b_mut() = ckpt.dense_bias;
    if !params.all_finite() {
        return Err(Error::invalid("checkpoint contains non-finite weights"));
    }
    if let Some(adam) = &ckpt.adam {
        if adam.m.len() != params.total_len() || adam.v.len() != params.total_len() {
            return Err(Error::invalid("checkpoint optimizer state shape mismatch"));
        }
    }
    Ok((ckpt.config, params, ckpt.adam))
}
