//! LSTM forward pass, backpropagation through time, dropout, and the MSE
//! loss.

use rand::Rng;

use super::LstmParams;
use crate::error::{Error, Result};

/// Hidden and cell state carried between time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden_size: usize) -> Self {
        Self {
            h: vec![0.0; hidden_size],
            c: vec![0.0; hidden_size],
        }
    }
}

/// Everything the backward pass needs from one time step.
#[derive(Debug, Clone)]
pub struct StepCache {
    x: Vec<f64>,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    tanh_c: Vec<f64>,
}

/// Caches from a full forward pass over one window.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    steps: Vec<StepCache>,
    h_dropped: Vec<f64>,
    mask: Option<Vec<f64>>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// One LSTM step: gates i, f, o through sigmoid and candidate g through
/// tanh over [x_t; h_{t−1}], then c_t = f⊙c_{t−1} + i⊙g and
/// h_t = o⊙tanh(c_t).
pub fn cell_forward(x: &[f64], state: &LstmState, params: &LstmParams) -> (LstmState, StepCache) {
    let h_size = params.hidden_size();
    let d = params.input_size();
    debug_assert_eq!(x.len(), d);
    debug_assert_eq!(state.h.len(), h_size);
    let w = params.w();
    let b = params.b();
    let row_len = d + h_size;

    let mut z = vec![0.0; 4 * h_size];
    for (r, zr) in z.iter_mut().enumerate() {
        let row = &w[r * row_len..(r + 1) * row_len];
        let mut acc = b[r];
        for (wj, xj) in row[..d].iter().zip(x) {
            acc += wj * xj;
        }
        for (wj, hj) in row[d..].iter().zip(&state.h) {
            acc += wj * hj;
        }
        *zr = acc;
    }

    let i: Vec<f64> = z[..h_size].iter().map(|v| sigmoid(*v)).collect();
    let f: Vec<f64> = z[h_size..2 * h_size].iter().map(|v| sigmoid(*v)).collect();
    let g: Vec<f64> = z[2 * h_size..3 * h_size].iter().map(|v| v.tanh()).collect();
    let o: Vec<f64> = z[3 * h_size..].iter().map(|v| sigmoid(*v)).collect();

    let mut c = vec![0.0; h_size];
    let mut tanh_c = vec![0.0; h_size];
    let mut h = vec![0.0; h_size];
    for u in 0..h_size {
        c[u] = f[u] * state.c[u] + i[u] * g[u];
        tanh_c[u] = c[u].tanh();
        h[u] = o[u] * tanh_c[u];
    }

    let cache = StepCache {
        x: x.to_vec(),
        h_prev: state.h.clone(),
        c_prev: state.c.clone(),
        i,
        f,
        g,
        o,
        tanh_c,
    };
    (LstmState { h, c }, cache)
}

/// Runs the cell over a `seq_len × input_size` window (row-major) from zero
/// initial state, applies the inverted-dropout mask to the final hidden
/// vector when given, and returns the dense head's scalar prediction.
pub fn network_forward(
    window: &[f64],
    params: &LstmParams,
    seq_len: usize,
    dropout_mask: Option<&[f64]>,
) -> Result<(f64, ForwardCache)> {
    let d = params.input_size();
    let h_size = params.hidden_size();
    if window.len() != seq_len * d {
        return Err(Error::invalid(format!(
            "window length {} does not match {seq_len} steps of {d} inputs",
            window.len()
        )));
    }
    if let Some(mask) = dropout_mask {
        if mask.len() != h_size {
            return Err(Error::invalid(format!(
                "dropout mask length {} does not match hidden size {h_size}",
                mask.len()
            )));
        }
    }
    let mut state = LstmState::zeros(h_size);
    let mut steps = Vec::with_capacity(seq_len);
    for t in 0..seq_len {
        let (next, cache) = cell_forward(&window[t * d..(t + 1) * d], &state, params);
        state = next;
        steps.push(cache);
    }
    let h_dropped: Vec<f64> = match dropout_mask {
        Some(mask) => state.h.iter().zip(mask).map(|(h, m)| h * m).collect(),
        None => state.h.clone(),
    };
    let mut prediction = params.dense_b();
    for (w, h) in params.dense_w().iter().zip(&h_dropped) {
        prediction += w * h;
    }
    let cache = ForwardCache {
        steps,
        h_dropped,
        mask: dropout_mask.map(<[f64]>::to_vec),
    };
    Ok((prediction, cache))
}

/// Mean squared error.
pub fn mse_loss(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::invalid("mse of empty vectors"));
    }
    if predictions.len() != targets.len() {
        return Err(Error::invalid(format!(
            "mse length mismatch: {} vs {}",
            predictions.len(),
            targets.len()
        )));
    }
    let ss: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(ss / predictions.len() as f64)
}

/// Inverted-dropout mask: each unit is kept with probability 1 − rate and
/// scaled by 1/(1 − rate), so the masked activation is unbiased.
pub fn sample_dropout_mask<R: Rng>(rng: &mut R, len: usize, rate: f64) -> Vec<f64> {
    let keep = 1.0 - rate;
    (0..len)
        .map(|_| {
            if rng.random_bool(keep) {
                1.0 / keep
            } else {
                0.0
            }
        })
        .collect()
}

/// Exact gradients of the batch-mean MSE with respect to every parameter,
/// accumulated over batch elements and time steps in a fixed order
/// (backpropagation through time).
pub fn backward(
    predictions: &[f64],
    targets: &[f64],
    caches: &[ForwardCache],
    params: &LstmParams,
) -> Result<LstmParams> {
    let batch = predictions.len();
    if batch == 0 || targets.len() != batch || caches.len() != batch {
        return Err(Error::invalid(format!(
            "backward batch mismatch: {} predictions, {} targets, {} caches",
            batch,
            targets.len(),
            caches.len()
        )));
    }
    let h_size = params.hidden_size();
    let d = params.input_size();
    let row_len = d + h_size;
    let w = params.w();
    let dense_w = params.dense_w();
    let mut grads = LstmParams::zeros(h_size, d);

    for ((pred, target), cache) in predictions.iter().zip(targets).zip(caches) {
        let dpred = 2.0 * (pred - target) / batch as f64;

        // Dense head.
        for (gw, hd) in grads.dense_w_mut().iter_mut().zip(&cache.h_dropped) {
            *gw += dpred * hd;
        }
        *grads.dense_b_mut() += dpred;

        // Through dropout into the final hidden state.
        let mut dh: Vec<f64> = match &cache.mask {
            Some(mask) => dense_w
                .iter()
                .zip(mask)
                .map(|(w, m)| dpred * w * m)
                .collect(),
            None => dense_w.iter().map(|w| dpred * w).collect(),
        };
        let mut dc = vec![0.0; h_size];

        for step in cache.steps.iter().rev() {
            let mut dz = vec![0.0; 4 * h_size];
            for u in 0..h_size {
                let tanh_c = step.tanh_c[u];
                let do_ = dh[u] * tanh_c;
                let dc_total = dc[u] + dh[u] * step.o[u] * (1.0 - tanh_c * tanh_c);
                let di = dc_total * step.g[u];
                let df = dc_total * step.c_prev[u];
                let dg = dc_total * step.i[u];
                dz[u] = di * step.i[u] * (1.0 - step.i[u]);
                dz[h_size + u] = df * step.f[u] * (1.0 - step.f[u]);
                dz[2 * h_size + u] = dg * (1.0 - step.g[u] * step.g[u]);
                dz[3 * h_size + u] = do_ * step.o[u] * (1.0 - step.o[u]);
                dc[u] = dc_total * step.f[u];
            }

            let gw = grads.w_mut();
            for (r, dzr) in dz.iter().enumerate() {
                if *dzr == 0.0 {
                    continue;
                }
                let row = &mut gw[r * row_len..(r + 1) * row_len];
                for (slot, xj) in row[..d].iter_mut().zip(&step.x) {
                    *slot += dzr * xj;
                }
                for (slot, hj) in row[d..].iter_mut().zip(&step.h_prev) {
                    *slot += dzr * hj;
                }
            }
            for (gb, dzr) in grads.b_mut().iter_mut().zip(&dz) {
                *gb += dzr;
            }

            let mut dh_prev = vec![0.0; h_size];
            for (r, dzr) in dz.iter().enumerate() {
                if *dzr == 0.0 {
                    continue;
                }
                let row = &w[r * row_len..(r + 1) * row_len];
                for (dhp, wj) in dh_prev.iter_mut().zip(&row[d..]) {
                    *dhp += dzr * wj;
                }
            }
            dh = dh_prev;
        }
    }
    Ok(grads)
}
