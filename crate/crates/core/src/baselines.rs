//! Classical comparators: autoregression, moving average, ARMA, and ARIMA,
//! estimated by least squares / conditional sum of squares (CSS) with
//! Hannan–Rissanen initialization and a Nelder–Mead refinement.

use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MODEL_SCHEMA_VERSION: u32 = 1;
const RIDGE: f64 = 1e-8;
const SIMPLEX_MAX_ITER: usize = 500;
const SIMPLEX_TOL: f64 = 1e-8;

/// A fitted ARIMA(p,d,q) model in scaled units. AR and ARMA are the d=0
/// cases; a pure mean model has p=q=0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaModel {
    pub schema_version: u32,
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub intercept: f64,
    pub sigma2: f64,
    pub flags: ModelFlags,
}

/// Diagnostic flags recorded at fit time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFlags {
    /// AR polynomial roots all outside the unit circle.
    pub stationary: bool,
    /// Optimizer reached its improvement tolerance (always true for exact
    /// least-squares fits).
    pub converged: bool,
}

impl ArimaModel {
    fn validate(&self) -> Result<()> {
        if self.phi.len() != self.p || self.theta.len() != self.q {
            return Err(Error::invalid(format!(
                "coefficient lengths ({}, {}) disagree with orders ({}, {})",
                self.phi.len(),
                self.theta.len(),
                self.p,
                self.q
            )));
        }
        if self.sigma2 < 0.0 || !self.sigma2.is_finite() {
            return Err(Error::invalid(format!(
                "noise variance must be finite and >= 0, got {}",
                self.sigma2
            )));
        }
        let all = self.phi.iter().chain(&self.theta).chain([&self.intercept]);
        for v in all {
            if !v.is_finite() {
                return Err(Error::invalid("non-finite model coefficient"));
            }
        }
        Ok(())
    }
}

/// Forecast aligned with (optional) actuals over the evaluation region.
/// Values are in the caller's units: scaled during model evaluation, MWh in
/// emitted reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastSeries {
    pub timestamps: Option<Vec<DateTime<Utc>>>,
    pub predicted: Vec<f64>,
    pub actual: Option<Vec<f64>>,
}

impl ForecastSeries {
    pub fn new(
        timestamps: Option<Vec<DateTime<Utc>>>,
        predicted: Vec<f64>,
        actual: Option<Vec<f64>>,
    ) -> Result<Self> {
        if predicted.is_empty() {
            return Err(Error::invalid("empty forecast"));
        }
        if let Some(v) = predicted.iter().find(|v| !v.is_finite()) {
            return Err(Error::numerical(format!("non-finite prediction {v}")));
        }
        if let Some(ts) = &timestamps {
            if ts.len() != predicted.len() {
                return Err(Error::invalid(format!(
                    "{} timestamps for {} predictions",
                    ts.len(),
                    predicted.len()
                )));
            }
        }
        if let Some(a) = &actual {
            if a.len() != predicted.len() {
                return Err(Error::invalid(format!(
                    "{} actuals for {} predictions",
                    a.len(),
                    predicted.len()
                )));
            }
        }
        Ok(Self {
            timestamps,
            predicted,
            actual,
        })
    }

    pub fn len(&self) -> usize {
        self.predicted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicted.is_empty()
    }
}

/// How forecasts consume history during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    /// One step ahead from true observed history at every test index.
    Rolling,
    /// Recursive: the model's own predictions are fed back as history.
    Static,
}

impl std::str::FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "rolling" => Ok(EvalMode::Rolling),
            "static" => Ok(EvalMode::Static),
            other => Err(Error::invalid(format!(
                "unknown evaluation mode {other:?} (expected rolling or static)"
            ))),
        }
    }
}

impl std::fmt::Display for EvalMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalMode::Rolling => write!(f, "rolling"),
            EvalMode::Static => write!(f, "static"),
        }
    }
}

/// Solves (XᵀX + ridge·I)β = Xᵀy by Gaussian elimination with partial
/// pivoting. `x` is row-major with `cols` predictors per row.
fn solve_least_squares(x: &[f64], cols: usize, y: &[f64], ridge: f64) -> Result<Vec<f64>> {
    let rows = y.len();
    debug_assert_eq!(x.len(), rows * cols);
    let mut xtx = vec![0.0; cols * cols];
    let mut xty = vec![0.0; cols];
    for r in 0..rows {
        let row = &x[r * cols..(r + 1) * cols];
        for i in 0..cols {
            xty[i] += row[i] * y[r];
            for j in i..cols {
                xtx[i * cols + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..cols {
        xtx[i * cols + i] += ridge;
        for j in 0..i {
            xtx[i * cols + j] = xtx[j * cols + i];
        }
    }
    // Augmented elimination on [XtX | Xty].
    let mut a = vec![0.0; cols * (cols + 1)];
    for i in 0..cols {
        a[i * (cols + 1)..i * (cols + 1) + cols].copy_from_slice(&xtx[i * cols..(i + 1) * cols]);
        a[i * (cols + 1) + cols] = xty[i];
    }
    let w = cols + 1;
    for col in 0..cols {
        let pivot_row = (col..cols)
            .max_by(|&i, &j| {
                a[i * w + col]
                    .abs()
                    .partial_cmp(&a[j * w + col].abs())
                    .expect("finite design matrix")
            })
            .expect("non-empty pivot range");
        if a[pivot_row * w + col].abs() < 1e-300 {
            return Err(Error::numerical(
                "singular normal equations in least squares",
            ));
        }
        if pivot_row != col {
            for k in 0..w {
                a.swap(col * w + k, pivot_row * w + k);
            }
        }
        let pivot = a[col * w + col];
        for row in 0..cols {
            if row == col {
                continue;
            }
            let factor = a[row * w + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..w {
                a[row * w + k] -= factor * a[col * w + k];
            }
        }
    }
    Ok((0..cols).map(|i| a[i * w + cols] / a[i * w + i]).collect())
}

/// Stationarity check by the step-down (inverse Levinson) recursion on the
/// AR coefficients: the process is stationary iff every implied partial
/// autocorrelation has magnitude below 1.
fn ar_is_stationary(phi: &[f64]) -> bool {
    let mut a = phi.to_vec();
    for k in (1..=phi.len()).rev() {
        let r = a[k - 1];
        if r.abs() >= 1.0 {
            return false;
        }
        if k == 1 {
            break;
        }
        let denom = 1.0 - r * r;
        let prev: Vec<f64> = (0..k - 1)
            .map(|j| (a[j] + r * a[k - 2 - j]) / denom)
            .collect();
        a = prev;
    }
    true
}

/// Fits x_t = c + Σφ_i x_{t−i} + e_t by least squares over t = p..n−1.
pub fn fit_ar(train: &[f64], p: usize) -> Result<ArimaModel> {
    if p == 0 {
        return Err(Error::invalid("AR order p must be at least 1"));
    }
    if train.len() <= p + 1 {
        return Err(Error::invalid(format!(
            "AR({p}) needs more than {} observations, got {}",
            p + 1,
            train.len()
        )));
    }
    let n = train.len();
    let rows = n - p;
    let cols = p + 1;
    let mut x = Vec::with_capacity(rows * cols);
    let mut y = Vec::with_capacity(rows);
    for t in p..n {
        x.push(1.0);
        for i in 1..=p {
            x.push(train[t - i]);
        }
        y.push(train[t]);
    }
    let beta = solve_least_squares(&x, cols, &y, RIDGE)?;
    let intercept = beta[0];
    let phi = beta[1..].to_vec();
    let mut ss = 0.0;
    for t in p..n {
        let mut pred = intercept;
        for (i, ph) in phi.iter().enumerate() {
            pred += ph * train[t - 1 - i];
        }
        let e = train[t] - pred;
        ss += e * e;
    }
    let model = ArimaModel {
        schema_version: MODEL_SCHEMA_VERSION,
        p,
        d: 0,
        q: 0,
        flags: ModelFlags {
            stationary: ar_is_stationary(&phi),
            converged: true,
        },
        phi,
        theta: Vec::new(),
        intercept,
        sigma2: ss / rows as f64,
    };
    model.validate()?;
    Ok(model)
}

/// Recursive moving-average forecast: each step predicts the mean of the
/// last `window` values and appends its own prediction. With horizon 1 this
/// is the one-step smoother; rolling evaluation calls it per step over true
/// history.
pub fn moving_average_forecast(history: &[f64], window: usize, horizon: usize) -> Result<Vec<f64>> {
    if window < 1 {
        return Err(Error::invalid("window must be at least 1"));
    }
    if history.len() < window {
        return Err(Error::invalid(format!(
            "window {window} exceeds history length {}",
            history.len()
        )));
    }
    let mut tail = history[history.len() - window..].to_vec();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let f = tail[tail.len() - window..].iter().sum::<f64>() / window as f64;
        out.push(f);
        tail.push(f);
    }
    Ok(out)
}

/// Conditional sum of squared one-step innovations with zero pre-sample
/// innovations: e_t = x_t − c − Σφ_i x_{t−i} − Σθ_j e_{t−j}, e_t = 0 for
/// t < max(p, q).
fn css(w: &[f64], intercept: f64, phi: &[f64], theta: &[f64]) -> f64 {
    let p = phi.len();
    let q = theta.len();
    let start = p.max(q);
    let mut e = vec![0.0; w.len()];
    let mut ss = 0.0;
    for t in start..w.len() {
        let mut pred = intercept;
        for (i, ph) in phi.iter().enumerate() {
            pred += ph * w[t - 1 - i];
        }
        for (j, th) in theta.iter().enumerate() {
            pred += th * e[t - 1 - j];
        }
        let err = w[t] - pred;
        e[t] = err;
        ss += err * err;
    }
    ss
}

/// Hannan–Rissanen initialization: fit a long AR, take its residuals as
/// innovation proxies, then regress x_t on lagged values and lagged
/// residuals to seed (c, φ, θ).
fn hannan_rissanen(train: &[f64], p: usize, q: usize) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let n = train.len();
    let mut h = ((10.0 * (n as f64).log10()).round() as usize).max(p + q);
    h = h.min(n / 4).max(1);
    let long_ar = fit_ar(train, h)?;
    let mut resid = vec![0.0; n];
    for t in h..n {
        let mut pred = long_ar.intercept;
        for (i, ph) in long_ar.phi.iter().enumerate() {
            pred += ph * train[t - 1 - i];
        }
        resid[t] = train[t] - pred;
    }
    let start = p.max(h + q);
    if start >= n {
        return Err(Error::invalid(format!(
            "series too short ({n}) for ARMA({p},{q}) initialization"
        )));
    }
    let cols = 1 + p + q;
    let rows = n - start;
    let mut x = Vec::with_capacity(rows * cols);
    let mut y = Vec::with_capacity(rows);
    for t in start..n {
        x.push(1.0);
        for i in 1..=p {
            x.push(train[t - i]);
        }
        for j in 1..=q {
            x.push(resid[t - j]);
        }
        y.push(train[t]);
    }
    let beta = solve_least_squares(&x, cols, &y, RIDGE)?;
    Ok((beta[0], beta[1..1 + p].to_vec(), beta[1 + p..].to_vec()))
}

struct SimplexResult {
    x: Vec<f64>,
    value: f64,
    /// Best objective value after each iteration; non-increasing.
    #[cfg_attr(not(test), allow(dead_code))]
    trace: Vec<f64>,
    converged: bool,
}

/// Nelder–Mead simplex minimization. Stops once the relative spread of
/// objective values across the simplex drops below `tol` — the spread bounds
/// the improvement any further move can find without re-expanding — or after
/// `max_iter` iterations.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], max_iter: usize, tol: f64) -> SimplexResult {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let dim = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += 0.1 * v[i].abs() + 0.01;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let order = |simplex: &mut Vec<Vec<f64>>, values: &mut Vec<f64>| {
        let mut idx: Vec<usize> = (0..simplex.len()).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite objective"));
        let new_simplex: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let new_values: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
        *simplex = new_simplex;
        *values = new_values;
    };
    order(&mut simplex, &mut values);

    let mut trace = Vec::with_capacity(max_iter);
    let mut converged = false;

    for _ in 0..max_iter {
        let mut centroid = vec![0.0; dim];
        for v in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(c, w)| c + ALPHA * (c - w))
            .collect();
        let fr = f(&reflect);

        if fr < values[0] {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + GAMMA * (c - w))
                .collect();
            let fe = f(&expand);
            if fe < fr {
                simplex[dim] = expand;
                values[dim] = fe;
            } else {
                simplex[dim] = reflect;
                values[dim] = fr;
            }
        } else if fr < values[dim - 1] {
            simplex[dim] = reflect;
            values[dim] = fr;
        } else {
            let toward = if fr < values[dim] { &reflect } else { &worst };
            let f_toward = if fr < values[dim] { fr } else { values[dim] };
            let contract: Vec<f64> = centroid
                .iter()
                .zip(toward)
                .map(|(c, t)| c + RHO * (t - c))
                .collect();
            let fc = f(&contract);
            if fc < f_toward {
                simplex[dim] = contract;
                values[dim] = fc;
            } else {
                for i in 1..=dim {
                    let shrunk: Vec<f64> = simplex[0]
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, v)| b + SIGMA * (v - b))
                        .collect();
                    values[i] = f(&shrunk);
                    simplex[i] = shrunk;
                }
            }
        }
        order(&mut simplex, &mut values);
        trace.push(values[0]);

        // Judging convergence by per-iteration improvement quits too early:
        // the incumbent best routinely survives several reshaping moves.
        let spread =
            2.0 * (values[dim] - values[0]).abs() / (values[dim].abs() + values[0].abs() + 1e-300);
        if spread < tol {
            converged = true;
            break;
        }
    }

    SimplexResult {
        x: simplex.swap_remove(0),
        value: values[0],
        trace,
        converged,
    }
}

/// Fits an ARMA(p,q) by CSS. q=0 reduces to the exact AR least-squares fit;
/// otherwise Hannan–Rissanen seeds a Nelder–Mead refinement of the CSS
/// objective (stops below 1e-8 relative improvement or at 500 iterations).
/// Non-convergence returns the best parameters found with the flag cleared.
pub fn fit_arma(train: &[f64], p: usize, q: usize) -> Result<ArimaModel> {
    if p + q == 0 {
        return Err(Error::invalid("ARMA needs p + q >= 1"));
    }
    if train.len() <= p + q + 1 {
        return Err(Error::invalid(format!(
            "ARMA({p},{q}) needs more than {} observations, got {}",
            p + q + 1,
            train.len()
        )));
    }
    if q == 0 {
        return fit_ar(train, p);
    }
    let (c0, phi0, theta0) = hannan_rissanen(train, p, q)?;
    let mut x0 = Vec::with_capacity(1 + p + q);
    x0.push(c0);
    x0.extend_from_slice(&phi0);
    x0.extend_from_slice(&theta0);
    let objective = |x: &[f64]| css(train, x[0], &x[1..1 + p], &x[1 + p..]);
    let result = nelder_mead(objective, &x0, SIMPLEX_MAX_ITER, SIMPLEX_TOL);
    let intercept = result.x[0];
    let phi = result.x[1..1 + p].to_vec();
    let theta = result.x[1 + p..].to_vec();
    let denom = (train.len() - p.max(q)) as f64;
    let model = ArimaModel {
        schema_version: MODEL_SCHEMA_VERSION,
        p,
        d: 0,
        q,
        flags: ModelFlags {
            stationary: ar_is_stationary(&phi),
            converged: result.converged,
        },
        phi,
        theta,
        intercept,
        sigma2: result.value / denom,
    };
    model.validate()?;
    Ok(model)
}

fn difference_once(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Fits an ARIMA(p,d,q): difference the series d times, fit ARMA(p,q) on
/// the result, and record d for forecast integration. p=q=0 fits the pure
/// mean model on the differenced series.
pub fn fit_arima(train: &[f64], p: usize, d: usize, q: usize) -> Result<ArimaModel> {
    if train.len() <= p + q + d + 1 {
        return Err(Error::invalid(format!(
            "ARIMA({p},{d},{q}) needs more than {} observations, got {}",
            p + q + d + 1,
            train.len()
        )));
    }
    let mut w = train.to_vec();
    for _ in 0..d {
        w = difference_once(&w);
    }
    let mut model = if p + q == 0 {
        let n = w.len() as f64;
        let mean = w.iter().sum::<f64>() / n;
        let sigma2 = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        ArimaModel {
            schema_version: MODEL_SCHEMA_VERSION,
            p: 0,
            d: 0,
            q: 0,
            phi: Vec::new(),
            theta: Vec::new(),
            intercept: mean,
            sigma2,
            flags: ModelFlags {
                stationary: true,
                converged: true,
            },
        }
    } else {
        fit_arma(&w, p, q)?
    };
    model.d = d;
    model.validate()?;
    Ok(model)
}

/// Incremental forecasting state: differencing tails for integration plus
/// the recent differenced values and innovations the ARMA recursion needs.
struct FilterState {
    intercept: f64,
    phi: Vec<f64>,
    theta: Vec<f64>,
    /// diff_tails[l] = last seen value of the l-times-differenced series.
    diff_tails: Vec<f64>,
    /// Last p fully-differenced values, most recent last.
    w_recent: Vec<f64>,
    /// Last q innovations, most recent last.
    e_recent: Vec<f64>,
}

impl FilterState {
    /// Builds the state by differencing `history` d times and reconstructing
    /// innovations with the CSS convention (zero before max(p,q)).
    fn new(model: &ArimaModel, history: &[f64]) -> Result<Self> {
        model.validate()?;
        if history.len() < model.p + model.d {
            return Err(Error::invalid(format!(
                "history length {} below required {} (p + d)",
                history.len(),
                model.p + model.d
            )));
        }
        let mut w = history.to_vec();
        let mut diff_tails = Vec::with_capacity(model.d);
        for _ in 0..model.d {
            diff_tails.push(*w.last().expect("length checked above"));
            w = difference_once(&w);
        }
        let p = model.p;
        let q = model.q;
        let start = p.max(q);
        let mut e = vec![0.0; w.len()];
        for t in start..w.len() {
            let mut pred = model.intercept;
            for (i, ph) in model.phi.iter().enumerate() {
                pred += ph * w[t - 1 - i];
            }
            for (j, th) in model.theta.iter().enumerate() {
                pred += th * e[t - 1 - j];
            }
            e[t] = w[t] - pred;
        }
        let w_recent = w[w.len() - p..].to_vec();
        let e_recent = if q <= e.len() {
            e[e.len() - q..].to_vec()
        } else {
            // Differenced history shorter than q: pad the oldest
            // innovations with the zero pre-sample convention.
            let mut padded = vec![0.0; q - e.len()];
            padded.extend_from_slice(&e);
            padded
        };
        Ok(Self {
            intercept: model.intercept,
            phi: model.phi.clone(),
            theta: model.theta.clone(),
            diff_tails,
            w_recent,
            e_recent,
        })
    }

    /// One-step prediction in differenced space.
    fn predict_differenced(&self) -> f64 {
        let mut w_hat = self.intercept;
        let nw = self.w_recent.len();
        for (i, ph) in self.phi.iter().enumerate() {
            w_hat += ph * self.w_recent[nw - 1 - i];
        }
        let ne = self.e_recent.len();
        for (j, th) in self.theta.iter().enumerate() {
            w_hat += th * self.e_recent[ne - 1 - j];
        }
        w_hat
    }

    /// One-step prediction on the original (undifferenced) scale.
    fn predict(&self) -> f64 {
        self.predict_differenced() + self.diff_tails.iter().sum::<f64>()
    }

    /// Absorbs the next observed value, updating tails, recent differenced
    /// values, and innovations. Feeding the state's own prediction yields a
    /// zero innovation — exactly the recursive (static) forecast.
    fn observe(&mut self, x_next: f64) {
        let w_hat = self.predict_differenced();
        let mut w_val = x_next;
        for tail in &mut self.diff_tails {
            let level_value = w_val;
            w_val -= *tail;
            *tail = level_value;
        }
        if !self.phi.is_empty() {
            self.w_recent.remove(0);
            self.w_recent.push(w_val);
        }
        if !self.theta.is_empty() {
            self.e_recent.remove(0);
            self.e_recent.push(w_val - w_hat);
        }
    }
}

/// Predicts the value following `history` on the original scale of its
/// input. Innovations are reconstructed by filtering the history through
/// the model; the result is deterministic.
pub fn forecast_one_step(model: &ArimaModel, history: &[f64]) -> Result<f64> {
    Ok(FilterState::new(model, history)?.predict())
}

/// Forecasts the whole test region. Rolling mode feeds each true test value
/// back as history; static mode recurses on the model's own predictions.
pub fn rolling_forecast(
    model: &ArimaModel,
    test: &[f64],
    warmup: &[f64],
    mode: EvalMode,
) -> Result<ForecastSeries> {
    if test.is_empty() {
        return Err(Error::invalid("empty test region"));
    }
    let mut state = FilterState::new(model, warmup)?;
    let mut predicted = Vec::with_capacity(test.len());
    for &actual in test {
        let y_hat = state.predict();
        predicted.push(y_hat);
        match mode {
            EvalMode::Rolling => state.observe(actual),
            EvalMode::Static => state.observe(y_hat),
        }
    }
    ForecastSeries::new(None, predicted, Some(test.to_vec()))
}

/// Saves a model as versioned JSON.
pub fn save_model(model: &ArimaModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(model)
        .map_err(|e| Error::invalid(format!("model serialization failed: {e}")))?;
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}

/// Loads and validates a model saved by [`save_model`].
pub fn load_model(path: impl AsRef<Path>) -> Result<ArimaModel> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let model: ArimaModel = serde_json::from_str(&raw)
        .map_err(|e| Error::invalid(format!("malformed model file {}: {e}", path.display())))?;
    if model.schema_version != MODEL_SCHEMA_VERSION {
        return Err(Error::invalid(format!(
            "unsupported model schema version {}",
            model.schema_version
        )));
    }
    model.validate()?;
    Ok(model)
}
