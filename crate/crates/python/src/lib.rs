//! Python bindings for the forecasting library: correlation analysis,
//! classical baseline models, the LSTM regressor, and the error metrics,
//! operating on plain Python lists of floats.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use gridcast::baselines::{self, ArimaModel, EvalMode};
use gridcast::correlation;
use gridcast::data::{self, ScalerParams};
use gridcast::lstm::{
    self, load_checkpoint, network_forward, save_checkpoint, LstmConfig, LstmParams,
};
use gridcast::metrics;
use gridcast::synth;
use gridcast::Error;

/// Scaled-space identity: forecasts stay in the caller's units.
const IDENTITY_SCALER: ScalerParams = ScalerParams { min: 0.0, max: 1.0 };

fn to_py(e: Error) -> PyErr {
    match &e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<EvalMode> {
    mode.parse().map_err(to_py)
}

// ---------------------------------------------------------------------------
// Metrics and correlation
// ---------------------------------------------------------------------------

/// Mean absolute error between two equal-length series.
#[pyfunction]
fn mae(actual: Vec<f64>, predicted: Vec<f64>) -> PyResult<f64> {
    metrics::mae(&actual, &predicted).map_err(to_py)
}

/// Mean absolute percentage error (in percent) between two series.
#[pyfunction]
fn mape(actual: Vec<f64>, predicted: Vec<f64>) -> PyResult<f64> {
    metrics::mape(&actual, &predicted).map_err(to_py)
}

/// Pearson correlation coefficient of two equal-length series.
#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    correlation::pearson(&x, &y).map_err(to_py)
}

/// Autocorrelation function values for lags 0..=max_lag.
#[pyfunction]
fn acf(series: Vec<f64>, max_lag: usize) -> PyResult<Vec<f64>> {
    Ok(correlation::acf(&series, max_lag)
        .map_err(to_py)?
        .into_iter()
        .map(|p| p.value)
        .collect())
}

/// Partial autocorrelation function values for lags 0..=max_lag
/// (Durbin–Levinson; pacf[0] is 1 by convention).
#[pyfunction]
fn pacf(series: Vec<f64>, max_lag: usize) -> PyResult<Vec<f64>> {
    Ok(correlation::pacf(&series, max_lag)
        .map_err(to_py)?
        .into_iter()
        .map(|p| p.value)
        .collect())
}

// ---------------------------------------------------------------------------
// Scaling and windowing
// ---------------------------------------------------------------------------

/// Min-max bounds of a training slice, as a (min, max) pair.
#[pyfunction]
fn fit_scaler(values: Vec<f64>) -> PyResult<(f64, f64)> {
    let s = data::fit_scaler(&values).map_err(to_py)?;
    Ok((s.min, s.max))
}

/// Maps values into [0, 1] with the given (min, max) bounds.
#[pyfunction]
fn scale(values: Vec<f64>, min: f64, max: f64) -> Vec<f64> {
    data::scale(&values, &ScalerParams { min, max })
}

/// Inverse of `scale`: maps [0, 1] values back to the original units.
#[pyfunction]
fn inverse_scale(values: Vec<f64>, min: f64, max: f64) -> Vec<f64> {
    data::inverse_scale(&values, &ScalerParams { min, max })
}

/// Sliding windows of `lookback` inputs each, paired with the next value:
/// returns (windows, targets).
#[pyfunction]
fn make_windows(values: Vec<f64>, lookback: usize) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let ds = data::make_windows(&values, lookback).map_err(to_py)?;
    let windows = (0..ds.len()).map(|i| ds.input_row(i).to_vec()).collect();
    Ok((windows, ds.targets().to_vec()))
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Hourly synthetic load curve (daily sine + linear trend + AR(1) noise).
#[pyfunction]
#[pyo3(signature = (n=5000, base=28000.0, amplitude=4000.0, period=24.0,
                    trend=0.05, ar_coeff=0.8, noise_sd=300.0, seed=7))]
#[allow(clippy::too_many_arguments)]
fn generate_load(
    n: usize,
    base: f64,
    amplitude: f64,
    period: f64,
    trend: f64,
    ar_coeff: f64,
    noise_sd: f64,
    seed: u64,
) -> PyResult<Vec<f64>> {
    let config = synth::SynthConfig {
        n,
        base,
        amplitude,
        period,
        trend,
        ar_coeff,
        noise_sd,
        seed,
    };
    Ok(synth::generate_load_series(&config)
        .map_err(to_py)?
        .values()
        .to_vec())
}

/// Draws a stationary ARMA(p, q) sample path after burn-in.
#[pyfunction]
#[pyo3(signature = (phi, theta, intercept=0.0, noise_sd=1.0, n=1000, seed=0))]
fn simulate_arma(
    phi: Vec<f64>,
    theta: Vec<f64>,
    intercept: f64,
    noise_sd: f64,
    n: usize,
    seed: u64,
) -> PyResult<Vec<f64>> {
    synth::simulate_arma(&phi, &theta, intercept, noise_sd, n, seed).map_err(to_py)
}

// ---------------------------------------------------------------------------
// Classical baselines
// ---------------------------------------------------------------------------

/// Fitted ARIMA-family model (AR and ARMA are the d=0 special cases).
#[pyclass(name = "Model")]
struct PyModel {
    inner: ArimaModel,
}

#[pymethods]
impl PyModel {
    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }
    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }
    #[getter]
    fn q(&self) -> usize {
        self.inner.q
    }
    #[getter]
    fn phi(&self) -> Vec<f64> {
        self.inner.phi.clone()
    }
    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.inner.theta.clone()
    }
    #[getter]
    fn intercept(&self) -> f64 {
        self.inner.intercept
    }
    #[getter]
    fn sigma2(&self) -> f64 {
        self.inner.sigma2
    }
    #[getter]
    fn stationary(&self) -> bool {
        self.inner.flags.stationary
    }
    #[getter]
    fn converged(&self) -> bool {
        self.inner.flags.converged
    }

    /// One prediction per test value. Rolling mode conditions on the true
    /// test history; static mode feeds predictions back on themselves.
    #[pyo3(signature = (test, warmup, mode="rolling"))]
    fn forecast(&self, test: Vec<f64>, warmup: Vec<f64>, mode: &str) -> PyResult<Vec<f64>> {
        let mode = parse_mode(mode)?;
        Ok(
            baselines::rolling_forecast(&self.inner, &test, &warmup, mode)
                .map_err(to_py)?
                .predicted,
        )
    }

    /// Single one-step-ahead prediction from the end of `history`.
    fn predict_next(&self, history: Vec<f64>) -> PyResult<f64> {
        baselines::forecast_one_step(&self.inner, &history).map_err(to_py)
    }

    /// Serializes the model to a JSON file.
    fn save(&self, path: &str) -> PyResult<()> {
        baselines::save_model(&self.inner, path).map_err(to_py)
    }

    /// Loads a model saved with `save`.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: baselines::load_model(path).map_err(to_py)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(p={}, d={}, q={}, intercept={:.6}, sigma2={:.6})",
            self.inner.p, self.inner.d, self.inner.q, self.inner.intercept, self.inner.sigma2
        )
    }
}

/// Least-squares AR(p) fit.
#[pyfunction]
fn fit_ar(series: Vec<f64>, p: usize) -> PyResult<PyModel> {
    Ok(PyModel {
        inner: baselines::fit_ar(&series, p).map_err(to_py)?,
    })
}

/// ARMA(p, q) fit by conditional sum of squares.
#[pyfunction]
fn fit_arma(series: Vec<f64>, p: usize, q: usize) -> PyResult<PyModel> {
    Ok(PyModel {
        inner: baselines::fit_arma(&series, p, q).map_err(to_py)?,
    })
}

/// ARIMA(p, d, q) fit: d-fold differencing, then the ARMA estimator.
#[pyfunction]
fn fit_arima(series: Vec<f64>, p: usize, d: usize, q: usize) -> PyResult<PyModel> {
    Ok(PyModel {
        inner: baselines::fit_arima(&series, p, d, q).map_err(to_py)?,
    })
}

/// Recursive moving-average forecast of `horizon` steps past `history`.
#[pyfunction]
fn moving_average_forecast(history: Vec<f64>, window: usize, horizon: usize) -> PyResult<Vec<f64>> {
    baselines::moving_average_forecast(&history, window, horizon).map_err(to_py)
}

// ---------------------------------------------------------------------------
// LSTM
// ---------------------------------------------------------------------------

/// Trainable parameter counts — (recurrent cell, dense head) — for the
/// given network shape.
#[pyfunction]
#[pyo3(signature = (hidden_size, input_size, seq_len=1))]
fn param_count(hidden_size: usize, input_size: usize, seq_len: usize) -> (usize, usize) {
    let config = LstmConfig {
        hidden_size,
        input_size,
        seq_len,
        ..LstmConfig::default()
    };
    lstm::param_count(&config)
}

/// Trained LSTM regressor operating on fixed-length input windows.
#[pyclass(name = "Lstm")]
struct PyLstm {
    params: LstmParams,
    config: LstmConfig,
    log: Vec<(usize, f64, Option<f64>)>,
}

#[pymethods]
impl PyLstm {
    /// Trains on sliding windows of `series` (typically pre-scaled to
    /// [0, 1]). The last `val_fraction` of the windows is held out for
    /// validation loss reporting.
    #[staticmethod]
    #[pyo3(signature = (series, lookback, hidden_size=32, epochs=10, batch_size=16,
                        learning_rate=0.01, dropout_rate=0.2, seed=42, val_fraction=0.0))]
    #[allow(clippy::too_many_arguments)]
    fn train(
        series: Vec<f64>,
        lookback: usize,
        hidden_size: usize,
        epochs: usize,
        batch_size: usize,
        learning_rate: f64,
        dropout_rate: f64,
        seed: u64,
        val_fraction: f64,
    ) -> PyResult<Self> {
        if !(0.0..1.0).contains(&val_fraction) {
            return Err(PyValueError::new_err(format!(
                "val_fraction must be in [0, 1), got {val_fraction}"
            )));
        }
        let config = LstmConfig {
            hidden_size,
            input_size: lookback,
            seq_len: 1,
            dropout_rate,
            epochs,
            batch_size,
            learning_rate,
            seed,
        };
        let windows = data::make_windows(&series, lookback).map_err(to_py)?;
        let n_val = (windows.len() as f64 * val_fraction).floor() as usize;
        let boundary = windows.len() - n_val;
        let train_set = windows.slice(0, boundary);
        let val_set = (n_val > 0).then(|| windows.slice(boundary, windows.len()));
        let (params, log) = lstm::train(&train_set, val_set.as_ref(), &config).map_err(to_py)?;
        Ok(Self {
            params,
            config,
            log: log
                .records
                .iter()
                .map(|r| (r.epoch, r.train_loss, r.val_loss))
                .collect(),
        })
    }

    /// (epoch, train_loss, val_loss) per epoch; val_loss is None when no
    /// validation split was requested.
    #[getter]
    fn training_log(&self) -> Vec<(usize, f64, Option<f64>)> {
        self.log.clone()
    }

    #[getter]
    fn hidden_size(&self) -> usize {
        self.config.hidden_size
    }

    /// Input window length the network expects.
    #[getter]
    fn lookback(&self) -> usize {
        self.config.window_len()
    }

    /// (recurrent, dense) trainable parameter counts.
    #[getter]
    fn param_count(&self) -> (usize, usize) {
        lstm::param_count(&self.config)
    }

    /// One-step prediction from a single input window.
    fn predict(&self, window: Vec<f64>) -> PyResult<f64> {
        Ok(
            network_forward(&window, &self.params, self.config.seq_len, None)
                .map_err(to_py)?
                .0,
        )
    }

    /// Rolling one-step predictions for the last `test_length` points of
    /// `history`, always conditioning on true observed windows.
    fn forecast(&self, history: Vec<f64>, test_length: usize) -> PyResult<Vec<f64>> {
        Ok(lstm::predict_series(
            &self.params,
            &self.config,
            &history,
            test_length,
            &IDENTITY_SCALER,
            None,
        )
        .map_err(to_py)?
        .predicted)
    }

    /// Writes the network to a JSON checkpoint.
    fn save(&self, path: &str) -> PyResult<()> {
        save_checkpoint(path, &self.config, &self.params, None).map_err(to_py)
    }

    /// Loads a checkpoint written by `save` (or by the CLI trainer).
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let (config, params, _) = load_checkpoint(path).map_err(to_py)?;
        Ok(Self {
            params,
            config,
            log: Vec::new(),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Lstm(hidden_size={}, lookback={}, epochs={})",
            self.config.hidden_size,
            self.config.window_len(),
            self.config.epochs
        )
    }
}

#[pymodule]
fn gridcast_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(mae, m)?)?;
    m.add_function(wrap_pyfunction!(mape, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(acf, m)?)?;
    m.add_function(wrap_pyfunction!(pacf, m)?)?;
    m.add_function(wrap_pyfunction!(fit_scaler, m)?)?;
    m.add_function(wrap_pyfunction!(scale, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_scale, m)?)?;
    m.add_function(wrap_pyfunction!(make_windows, m)?)?;
    m.add_function(wrap_pyfunction!(generate_load, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_arma, m)?)?;
    m.add_function(wrap_pyfunction!(fit_ar, m)?)?;
    m.add_function(wrap_pyfunction!(fit_arma, m)?)?;
    m.add_function(wrap_pyfunction!(fit_arima, m)?)?;
    m.add_function(wrap_pyfunction!(moving_average_forecast, m)?)?;
    m.add_function(wrap_pyfunction!(param_count, m)?)?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyLstm>()?;
    Ok(())
}
