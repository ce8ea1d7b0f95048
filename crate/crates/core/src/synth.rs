//! Synthetic data generation: a daily-seasonal load series (sine + trend +
//! AR(1) noise) for dataset-free end-to-end runs, and an ARMA process
//! simulator used as an estimator-recovery oracle.

use std::path::Path;

use chrono::{TimeZone, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::LoadSeries;
use crate::error::{Error, Result};

/// Discarded prefix so simulated processes start near their stationary law.
const BURN_IN: usize = 500;

/// Parameters of the synthetic load generator:
/// x_t = base + amplitude·sin(2πt/period) + trend·t + u_t with
/// u_t = ar_coeff·u_{t−1} + ε_t, ε_t ~ N(0, noise_sd²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n: usize,
    pub base: f64,
    pub amplitude: f64,
    pub period: f64,
    pub trend: f64,
    pub ar_coeff: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n: 5000,
            base: 28_000.0,
            amplitude: 4_000.0,
            period: 24.0,
            trend: 0.05,
            ar_coeff: 0.8,
            noise_sd: 300.0,
            seed: 7,
        }
    }
}

/// Generates an hourly load series starting 2015-01-01 00:00 UTC.
pub fn generate_load_series(config: &SynthConfig) -> Result<LoadSeries> {
    if config.n < 2 {
        return Err(Error::invalid("synthetic series needs n >= 2"));
    }
    if config.period.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::invalid("period must be positive"));
    }
    if config.ar_coeff.abs() >= 1.0 {
        return Err(Error::invalid(format!(
            "AR(1) noise coefficient {} is not stationary",
            config.ar_coeff
        )));
    }
    if config.noise_sd < 0.0 || config.noise_sd.is_nan() {
        return Err(Error::invalid("noise_sd must be non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normal = Normal::new(0.0, config.noise_sd)
        .map_err(|e| Error::invalid(format!("bad noise distribution: {e}")))?;
    let start = Utc.with_ymd_and_hms(2015, 1, 1, 0, 0, 0).unwrap();
    let mut timestamps = Vec::with_capacity(config.n);
    let mut values = Vec::with_capacity(config.n);
    let mut u = 0.0;
    for t in 0..config.n {
        u = config.ar_coeff * u + normal.sample(&mut rng);
        let phase = 2.0 * std::f64::consts::PI * t as f64 / config.period;
        let x = config.base + config.amplitude * phase.sin() + config.trend * t as f64 + u;
        timestamps.push(start + chrono::Duration::hours(t as i64));
        values.push(x);
    }
    LoadSeries::new(timestamps, values)
}

/// Simulates a stationary ARMA(p,q) process with Gaussian innovations:
/// x_t = intercept + Σφ_i x_{t−i} + ε_t + Σθ_j ε_{t−j}.
/// The first [`BURN_IN`] draws are discarded.
pub fn simulate_arma(
    phi: &[f64],
    theta: &[f64],
    intercept: f64,
    noise_sd: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("cannot simulate an empty series"));
    }
    if noise_sd.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::invalid("noise_sd must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise_sd)
        .map_err(|e| Error::invalid(format!("bad noise distribution: {e}")))?;
    let total = n + BURN_IN;
    let mut xs: Vec<f64> = Vec::with_capacity(total);
    let mut es: Vec<f64> = Vec::with_capacity(total);
    for t in 0..total {
        let eps = normal.sample(&mut rng);
        let mut x = intercept + eps;
        for (i, p) in phi.iter().enumerate() {
            if t > i {
                x += p * xs[t - 1 - i];
            }
        }
        for (j, q) in theta.iter().enumerate() {
            if t > j {
                x += q * es[t - 1 - j];
            }
        }
        if !x.is_finite() {
            return Err(Error::numerical(format!(
                "simulated process diverged at step {t}"
            )));
        }
        xs.push(x);
        es.push(eps);
    }
    Ok(xs.split_off(BURN_IN))
}

/// Writes a load series as a two-column CSV (`time,load`) readable by the
/// ingestion pipeline.
pub fn write_csv(series: &LoadSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => {
            let io = std::io::Error::other(e.to_string());
            Error::io(path, io)
        }
        _ => Error::Csv(e),
    })?;
    writer.write_record(["time", "load"])?;
    for (t, v) in series.timestamps().iter().zip(series.values()) {
        writer.write_record([t.format("%Y-%m-%d %H:%M:%S").to_string(), v.to_string()])?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
