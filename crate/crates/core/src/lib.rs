//! Hourly electricity-demand forecasting.
//!
//! The pipeline mirrors a common load-forecasting workflow: ingest an hourly
//! energy CSV, explore and clean it, build supervised sliding windows, train
//! a from-scratch LSTM regressor, fit classical time-series baselines
//! (AR / moving average / ARMA / ARIMA), and compare all models by MAE and
//! MAPE on a chronological hold-out split.
//!
//! Modules:
//! - [`data`]: CSV ingestion, summary statistics, scaling, splitting, windowing
//! - [`correlation`]: Pearson table, ACF and PACF diagnostics
//! - [`baselines`]: AR / MA / ARMA / ARIMA estimation and forecasting
//! - [`lstm`]: LSTM parameters, BPTT, Adam, the training loop
//! - [`metrics`]: MAE / MAPE and the cross-model comparison report
//! - [`synth`]: synthetic load generator and ARMA simulator
//! - [`cli`]: run configuration and the `gridcast` subcommand implementations

pub mod baselines;
pub mod cli;
pub mod correlation;
pub mod data;
pub mod error;
pub mod lstm;
pub mod metrics;
pub mod synth;

pub use error::{Error, Result};
