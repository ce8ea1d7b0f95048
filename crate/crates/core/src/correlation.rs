//! Pearson correlation, autocorrelation (ACF), and partial autocorrelation
//! (PACF) diagnostics.

use serde::{Deserialize, Serialize};

use crate::data::TimeSeriesTable;
use crate::error::{Error, Result};

/// One feature's Pearson correlation against the target column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    #[serde(rename = "feature")]
    pub feature_name: String,
    pub coefficient: f64,
}

/// A column that could not be correlated, with the reason it was skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedColumn {
    #[serde(rename = "feature")]
    pub feature_name: String,
    pub reason: String,
}

/// Correlation rows sorted by coefficient descending, plus warnings for
/// columns that had to be skipped (zero variance, too few complete pairs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub rows: Vec<CorrelationRow>,
    pub skipped: Vec<SkippedColumn>,
}

/// One lag of a correlogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelogramPoint {
    pub lag: usize,
    pub value: f64,
}

/// Pearson correlation of two complete (no-missing) vectors.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "pearson inputs differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::invalid("pearson needs at least 2 pairs"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::numerical("zero variance in pearson input"));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Pearson correlation with pairwise deletion: rows where either side is
/// missing are excluded before computing.
pub fn pearson_pairwise(x: &[Option<f64>], y: &[Option<f64>]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "pearson inputs differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (a, b) in x.iter().zip(y) {
        if let (Some(a), Some(b)) = (a, b) {
            xs.push(*a);
            ys.push(*b);
        }
    }
    if xs.len() < 2 {
        return Err(Error::invalid("fewer than 2 complete pairs"));
    }
    pearson(&xs, &ys)
}

/// Correlates every other column of `table` against `target`, sorted by
/// coefficient descending. Columns that fail (constant, too sparse) are
/// recorded as skipped rather than aborting the table.
pub fn correlation_table(table: &TimeSeriesTable, target: &str) -> Result<CorrelationTable> {
    let target_col = table
        .column(target)
        .ok_or_else(|| Error::MissingColumn(target.to_string()))?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let names: Vec<String> = table
        .column_names()
        .filter(|n| *n != target)
        .map(str::to_string)
        .collect();
    for name in names {
        let col = table.column(&name).expect("column listed by table");
        match pearson_pairwise(col, target_col) {
            Ok(coefficient) => rows.push(CorrelationRow {
                feature_name: name,
                coefficient,
            }),
            Err(e) => skipped.push(SkippedColumn {
                feature_name: name,
                reason: e.to_string(),
            }),
        }
    }
    rows.sort_by(|a, b| {
        b.coefficient
            .partial_cmp(&a.coefficient)
            .expect("finite coefficients")
    });
    Ok(CorrelationTable { rows, skipped })
}

/// Autocorrelation for lags `0..=max_lag` with biased normalization:
/// acf(k) = Σ(x_t−x̄)(x_{t+k}−x̄) / Σ(x_t−x̄)². The full-sample denominator
/// keeps the sequence positive semidefinite for Durbin–Levinson.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<CorrelogramPoint>> {
    if series.len() <= max_lag {
        return Err(Error::invalid(format!(
            "max_lag {} must be below series length {}",
            max_lag,
            series.len()
        )));
    }
    if series.len() < 2 {
        return Err(Error::invalid("acf needs at least 2 points"));
    }
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let denom: f64 = series.iter().map(|v| (v - mean).powi(2)).sum();
    if denom == 0.0 {
        return Err(Error::numerical("constant series has no autocorrelation"));
    }
    let mut points = Vec::with_capacity(max_lag + 1);
    for k in 0..=max_lag {
        let num: f64 = (0..n - k)
            .map(|t| (series[t] - mean) * (series[t + k] - mean))
            .sum();
        points.push(CorrelogramPoint {
            lag: k,
            value: num / denom,
        });
    }
    Ok(points)
}

/// Partial autocorrelation via the Durbin–Levinson recursion on the ACF.
/// By convention pacf(0) = 1 and pacf(1) = acf(1).
pub fn pacf(series: &[f64], max_lag: usize) -> Result<Vec<CorrelogramPoint>> {
    let r: Vec<f64> = acf(series, max_lag)?.iter().map(|p| p.value).collect();
    let mut points = vec![CorrelogramPoint { lag: 0, value: 1.0 }];
    if max_lag == 0 {
        return Ok(points);
    }
    // phi holds the AR(k) coefficients of the current recursion level.
    let mut phi = vec![r[1]];
    points.push(CorrelogramPoint {
        lag: 1,
        value: r[1],
    });
    let mut v = 1.0 - r[1] * r[1];
    for k in 2..=max_lag {
        if v <= 1e-12 {
            return Err(Error::numerical(format!(
                "Durbin-Levinson breakdown at lag {k}: prediction variance {v:.3e}"
            )));
        }
        let num = r[k] - (0..k - 1).map(|j| phi[j] * r[k - 1 - j]).sum::<f64>();
        let phi_kk = num / v;
        let mut next = Vec::with_capacity(k);
        for j in 0..k - 1 {
            next.push(phi[j] - phi_kk * phi[k - 2 - j]);
        }
        next.push(phi_kk);
        phi = next;
        v *= 1.0 - phi_kk * phi_kk;
        points.push(CorrelogramPoint {
            lag: k,
            value: phi_kk,
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ar_series(coeffs: &[f64], n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = coeffs.len();
        let burn = 500;
        let mut xs = vec![0.0; n + burn];
        for t in p..n + burn {
            let mut x: f64 = rng.random_range(-1.0..1.0);
            for (i, c) in coeffs.iter().enumerate() {
                x += c * xs[t - 1 - i];
            }
            xs[t] = x;
        }
        xs.split_off(burn)
    }

    /// Independent PACF oracle: solve the lag-k Yule-Walker system
    /// R phi = r directly by Gaussian elimination and take phi_k.
    #[allow(clippy::needless_range_loop)] // elimination reads a[col] while writing a[row]
    fn pacf_yule_walker(series: &[f64], k: usize) -> f64 {
        let r: Vec<f64> = acf(series, k).unwrap().iter().map(|p| p.value).collect();
        let mut a = vec![vec![0.0; k + 1]; k];
        for i in 0..k {
            for j in 0..k {
                a[i][j] = r[(i as isize - j as isize).unsigned_abs()];
            }
            a[i][k] = r[i + 1];
        }
        for col in 0..k {
            let pivot = (col..k)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
                .unwrap();
            a.swap(col, pivot);
            let p = a[col][col];
            assert!(p.abs() > 1e-12, "singular Yule-Walker system");
            for row in 0..k {
                if row == col {
                    continue;
                }
                let f = a[row][col] / p;
                for j in col..=k {
                    a[row][j] -= f * a[col][j];
                }
            }
        }
        a[k - 1][k] / a[k - 1][k - 1]
    }

    #[test]
    fn pearson_self_is_one() {
        let x = [1.0, 2.0, 3.0, 5.0];
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_negation_is_minus_one() {
        let x = [1.0, 2.0, 3.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &y).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_zero_variance_error() {
        let x = [1.0, 1.0, 1.0];
        let y = [1.0, 2.0, 3.0];
        assert!(pearson(&x, &y).is_err());
    }

    #[test]
    fn pearson_pairwise_deletes_incomplete_rows() {
        // Complete pairs are (1,2), (3,6), (4,8): exactly proportional.
        let x = [Some(1.0), None, Some(3.0), Some(4.0)];
        let y = [Some(2.0), Some(9.0), Some(6.0), Some(8.0)];
        assert!((pearson_pairwise(&x, &y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_pairwise_too_few_pairs_error() {
        let x = [Some(1.0), None, Some(3.0)];
        let y = [None, Some(2.0), Some(6.0)];
        assert!(pearson_pairwise(&x, &y).is_err());
    }

    #[test]
    fn table_single_identical_column() {
        let ts: Vec<_> = (0..3)
            .map(|i| Utc.with_ymd_and_hms(2015, 1, 1, i, 0, 0).unwrap())
            .collect();
        let vals = vec![Some(1.0), Some(2.0), Some(3.0)];
        let table =
            TimeSeriesTable::new(ts, vec![("a".into(), vals.clone()), ("b".into(), vals)]).unwrap();
        let out = correlation_table(&table, "a").unwrap();
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.rows[0].feature_name, "b");
        assert!((out.rows[0].coefficient - 1.0).abs() < 1e-12);
        assert!(out.skipped.is_empty());
    }

    #[test]
    fn table_skips_constant_column_with_warning() {
        let ts: Vec<_> = (0..3)
            .map(|i| Utc.with_ymd_and_hms(2015, 1, 1, i, 0, 0).unwrap())
            .collect();
        let table = TimeSeriesTable::new(
            ts,
            vec![
                ("target".into(), vec![Some(1.0), Some(2.0), Some(3.0)]),
                ("flat".into(), vec![Some(7.0), Some(7.0), Some(7.0)]),
                ("good".into(), vec![Some(3.0), Some(2.0), Some(1.0)]),
            ],
        )
        .unwrap();
        let out = correlation_table(&table, "target").unwrap();
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.rows[0].feature_name, "good");
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.skipped[0].feature_name, "flat");
    }

    #[test]
    fn table_sorted_descending() {
        let ts: Vec<_> = (0..4)
            .map(|i| Utc.with_ymd_and_hms(2015, 1, 1, i, 0, 0).unwrap())
            .collect();
        let table = TimeSeriesTable::new(
            ts,
            vec![
                ("t".into(), vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0)]),
                (
                    "anti".into(),
                    vec![Some(4.0), Some(3.0), Some(2.0), Some(1.0)],
                ),
                (
                    "pro".into(),
                    vec![Some(2.0), Some(4.0), Some(6.0), Some(8.0)],
                ),
            ],
        )
        .unwrap();
        let out = correlation_table(&table, "t").unwrap();
        let coeffs: Vec<f64> = out.rows.iter().map(|r| r.coefficient).collect();
        assert!(coeffs.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(out.rows[0].feature_name, "pro");
    }

    #[test]
    fn acf_lag_zero_is_one() {
        let series = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0];
        let points = acf(&series, 2).unwrap();
        assert_eq!(points[0].lag, 0);
        assert_eq!(points[0].value, 1.0);
    }

    #[test]
    fn acf_constant_series_error() {
        assert!(acf(&[2.0; 10], 3).is_err());
    }

    #[test]
    fn acf_max_lag_bound_error() {
        assert!(acf(&[1.0, 2.0, 3.0], 3).is_err());
    }

    #[test]
    fn acf_of_ar1_decays_geometrically() {
        let series = ar_series(&[0.8], 10000, 1);
        let points = acf(&series, 5).unwrap();
        for (k, point) in points.iter().enumerate().skip(1) {
            let expected = 0.8f64.powi(k as i32);
            assert!(
                (point.value - expected).abs() < 0.05,
                "lag {k}: {} vs {expected}",
                point.value
            );
        }
    }

    #[test]
    fn acf_of_white_noise_is_small() {
        let series = ar_series(&[], 10000, 2);
        let points = acf(&series, 10).unwrap();
        for p in &points[1..] {
            assert!(p.value.abs() < 0.05, "lag {}: {}", p.lag, p.value);
        }
    }

    #[test]
    fn pacf_lag_one_equals_acf_lag_one() {
        let series = ar_series(&[0.5], 2000, 3);
        let a = acf(&series, 5).unwrap();
        let p = pacf(&series, 5).unwrap();
        assert_eq!(p[1].value, a[1].value);
    }

    #[test]
    fn pacf_of_ar1_cuts_off_after_lag_one() {
        let series = ar_series(&[0.8], 10000, 4);
        let points = pacf(&series, 6).unwrap();
        assert!((points[1].value - 0.8).abs() < 0.05);
        for p in &points[2..] {
            assert!(p.value.abs() < 0.05, "lag {}: {}", p.lag, p.value);
        }
    }

    #[test]
    fn pacf_of_ar2_cuts_off_after_lag_two() {
        let series = ar_series(&[0.5, 0.3], 10000, 5);
        let points = pacf(&series, 6).unwrap();
        for p in &points[3..] {
            assert!(p.value.abs() < 0.05, "lag {}: {}", p.lag, p.value);
        }
    }

    #[test]
    fn pacf_matches_yule_walker_oracle() {
        for seed in [11, 22, 33, 44, 55] {
            let series = ar_series(&[0.6, 0.2], 3000, seed);
            let points = pacf(&series, 10).unwrap();
            for (k, point) in points.iter().enumerate().skip(1) {
                let oracle = pacf_yule_walker(&series, k);
                assert!(
                    (point.value - oracle).abs() < 1e-6,
                    "seed {seed} lag {k}: {} vs {oracle}",
                    point.value
                );
            }
        }
    }

    proptest! {
        #[test]
        fn pearson_is_symmetric(
            x in proptest::collection::vec(-100.0f64..100.0, 5..30),
            y in proptest::collection::vec(-100.0f64..100.0, 5..30),
        ) {
            let n = x.len().min(y.len());
            let (x, y) = (&x[..n], &y[..n]);
            if let (Ok(a), Ok(b)) = (pearson(x, y), pearson(y, x)) {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn pearson_affine_invariant(
            x in proptest::collection::vec(-100.0f64..100.0, 5..30),
            a in 0.1f64..10.0,
            b in -50.0f64..50.0,
        ) {
            let y: Vec<f64> = x.iter().map(|v| v * 1.5 + 2.0).collect();
            let xa: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            if let (Ok(r1), Ok(r2)) = (pearson(&x, &y), pearson(&xa, &y)) {
                prop_assert!((r1 - r2).abs() < 1e-9, "{r1} vs {r2}");
            }
        }

        #[test]
        fn acf_values_bounded(
            series in proptest::collection::vec(-1000.0f64..1000.0, 10..100),
            max_lag in 1usize..8,
        ) {
            if let Ok(points) = acf(&series, max_lag) {
                prop_assert_eq!(points[0].value, 1.0);
                for p in points {
                    prop_assert!(p.value.abs() <= 1.0 + 1e-9, "lag {}: {}", p.lag, p.value);
                }
            }
        }
    }
}
