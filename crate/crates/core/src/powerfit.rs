//! Least-squares power-law fits `c n^-b` in log-log space.

use crate::asymptotics::AsymptoticPrediction;
use crate::error::Error;
use crate::series::CurveSeries;
use crate::Result;

/// Result of an OLS fit of `ln value` against `ln n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// Fitted decay exponent (minus the log-log slope).
    pub beta_hat: f64,
    /// Fitted coefficient, `exp(intercept)`.
    pub c_hat: f64,
    /// Requested fit window (inclusive).
    pub n_min: u64,
    pub n_max: u64,
    /// Root-mean-square residual in log space.
    pub rmse_log: f64,
    /// Points that entered the regression, after dropping n = 0 and
    /// nonpositive values (logs are undefined there).
    pub points_used: usize,
}

impl PowerLawFit {
    /// Fitted value at n.
    pub fn evaluate(&self, n: u64) -> f64 {
        self.c_hat * (n as f64).powf(-self.beta_hat)
    }
}

/// Unweighted OLS over `(ln n, ln value)` pairs. Caller guarantees
/// x > 0 and y > 0.
pub(crate) fn fit_pairs(
    pairs: impl Iterator<Item = (f64, f64)>,
    n_min: u64,
    n_max: u64,
) -> Result<PowerLawFit> {
    let logs: Vec<(f64, f64)> = pairs.map(|(x, y)| (x.ln(), y.ln())).collect();
    if logs.len() < 3 {
        return Err(Error::TooFewFitPoints {
            need: 3,
            found: logs.len(),
        });
    }
    let k = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in &logs {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok(PowerLawFit {
        beta_hat: -slope,
        c_hat: intercept.exp(),
        n_min,
        n_max,
        rmse_log: (ss_res / k).sqrt(),
        points_used: logs.len(),
    })
}

/// Fit `c n^-b` to the series over n in [n_min, n_max].
///
/// Points at n = 0 and points with nonpositive values (possible in
/// Monte-Carlo series) are dropped, not clamped; at least three usable
/// points must remain.
pub fn fit_power_law(series: &CurveSeries, n_min: u64, n_max: u64) -> Result<PowerLawFit> {
    if n_min >= n_max {
        return Err(Error::EmptyFitWindow { n_min, n_max });
    }
    let mut in_window = 0usize;
    let usable: Vec<(f64, f64)> = series
        .values()
        .filter(|&(n, _)| n >= n_min && n <= n_max)
        .inspect(|_| in_window += 1)
        .filter(|&(n, v)| n >= 1 && v > 0.0 && v.is_finite())
        .map(|(n, v)| (n as f64, v))
        .collect();
    if usable.is_empty() && in_window > 0 {
        return Err(Error::NoPositiveFitValues);
    }
    fit_pairs(usable.into_iter(), n_min, n_max)
}

/// A fit laid next to its closed-form prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub fit: PowerLawFit,
    pub predicted_beta: f64,
    pub predicted_coefficient: f64,
    /// `|beta_hat - beta| / beta`.
    pub beta_rel_error: f64,
    /// `|c_hat - c| / c`.
    pub coefficient_rel_error: f64,
    /// Threshold the prediction is trusted from.
    pub valid_from_n: u64,
    /// Whether the whole fit window sits inside the trusted regime
    /// (`n_min >= valid_from_n`).
    pub starts_in_valid_regime: bool,
}

/// Fit the series over [n_min, n_max] and compare against a
/// closed-form prediction.
pub fn fit_report(
    series: &CurveSeries,
    n_min: u64,
    n_max: u64,
    prediction: &AsymptoticPrediction,
) -> Result<FitReport> {
    let fit = fit_power_law(series, n_min, n_max)?;
    Ok(FitReport {
        fit,
        predicted_beta: prediction.beta,
        predicted_coefficient: prediction.coefficient,
        beta_rel_error: (fit.beta_hat - prediction.beta).abs() / prediction.beta.abs(),
        coefficient_rel_error: (fit.c_hat - prediction.coefficient).abs()
            / prediction.coefficient.abs(),
        valid_from_n: prediction.valid_from_n,
        starts_in_valid_regime: n_min >= prediction.valid_from_n,
    })
}
