//! Empirical linear-rate estimation from a residual history.

use serde::Serialize;
use thiserror::Error;

/// Residuals at or below this value are treated as round-off.
pub const RATE_FLOOR: f64 = 1e-13;
/// Minimum number of residuals above the floor.
pub const MIN_POINTS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub r_hat: f64,
    pub window_start: usize,
    pub window_end: usize,
    /// Root-mean-square residual of the log-linear fit.
    pub residual_of_fit: f64,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum RateFitError {
    #[error("need at least {MIN_POINTS} residuals above {RATE_FLOOR:e}, found {found}")]
    InsufficientData { found: usize },
    #[error("fitted slope {slope} is not contracting")]
    NotContracting { slope: f64 },
}

/// Least-squares slope of `log FPR_k` against `k` over `[0.6 K*, 0.95 K*]`,
/// where `K*` is the last index with `FPR > 1e-13`; `r̂ = exp(slope)`.
pub fn fit_empirical_rate(fpr: &[f64]) -> Result<RateFit, RateFitError> {
    let found = fpr.iter().filter(|&&r| r > RATE_FLOOR).count();
    let last = fpr.iter().rposition(|&r| r > RATE_FLOOR);
    let k_star = match last {
        Some(k) if found >= MIN_POINTS => k,
        _ => return Err(RateFitError::InsufficientData { found }),
    };
    let start = (0.6 * k_star as f64).ceil() as usize;
    let end = (0.95 * k_star as f64).floor() as usize;
    let pts: Vec<(f64, f64)> =
        (start..=end).filter(|&k| fpr[k] > RATE_FLOOR).map(|k| (k as f64, fpr[k].ln())).collect();
    if end <= start + 10 || pts.len() < 2 {
        return Err(RateFitError::InsufficientData { found });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(RateFitError::NotContracting { slope });
    }
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(RateFit { r_hat: slope.exp(), window_start: start, window_end: end, residual_of_fit: (rss / n).sqrt() })
}
