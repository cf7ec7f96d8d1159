//! Log-log least squares for scaling exponents.

use crate::error::{Error, Result};
use crate::report::SlopeFit;

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// One grid point: `(n, mean, stderr)`.
pub type SeriesPoint = (f64, f64, f64);

/// Ordinary least squares of `ln mean` on `ln n`. The interval propagates
/// `Var(ln mean) ~ (stderr/mean)^2` through the slope weights.
pub fn exponent_regression(name: &str, series: &[SeriesPoint]) -> Result<SlopeFit> {
    if series.len() < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 points, got {}", series.len())));
    }
    if let Some(p) = series.iter().find(|p| !(p.1 > 0.0) || !(p.0 > 0.0)) {
        return Err(Error::InvalidInput(format!("non-positive point {p:?}")));
    }
    let k = series.len() as f64;
    let xs: Vec<f64> = series.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = series.iter().map(|p| p.1.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / k;
    let ybar = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("all n equal".into()));
    }
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum::<f64>() / sxx;
    let intercept = ybar - slope * xbar;
    let var: f64 = xs
        .iter()
        .zip(series)
        .map(|(x, p)| ((x - xbar) / sxx).powi(2) * (p.2 / p.1).powi(2))
        .sum();
    let stderr = var.sqrt();
    Ok(SlopeFit {
        name: name.to_string(),
        slope,
        intercept,
        stderr,
        ci_low: slope - Z95 * stderr,
        ci_high: slope + Z95 * stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(f: impl Fn(f64) -> f64) -> Vec<SeriesPoint> {
        (8..=16).map(|e| 2f64.powi(e)).map(|n| (n, f(n), 0.0)).collect()
    }

    #[test]
    fn exact_power() {
        let fit = exponent_regression("p", &grid(|n| n.powf(0.75))).unwrap();
        assert!((fit.slope - 0.75).abs() < 1e-12);
        assert!((fit.ci_high - fit.ci_low).abs() < 1e-12);
    }

    #[test]
    fn constant_factor_goes_to_intercept() {
        let fit = exponent_regression("p", &grid(|n| 37.0 * n.powf(0.6))).unwrap();
        assert!((fit.slope - 0.6).abs() < 1e-12);
        assert!((fit.intercept - 37f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_series() {
        assert!(exponent_regression("p", &grid(|n| n)[..3]).is_err());
        assert!(exponent_regression("p", &grid(|_| 0.0)).is_err());
    }

    #[test]
    fn interval_widens_with_noise() {
        let pts: Vec<SeriesPoint> = (8..=16).map(|e| 2f64.powi(e)).map(|n| (n, n.sqrt(), 0.05 * n.sqrt())).collect();
        let fit = exponent_regression("p", &pts).unwrap();
        assert!(fit.ci_low < 0.5 && fit.ci_high > 0.5 && fit.stderr > 0.0);
    }
}
