use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Least-squares slope of `log y` against `log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// Two-sided 95% confidence interval for the slope.
    pub ci: (f64, f64),
    pub points: usize,
}

impl ExponentFit {
    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.slope - target).abs() <= tol
    }
}

/// Fits `log err = slope log eps + intercept`. Needs at least three points.
pub fn exponent_fit(eps: &[f64], errors: &[f64]) -> Result<ExponentFit> {
    if eps.len() != errors.len() {
        return Err(Error::InvalidParam("eps and error lists differ in length".into()));
    }
    if eps.len() < 3 {
        return Err(Error::TooFewSamples { min: 3, got: eps.len() });
    }
    if eps.iter().chain(errors).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParam("eps and errors must be positive".into()));
    }
    let x: Vec<f64> = eps.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParam("eps values must be distinct".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let df = n - 2.0;
    let stderr = (rss / df / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::InvalidParam(e.to_string()))?.inverse_cdf(0.975);
    Ok(ExponentFit { slope, intercept, stderr, ci: (slope - t * stderr, slope + t * stderr), points: eps.len() })
}
