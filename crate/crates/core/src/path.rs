use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Provenance carried by every path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PathMeta {
    pub eps: f64,
    pub seed: u64,
    pub model: String,
}

/// Time-gridded trajectory in R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub meta: PathMeta,
}

impl PathSample {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>, meta: PathMeta) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::GridMismatch(format!("times not increasing at {} -> {}", w[0], w[1])));
        }
        if let Some(d) = values.first().map(Vec::len) {
            if values.iter().any(|v| v.len() != d) {
                return Err(Error::GridMismatch("values of unequal dimension".into()));
            }
        }
        Ok(Self { times, values, meta })
    }

    pub fn scalar(times: Vec<f64>, values: Vec<f64>, meta: PathMeta) -> Result<Self> {
        Self::new(times, values.into_iter().map(|v| vec![v]).collect(), meta)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.values.last().map(Vec::as_slice)
    }

    /// Component `i` along the grid.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[i]).collect()
    }

    /// Value at a grid time (exact match up to 1e-12 relative).
    pub fn value_at(&self, t: f64) -> Option<&[f64]> {
        let tol = 1e-12 * t.abs().max(1.0);
        let k = self.times.partition_point(|&s| s < t - tol);
        (k < self.len() && (self.times[k] - t).abs() <= tol).then(|| self.values[k].as_slice())
    }

    /// `max_t |value(t)|_2`.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.times.len() == other.times.len()
            && self.times.iter().zip(&other.times).all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }
}

/// Uniform grid `0, S/n, ..., S` (n + 1 points).
pub fn uniform_grid(horizon: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| horizon * k as f64 / n as f64).collect()
}
