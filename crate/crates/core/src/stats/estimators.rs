use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynsys::{birkhoff_step_sum, ZExtension};
use crate::error::{Error, Result};
use crate::rng::{domain, stream_rng};
use crate::slowfast::PerturbationSpec;

/// Scalar Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Estimate {
    /// `|value - target| <= k stderr`, with exact equality accepted when the
    /// standard error vanishes.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr + 1e-12 * target.abs().max(1.0)
    }
}

/// Mean and standard error, summed in index order.
pub(crate) fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn need(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParam(format!("{what} must be at least 1")));
    }
    Ok(())
}

/// `τ̄ = E_μ̄[τ]` from `n` independent base samples.
pub fn estimate_tau_bar<Z: ZExtension>(model: &Z, n: usize, seed: u64) -> Result<Estimate> {
    need(n, "sample count")?;
    let taus = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, domain::ESTIMATOR, i);
            model.roof(&model.sample_base(&mut rng))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (value, stderr) = mean_stderr(&taus);
    Ok(Estimate { value, stderr, samples: n, seed })
}

/// `Σ ≈ Var(S_nφ) / n` over `samples` independent base points.
pub fn estimate_sigma<Z: ZExtension>(model: &Z, n: u64, samples: usize, seed: u64) -> Result<Estimate> {
    need(samples, "sample count")?;
    need(n as usize, "walk length")?;
    let sums = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, domain::ESTIMATOR, i);
            birkhoff_step_sum(model, &model.sample_base(&mut rng), n).map(|s| s as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, _) = mean_stderr(&sums);
    let sq: Vec<f64> = sums.iter().map(|s| (s - mean).powi(2) / n as f64).collect();
    let (value, stderr) = mean_stderr(&sq);
    let m = samples as f64;
    let value = if samples > 1 { value * m / (m - 1.0) } else { value };
    Ok(Estimate { value, stderr, samples, seed })
}

/// Vector estimate with a truncation bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HEstimate {
    pub x: Vec<f64>,
    pub cells: u64,
    pub value: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Bound on the contribution of cells `|m| > cells`.
    pub tail_bound: f64,
    pub samples: usize,
    pub seed: u64,
}

/// `h(x) = ∫ f(x, ·) dν`, summed over cells `|m| <= cells`.
///
/// For the built-in family this is `Σ_m w(m) diag(A(x)) E_μ̄[U]` with
/// `U = ∫_0^τ Q (u - c) ds`. `spec` must be prepared.
pub fn estimate_h<Z: ZExtension>(
    spec: &PerturbationSpec,
    model: &Z,
    x: &[f64],
    n: usize,
    cells: u64,
    seed: u64,
) -> Result<HEstimate> {
    need(n, "sample count")?;
    spec.check()?;
    let d = spec.dim;
    if x.len() != d {
        return Err(Error::InvalidParam(format!("x has length {}, expected {d}", x.len())));
    }
    let us = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, domain::ESTIMATOR, i);
            let p = model.sample_base(&mut rng);
            let u = spec.fiber_integral(model.coord(&p), model.roof(&p)?);
            Ok(u[..d].to_vec())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let mass: f64 = (-(cells as i64)..=cells as i64).map(|m| spec.weight(m)).sum();
    let amp = spec.amplitude_at(x);
    let mut value = vec![0.0; d];
    let mut stderr = vec![0.0; d];
    for i in 0..d {
        let col: Vec<f64> = us.iter().map(|u| u[i]).collect();
        let (m, s) = mean_stderr(&col);
        value[i] = mass * amp[i] * m;
        stderr[i] = (mass * amp[i]).abs() * s;
    }
    let norm: Vec<f64> = us.iter().map(|u| u.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let (mean_norm, _) = mean_stderr(&norm);
    let amp_max = amp.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let tail_bound = spec.envelope.tail_mass(cells) * amp_max * mean_norm;
    Ok(HEstimate { x: x.to_vec(), cells, value, stderr, tail_bound, samples: n, seed })
}
