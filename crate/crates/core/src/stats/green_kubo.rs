use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimators::mean_stderr;
use crate::dynsys::ZExtension;
use crate::error::{Error, Result};
use crate::rng::{domain, stream_rng};
use crate::slowfast::PerturbationSpec;

/// Green-Kubo estimate of `a(x)` with its sampling error and truncation
/// bound. Matrices are row-major `d x d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenKuboEstimate {
    pub x: Vec<f64>,
    pub lags: usize,
    pub cells: u64,
    pub value: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Bound on `max_ij |a_ij - value_ij|` from the omitted lags and cells.
    pub tail_bound: f64,
    /// Lag part of the tail bound: size of the lag block `(L/2, L]` plus
    /// three of its standard errors, scaled by `√2`.
    pub lag_tail: f64,
    /// Cell part of the tail bound: `tail_mass(M) max|A|^2 E[Σ_l |U_0||U_l|]`.
    pub cell_tail: f64,
    pub samples: usize,
    pub seed: u64,
    /// Whether the envelope meets the cell-moment decay condition.
    pub decay_condition: bool,
}

impl GreenKuboEstimate {
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| (self.value[i * d + j] - self.value[j * d + i]).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        nalgebra::DMatrix::from_row_slice(d, d, &self.value).symmetric_eigenvalues().min()
    }
}

/// `c(j) = Σ_{|m| <= M} w(m) w(m + j)`.
fn pair_weight(spec: &PerturbationSpec, cells: u64, j: i64) -> f64 {
    let m = cells as i64;
    (-m..=m).map(|k| spec.weight(k) * spec.weight(k + j)).sum()
}

/// `a(x) = diag(A(x)) G diag(A(x))` with
/// `G = C_0 + Σ_{1<=l<=L} (C_l + C_l^T)` and
/// `C_l = E_μ̄[c(S_lφ) U U^T ∘ T̄^l]`, `U = ∫_0^τ Q (u - c) ds`.
///
/// Each of the `n` samples draws `ω ~ μ̄` and walks `L` steps of its orbit;
/// the cell sum is folded into `c`. `spec` must be prepared.
pub fn green_kubo<Z: ZExtension>(
    spec: &PerturbationSpec,
    model: &Z,
    x: &[f64],
    lags: usize,
    cells: u64,
    n: usize,
    seed: u64,
) -> Result<GreenKuboEstimate> {
    spec.check()?;
    let d = spec.dim;
    if x.len() != d {
        return Err(Error::InvalidParam(format!("x has length {}, expected {d}", x.len())));
    }
    if n < 2 {
        return Err(Error::TooFewSamples { min: 2, got: n });
    }
    let table: Vec<f64> = (-(lags as i64)..=lags as i64).map(|j| pair_weight(spec, cells, j)).collect();
    let c_of = |j: i64| -> f64 {
        if j.unsigned_abs() as usize <= lags {
            table[(j + lags as i64) as usize]
        } else {
            pair_weight(spec, cells, j)
        }
    };
    let half = lags / 2;
    let dd = d * d;

    struct Sample {
        g: Vec<f64>,
        block: Vec<f64>,
        abs: f64,
    }

    let samples = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, domain::ESTIMATOR, i);
            let mut p = model.sample_base(&mut rng);
            let mut tr = model.transition(&p)?;
            let u0 = spec.fiber_integral(model.coord(&p), tr.roof);
            let n0 = u0[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut g = vec![0.0; dd];
            let mut block = vec![0.0; dd];
            let c0 = c_of(0);
            for a in 0..d {
                for b in 0..d {
                    g[a * d + b] = c0 * u0[a] * u0[b];
                }
            }
            let mut abs = n0 * n0;
            let mut s = 0i64;
            for l in 1..=lags {
                s += tr.step;
                p = tr.next;
                tr = model.transition(&p)?;
                let ul = spec.fiber_integral(model.coord(&p), tr.roof);
                let c = c_of(s);
                abs += 2.0 * n0 * ul[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
                if c == 0.0 {
                    continue;
                }
                for a in 0..d {
                    for b in 0..d {
                        let v = c * (u0[a] * ul[b] + u0[b] * ul[a]);
                        g[a * d + b] += v;
                        if l > half {
                            block[a * d + b] += v;
                        }
                    }
                }
            }
            Ok(Sample { g, block, abs })
        })
        .collect::<Result<Vec<Sample>>>()?;

    let amp = spec.amplitude_at(x);
    let amp_max = amp.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut value = vec![0.0; dd];
    let mut stderr = vec![0.0; dd];
    let mut lag_tail: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let k = a * d + b;
            let scale = amp[a] * amp[b];
            let col: Vec<f64> = samples.iter().map(|s| s.g[k]).collect();
            let (m, se) = mean_stderr(&col);
            value[k] = scale * m;
            stderr[k] = scale.abs() * se;
            let blk: Vec<f64> = samples.iter().map(|s| s.block[k]).collect();
            let (bm, bse) = mean_stderr(&blk);
            lag_tail = lag_tail.max(scale.abs() * (bm.abs() + 3.0 * std::f64::consts::SQRT_2 * bse));
        }
    }
    // exact symmetrization
    for a in 0..d {
        for b in a + 1..d {
            let (p, q) = (a * d + b, b * d + a);
            let v = 0.5 * (value[p] + value[q]);
            value[p] = v;
            value[q] = v;
            let s = 0.5 * (stderr[p] + stderr[q]);
            stderr[p] = s;
            stderr[q] = s;
        }
    }
    let abs: Vec<f64> = samples.iter().map(|s| s.abs).collect();
    let (abs_mean, _) = mean_stderr(&abs);
    let cell_tail = spec.envelope.tail_mass(cells) * amp_max * amp_max * abs_mean;
    Ok(GreenKuboEstimate {
        x: x.to_vec(),
        lags,
        cells,
        value,
        stderr,
        tail_bound: lag_tail + cell_tail,
        lag_tail,
        cell_tail,
        samples: n,
        seed,
        decay_condition: spec.satisfies_decay(),
    })
}
