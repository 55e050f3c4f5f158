use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use nalgebra::DMatrix;

use super::bm::{simulate_bm_with, LazyBrownian};
use super::integrals::{drift_integral, sqrt_along, time_changed_integral_with_roots};
use super::local_time::{default_bandwidth, local_time_at_zero};
use super::voc::VariationOfConstants;
use crate::error::{Error, Result};
use crate::path::{PathMeta, PathSample};
use crate::rng::{domain, stream_rng, stream_seed};
use crate::slowfast::{integrate_averaged, Fbar};

pub type MatrixFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Parameters of the limit laws.
///
/// `a_of` returns the row-major Green-Kubo matrix `a(x)`; the laws use
/// `ã = a / τ̄`. `h_of` returns `h(x) = ∫ f(x, ·) dν`.
#[derive(Clone)]
pub struct LimitLawParams {
    pub tau_bar: f64,
    pub sigma: f64,
    pub dim: usize,
    pub a_of: MatrixFn,
    pub h_of: VectorFn,
}

impl std::fmt::Debug for LimitLawParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LimitLawParams")
            .field("tau_bar", &self.tau_bar)
            .field("sigma", &self.sigma)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl LimitLawParams {
    pub fn new(tau_bar: f64, sigma: f64, dim: usize, a_of: MatrixFn, h_of: VectorFn) -> Result<Self> {
        if !(tau_bar > 0.0) {
            return Err(Error::InvalidParam(format!("tau_bar {tau_bar} must be positive")));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParam(format!("Sigma {sigma} must be positive")));
        }
        if dim == 0 {
            return Err(Error::InvalidParam("dimension must be positive".into()));
        }
        Ok(Self { tau_bar, sigma, dim, a_of, h_of })
    }

    /// Constant `a` and `h`.
    pub fn constant(tau_bar: f64, sigma: f64, a: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        let dim = h.len();
        if a.len() != dim * dim {
            return Err(Error::InvalidParam(format!("a has {} entries, expected {}", a.len(), dim * dim)));
        }
        Self::new(tau_bar, sigma, dim, Arc::new(move |_| a.clone()), Arc::new(move |_| h.clone()))
    }

    pub fn a_tilde(&self, x: &[f64]) -> Vec<f64> {
        (self.a_of)(x).into_iter().map(|v| v / self.tau_bar).collect()
    }

    /// Drift density against `dL̃`. Since `L̃` already carries a factor `τ̄`,
    /// the density is `h / τ̄`.
    pub fn h_tilde(&self, x: &[f64]) -> Vec<f64> {
        (self.h_of)(x).into_iter().map(|v| v / self.tau_bar).collect()
    }
}

/// Which limit object to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    /// `dY = √ã(W) dB_{L̃} + Df̄(W) Y dt`
    Centered,
    /// `dỸ = h̃(W) dL̃ + Df̄(W) Ỹ dt`
    NonCentered,
    /// `h̃(x0) L̃_t`
    Integrable,
    /// `V_t = ∫ √ã(W_s) dB_{L̃_s}` with `W_s = s` in every coordinate.
    Birkhoff,
}

/// One sample of the limit objects on a common grid.
#[derive(Debug, Clone)]
pub struct LimitPathBundle {
    pub times: Vec<f64>,
    /// `B'` on the grid `t / τ̄`.
    pub bprime: Vec<f64>,
    /// `L'_{t/τ̄}(0)`.
    pub lprime0: Vec<f64>,
    /// `L̃_t(0) = τ̄ L'_{t/τ̄}(0)`.
    pub ltilde: Vec<f64>,
    /// `B_{L̃_t}` for the centered kinds, empty otherwise.
    pub b_at_ltilde: Vec<Vec<f64>>,
    pub w: PathSample,
    pub v: PathSample,
    pub y: PathSample,
}

/// Ensemble sampler with the path-independent parts precomputed.
pub struct LimitSampler {
    params: LimitLawParams,
    kind: LimitKind,
    times: Vec<f64>,
    w: PathSample,
    roots: Vec<DMatrix<f64>>,
    drift: Option<VariationOfConstants>,
}

impl LimitSampler {
    /// `grid` must start at 0 and be uniform (it drives the local-time
    /// bandwidth); `x0` is the start of `W`.
    pub fn new(params: LimitLawParams, kind: LimitKind, fbar: &Fbar, x0: &[f64], grid: &[f64]) -> Result<Self> {
        if grid.len() < 2 || grid[0] != 0.0 {
            return Err(Error::GridMismatch("limit grid must start at 0 with at least 2 points".into()));
        }
        if x0.len() != params.dim {
            return Err(Error::InvalidParam(format!("x0 has length {}, expected {}", x0.len(), params.dim)));
        }
        let dt = grid[1] - grid[0];
        let meta = PathMeta { eps: 0.0, seed: 0, model: "limit".into() };
        let mut w = match kind {
            LimitKind::Birkhoff => {
                PathSample::new(grid.to_vec(), grid.iter().map(|&t| vec![t; params.dim]).collect(), meta.clone())?
            }
            LimitKind::Integrable => PathSample::new(grid.to_vec(), vec![x0.to_vec(); grid.len()], meta.clone())?,
            _ => integrate_averaged(fbar, x0, grid, dt)?,
        };
        w.meta = meta;
        let roots = match kind {
            LimitKind::Centered | LimitKind::Birkhoff => sqrt_along(&|x| params.a_tilde(x), &w)?,
            _ => Vec::new(),
        };
        let drift = match kind {
            LimitKind::Centered | LimitKind::NonCentered if !fbar.is_zero() => {
                let fb = fbar.clone();
                Some(VariationOfConstants::new(&w, &move |x, out| fb.jacobian(x, out)))
            }
            _ => None,
        };
        Ok(Self { params, kind, times: grid.to_vec(), w, roots, drift })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn averaged(&self) -> &PathSample {
        &self.w
    }

    /// Bundle `index` under `seed`. `B'` and `B` come from independent
    /// streams.
    pub fn bundle(&self, seed: u64, index: u64) -> Result<LimitPathBundle> {
        let p = &self.params;
        let s: Vec<f64> = self.times.iter().map(|t| t / p.tau_bar).collect();
        let mut rng = stream_rng(seed, domain::LIMIT_DRIVER, index);
        let bprime = simulate_bm_with(&mut rng, p.sigma, &s);
        let delta = default_bandwidth(s[1] - s[0]);
        let lprime0 = local_time_at_zero(&s, &bprime, delta);
        let ltilde: Vec<f64> = lprime0.iter().map(|l| p.tau_bar * l).collect();
        let meta = PathMeta { eps: 0.0, seed: stream_seed(seed, domain::LIMIT_DRIVER, index), model: "limit".into() };
        let mut b_at = Vec::new();
        let v = match self.kind {
            LimitKind::Centered | LimitKind::Birkhoff => {
                let mut b = LazyBrownian::new(p.dim, stream_rng(seed, domain::LIMIT_NOISE, index));
                let v = time_changed_integral_with_roots(&self.roots, &self.w, &mut b, &ltilde)?;
                let mut b2 = LazyBrownian::new(p.dim, stream_rng(seed, domain::LIMIT_NOISE, index));
                // replays the same stream, so these are the increments used above
                b_at = ltilde.iter().map(|&l| b2.at(l)).collect();
                v
            }
            LimitKind::NonCentered | LimitKind::Integrable => drift_integral(&|x| p.h_tilde(x), &self.w, &ltilde)?,
        };
        let mut v = v;
        v.meta = meta.clone();
        let y = match &self.drift {
            Some(voc) => voc.apply(&v)?,
            None => v.clone(),
        };
        Ok(LimitPathBundle { times: self.times.clone(), bprime, lprime0, ltilde, b_at_ltilde: b_at, w: self.w.clone(), v, y })
    }

    /// `Y` (or `Ỹ`, or `V`) of bundle `index` at the `record` times only.
    pub fn sample_at(&self, seed: u64, index: u64, record: &[f64]) -> Result<PathSample> {
        let b = self.bundle(seed, index)?;
        restrict(&b.y, record)
    }

    /// `n` independent samples restricted to `record`, in index order.
    pub fn ensemble(&self, seed: u64, n: usize, record: &[f64]) -> Result<Vec<PathSample>> {
        (0..n as u64).into_par_iter().map(|i| self.sample_at(seed, i, record)).collect()
    }
}

/// `path` at the given grid times.
pub fn restrict(path: &PathSample, record: &[f64]) -> Result<PathSample> {
    let values = record
        .iter()
        .map(|&t| {
            path.value_at(t)
                .map(<[f64]>::to_vec)
                .ok_or_else(|| Error::GridMismatch(format!("record time {t} is not a grid time")))
        })
        .collect::<Result<Vec<_>>>()?;
    PathSample::new(record.to_vec(), values, path.meta.clone())
}

/// `n` independent samples of the limit object of `kind` started at `x0`,
/// simulated on `grid` and recorded at `record`.
#[allow(clippy::too_many_arguments)]
pub fn sample_limit_law(
    params: &LimitLawParams,
    kind: LimitKind,
    fbar: &Fbar,
    x0: &[f64],
    grid: &[f64],
    record: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<PathSample>> {
    if n == 0 {
        return Err(Error::InvalidParam("ensemble size must be at least 1".into()));
    }
    LimitSampler::new(params.clone(), kind, fbar, x0, grid)?.ensemble(seed, n, record)
}
