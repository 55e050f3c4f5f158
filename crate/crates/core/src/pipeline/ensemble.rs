use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::PipelineKind;
use crate::dynsys::{sample_start, ZExtension};
use crate::error::Result;
use crate::limitproc::restrict;
use crate::path::{PathMeta, PathSample};
use crate::rng::{domain, stream_rng, stream_seed};
use crate::slowfast::{error_path, integrate_averaged, integrate_perturbed, perturbed_birkhoff, PerturbationSpec};

/// Dynamics-side ensemble at one `ε`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsEnsemble {
    pub eps: f64,
    /// Normalized quantity at the record times, one path per sample.
    pub paths: Vec<PathSample>,
    /// `sup_t |X_t - W_t|` over the dynamics grid (unnormalized), per sample.
    pub sup_errors: Vec<f64>,
}

impl DynamicsEnsemble {
    pub fn median_sup_error(&self) -> f64 {
        median(&self.sup_errors)
    }
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// One dynamics sample: the normalized path on `grid` and its unnormalized
/// sup. For the Birkhoff kind the path is `u^ε` itself.
#[allow(clippy::too_many_arguments)]
pub fn dynamics_sample<Z: ZExtension>(
    kind: PipelineKind,
    spec: &PerturbationSpec,
    model: &Z,
    x0: &[f64],
    w: &PathSample,
    eps: f64,
    dt: Option<f64>,
    seed: u64,
    index: u64,
) -> Result<(PathSample, f64)> {
    let mut rng = stream_rng(seed, domain::INITIAL_CONDITIONS, index);
    let start = sample_start(model, &mut rng)?;
    let meta = PathMeta { eps, seed: stream_seed(seed, domain::INITIAL_CONDITIONS, index), model: model.name().into() };
    let mut path = match kind {
        PipelineKind::Birkhoff => {
            let u = perturbed_birkhoff(spec, model, &start, eps, &w.times, 1)?;
            let sup = u.sup_norm();
            let mut u = u;
            u.meta = meta;
            return Ok((u, sup));
        }
        _ => integrate_perturbed(spec, model, x0, &start, eps, &w.times, dt)?,
    };
    path.meta = meta;
    let raw = error_path(&path, w, 0.0, eps)?;
    let sup = raw.sup_norm();
    let mut scaled = error_path(&path, w, kind.gamma(), eps)?;
    scaled.meta = path.meta;
    Ok((scaled, sup))
}

/// `n` samples at one `ε`, merged in index order.
#[allow(clippy::too_many_arguments)]
pub fn dynamics_ensemble<Z: ZExtension>(
    kind: PipelineKind,
    spec: &PerturbationSpec,
    model: &Z,
    x0: &[f64],
    grid: &[f64],
    record: &[f64],
    eps: f64,
    n: usize,
    dt: Option<f64>,
    seed: u64,
) -> Result<DynamicsEnsemble> {
    let w = averaged_path(kind, spec, x0, grid)?;
    let results = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let (p, sup) = dynamics_sample(kind, spec, model, x0, &w, eps, dt, seed, i)?;
            Ok((restrict(&p, record)?, sup))
        })
        .collect::<Result<Vec<_>>>()?;
    let (paths, sup_errors) = results.into_iter().unzip();
    Ok(DynamicsEnsemble { eps, paths, sup_errors })
}

/// `W` on `grid`, integrated with 100 RK4 substeps per grid interval.
pub fn averaged_path(kind: PipelineKind, spec: &PerturbationSpec, x0: &[f64], grid: &[f64]) -> Result<PathSample> {
    if kind == PipelineKind::Birkhoff {
        let zero = vec![vec![0.0; spec.dim]; grid.len()];
        return PathSample::new(grid.to_vec(), zero, PathMeta::default());
    }
    let h = grid.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    integrate_averaged(&spec.fbar, x0, grid, h.min(1.0) / 100.0)
}
