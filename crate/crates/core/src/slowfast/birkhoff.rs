use serde::{Deserialize, Serialize};

use super::quad::gauss_legendre_fiber;
use super::spec::{PerturbationSpec, MAX_DIM};
use crate::dynsys::{Fiber, FiberWalk, SuspensionPoint, ZExtension};
use crate::error::Result;
use crate::path::{PathMeta, PathSample};

/// Scaling applied to `∫_0^T g(φ_s) ds`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    None,
    /// `T^{-1/2}`
    InvSqrt,
    /// `T^{-1/4}`
    InvQuarter,
}

impl Normalization {
    pub fn factor(&self, horizon: f64) -> f64 {
        match self {
            Self::None => 1.0,
            Self::InvSqrt => horizon.powf(-0.5),
            Self::InvQuarter => horizon.powf(-0.25),
        }
    }
}

/// `∫_0^T g(φ_s(start)) ds` scaled per `norm`, by 8-point Gauss-Legendre on
/// each fiber piece. `g` receives the fiber and the height in it.
pub fn birkhoff_integral<Z, G>(
    model: &Z,
    g: G,
    start: &SuspensionPoint<Z::Point>,
    horizon: f64,
    norm: Normalization,
) -> Result<f64>
where
    Z: ZExtension,
    G: Fn(&Fiber<Z::Point>, f64) -> f64,
{
    let path = birkhoff_path(model, g, start, &[horizon], 1)?;
    Ok(norm.factor(horizon) * path[0])
}

/// Unnormalized `∫_0^t g(φ_s) ds` at each (fast) time of `grid`, each fiber
/// piece split into `pieces` equal parts.
pub fn birkhoff_path<Z, G>(
    model: &Z,
    g: G,
    start: &SuspensionPoint<Z::Point>,
    grid: &[f64],
    pieces: usize,
) -> Result<Vec<f64>>
where
    Z: ZExtension,
    G: Fn(&Fiber<Z::Point>, f64) -> f64,
{
    super::drive::check_grid(grid)?;
    let pieces = pieces.max(1);
    let mut walk = FiberWalk::new(model, start);
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut t = 0.0;
    let mut gi = 0;
    while gi < grid.len() {
        let fiber = walk.next()?;
        let integrate = |a: f64, b: f64, acc: &mut f64| {
            let h = (b - a) / pieces as f64;
            for k in 0..pieces {
                let lo = a + k as f64 * h;
                gauss_legendre_fiber(lo, lo + h, |s, w| *acc += w * g(&fiber, s - fiber.start));
            }
        };
        while gi < grid.len() && grid[gi] <= fiber.end() {
            integrate(t, grid[gi], &mut acc);
            t = grid[gi];
            gi += 1;
            out.push(acc);
        }
        if gi < grid.len() {
            integrate(t, fiber.end(), &mut acc);
            t = fiber.end();
        }
    }
    Ok(out)
}

/// `u^ε_t = ε^{1/4} ∫_0^{t/ε} f(εs, φ_s(start)) ds` on a grid of slow times.
///
/// The slow argument is the time itself, broadcast to every coordinate of
/// `x`. Each fiber piece is split into `pieces` parts.
pub fn perturbed_birkhoff<Z: ZExtension>(
    spec: &PerturbationSpec,
    model: &Z,
    start: &SuspensionPoint<Z::Point>,
    eps: f64,
    grid: &[f64],
    pieces: usize,
) -> Result<PathSample> {
    let d = spec.dim;
    let pieces = pieces.max(1);
    let scale = eps.powf(0.25);
    let mut acc = [0.0; MAX_DIM];
    let mut values = vec![Vec::new(); grid.len()];
    super::drive::for_each_segment(spec, model, start, eps, grid, |seg| {
        // fast-time limits of the piece
        let a = seg.t0 / eps;
        let b = seg.t1 / eps;
        if b > a {
            let h = (b - a) / pieces as f64;
            for k in 0..pieces {
                let lo = a + k as f64 * h;
                gauss_legendre_fiber(lo, lo + h, |s, w| {
                    let x = [eps * s; MAX_DIM];
                    let mut v = [0.0; MAX_DIM];
                    spec.eval_cached(&x[..d], &seg.cache, s - seg.fiber_start, &mut v[..d]);
                    for i in 0..d {
                        acc[i] += w * v[i];
                    }
                });
            }
        }
        if let Some(gi) = seg.grid_index {
            values[gi] = acc[..d].iter().map(|a| scale * a).collect();
        }
        Ok(())
    })?;
    PathSample::new(grid.to_vec(), values, PathMeta { eps, seed: 0, model: model.name().to_string() })
}
