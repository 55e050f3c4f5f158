use super::drive::{check_grid, for_each_segment};
use super::spec::{Fbar, PerturbationSpec, MAX_DIM};
use crate::dynsys::{SuspensionPoint, ZExtension};
use crate::error::{Error, Result};
use crate::path::{PathMeta, PathSample};

/// Largest admissible step: `ε inf τ / 4`.
pub fn max_step<Z: ZExtension>(model: &Z, eps: f64) -> f64 {
    eps * model.roof_bounds().0 / 4.0
}

/// Classical RK4 step of `x' = rhs(t, x)` over `[t, t + h]`, in place.
#[inline]
pub(crate) fn rk4_step(d: usize, t: f64, h: f64, x: &mut [f64], mut rhs: impl FnMut(f64, &[f64], &mut [f64])) {
    let mut k1 = [0.0; MAX_DIM];
    let mut k2 = [0.0; MAX_DIM];
    let mut k3 = [0.0; MAX_DIM];
    let mut k4 = [0.0; MAX_DIM];
    let mut y = [0.0; MAX_DIM];
    rhs(t, x, &mut k1[..d]);
    for i in 0..d {
        y[i] = x[i] + 0.5 * h * k1[i];
    }
    rhs(t + 0.5 * h, &y[..d], &mut k2[..d]);
    for i in 0..d {
        y[i] = x[i] + 0.5 * h * k2[i];
    }
    rhs(t + 0.5 * h, &y[..d], &mut k3[..d]);
    for i in 0..d {
        y[i] = x[i] + h * k3[i];
    }
    rhs(t + h, &y[..d], &mut k4[..d]);
    for i in 0..d {
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Number of equal substeps of length at most `dt` covering `len`.
#[inline]
pub(crate) fn substeps(len: f64, dt: f64) -> usize {
    ((len / dt).ceil() as usize).max(1)
}

fn check_x0(spec: &PerturbationSpec, x0: &[f64]) -> Result<()> {
    if x0.len() != spec.dim {
        return Err(Error::InvalidParam(format!("x0 has length {}, spec dimension is {}", x0.len(), spec.dim)));
    }
    Ok(())
}

/// Solves `dX/dt = f(X, φ_{t/ε}(start)) + f̄(X)`, `X_0 = x0`, recording `X`
/// at the grid times.
///
/// The fast state is advanced exactly fiber by fiber; RK4 steps never cross
/// a section crossing or a grid time. `dt` defaults to `ε inf τ / 4`.
pub fn integrate_perturbed<Z: ZExtension>(
    spec: &PerturbationSpec,
    model: &Z,
    x0: &[f64],
    start: &SuspensionPoint<Z::Point>,
    eps: f64,
    grid: &[f64],
    dt: Option<f64>,
) -> Result<PathSample> {
    check_x0(spec, x0)?;
    let limit = max_step(model, eps);
    let dt = dt.unwrap_or(limit);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let d = spec.dim;
    let mut x = [0.0; MAX_DIM];
    x[..d].copy_from_slice(x0);
    let mut values = vec![Vec::new(); grid.len()];
    for_each_segment(spec, model, start, eps, grid, |seg| {
        let len = seg.t1 - seg.t0;
        if len > 0.0 {
            let n = substeps(len, dt);
            let h = len / n as f64;
            for k in 0..n {
                let t = seg.t0 + k as f64 * h;
                rk4_step(d, t, h, &mut x[..d], |s, y, out| {
                    spec.eval_cached(y, &seg.cache, s / eps - seg.fiber_start, out);
                    let mut fb = [0.0; MAX_DIM];
                    spec.fbar.eval(y, &mut fb[..d]);
                    for i in 0..d {
                        out[i] += fb[i];
                    }
                });
            }
        }
        if let Some(g) = seg.grid_index {
            values[g] = x[..d].to_vec();
        }
        Ok(())
    })?;
    PathSample::new(grid.to_vec(), values, PathMeta { eps, seed: 0, model: model.name().to_string() })
}

/// Solves `dW/dt = f̄(W)`, `W_0 = x0`, with RK4 steps of at most `dt`
/// between consecutive grid times.
pub fn integrate_averaged(fbar: &Fbar, x0: &[f64], grid: &[f64], dt: f64) -> Result<PathSample> {
    check_grid(grid)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParam(format!("step {dt} must be positive")));
    }
    let d = x0.len();
    if d == 0 || d > MAX_DIM {
        return Err(Error::InvalidParam(format!("dimension {d} not in 1..={MAX_DIM}")));
    }
    let mut x = [0.0; MAX_DIM];
    x[..d].copy_from_slice(x0);
    let mut values = Vec::with_capacity(grid.len());
    let mut t = 0.0;
    for &g in grid {
        let len = g - t;
        if len > 0.0 {
            let n = substeps(len, dt);
            let h = len / n as f64;
            for k in 0..n {
                rk4_step(d, t + k as f64 * h, h, &mut x[..d], |_, y, out| fbar.eval(y, out));
            }
        }
        t = g;
        values.push(x[..d].to_vec());
    }
    PathSample::new(grid.to_vec(), values, PathMeta::default())
}

/// `ε^{-γ} (X - W)` on a common grid.
pub fn error_path(x: &PathSample, w: &PathSample, gamma: f64, eps: f64) -> Result<PathSample> {
    if !x.same_grid(w) {
        return Err(Error::GridMismatch(format!("{} vs {} grid points", x.len(), w.len())));
    }
    if x.dim() != w.dim() {
        return Err(Error::GridMismatch(format!("dimension {} vs {}", x.dim(), w.dim())));
    }
    let scale = eps.powf(-gamma);
    let values = x
        .values
        .iter()
        .zip(&w.values)
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| scale * (p - q)).collect())
        .collect();
    PathSample::new(x.times.clone(), values, x.meta.clone())
}

/// Pathwise quantities of the Grönwall estimate
/// `sup|X - x0| <= sup_t |∫_0^t f̃(x0, φ_{s/ε}) ds| exp(∫_0^S [f̃](φ_{s/ε}) ds)`
/// with `f̃ = f + f̄` and `[f̃]` its Lipschitz constant in `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallReport {
    pub sup_deviation: f64,
    pub sup_frozen_integral: f64,
    pub lipschitz_integral: f64,
    pub bound: f64,
}

impl GronwallReport {
    /// Holds up to a relative floating-point tolerance.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.sup_deviation <= self.bound * (1.0 + rel_tol) + 1e-300
    }
}

/// Integrates `X` and, along the same orbit and steps, the frozen integral
/// `∫ f̃(x0, ·)` and `∫ [f̃]`. Sups are taken over every step end.
pub fn gronwall_check<Z: ZExtension>(
    spec: &PerturbationSpec,
    model: &Z,
    x0: &[f64],
    start: &SuspensionPoint<Z::Point>,
    eps: f64,
    horizon: f64,
    dt: Option<f64>,
) -> Result<GronwallReport> {
    check_x0(spec, x0)?;
    let limit = max_step(model, eps);
    let dt = dt.unwrap_or(limit);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let d = spec.dim;
    let lip_fbar = spec.fbar.lipschitz();
    let mut fbar0 = [0.0; MAX_DIM];
    spec.fbar.eval(x0, &mut fbar0[..d]);

    let mut x = [0.0; MAX_DIM];
    x[..d].copy_from_slice(x0);
    let mut frozen = [0.0; MAX_DIM];
    let mut lip = 0.0;
    let mut sup_dev: f64 = 0.0;
    let mut sup_frozen: f64 = 0.0;
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();

    for_each_segment(spec, model, start, eps, &[horizon], |seg| {
        let len = seg.t1 - seg.t0;
        if len <= 0.0 {
            return Ok(());
        }
        let n = substeps(len, dt);
        let h = len / n as f64;
        for k in 0..n {
            let t = seg.t0 + k as f64 * h;
            rk4_step(d, t, h, &mut x[..d], |s, y, out| {
                spec.eval_cached(y, &seg.cache, s / eps - seg.fiber_start, out);
                let mut fb = [0.0; MAX_DIM];
                spec.fbar.eval(y, &mut fb[..d]);
                for i in 0..d {
                    out[i] += fb[i];
                }
            });
            // Simpson's rule for the x-independent integrands
            let mut acc = [0.0; MAX_DIM];
            let mut lacc = 0.0;
            for (s, w) in [(t, 1.0), (t + 0.5 * h, 4.0), (t + h, 1.0)] {
                let height = s / eps - seg.fiber_start;
                let mut v = [0.0; MAX_DIM];
                spec.eval_cached(x0, &seg.cache, height, &mut v[..d]);
                for i in 0..d {
                    acc[i] += w * (v[i] + fbar0[i]);
                }
                lacc += w * (spec.lipschitz_cached(&seg.cache, height) + lip_fbar);
            }
            for i in 0..d {
                frozen[i] += h / 6.0 * acc[i];
            }
            lip += h / 6.0 * lacc;
            let dev: Vec<f64> = (0..d).map(|i| x[i] - x0[i]).collect();
            sup_dev = sup_dev.max(norm(&dev));
            sup_frozen = sup_frozen.max(norm(&frozen[..d]));
        }
        Ok(())
    })?;
    Ok(GronwallReport {
        sup_deviation: sup_dev,
        sup_frozen_integral: sup_frozen,
        lipschitz_integral: lip,
        bound: sup_frozen * lip.exp(),
    })
}
