use super::integrate::{rk4_step, substeps};
use super::quad::gauss_legendre_fiber;
use super::spec::{PerturbationSpec, MAX_DIM};
use crate::dynsys::{FiberWalk, SuspensionPoint, ZExtension};
use crate::error::{Error, Result};
use crate::path::{PathMeta, PathSample};

/// `F(x, (ω, m)) = ∫_0^{τ(ω)} f(x, (ω, m, s)) ds` and `D_1F`, by 8-point
/// Gauss-Legendre over the fiber.
#[derive(Debug, Clone, Copy)]
pub struct FiberIntegral<'a> {
    spec: &'a PerturbationSpec,
}

/// `F` for a spec.
pub fn f_of(spec: &PerturbationSpec) -> FiberIntegral<'_> {
    FiberIntegral { spec }
}

impl FiberIntegral<'_> {
    pub fn eval(&self, x: &[f64], coord: f64, cell: i64, roof: f64, out: &mut [f64]) {
        let d = self.spec.dim;
        let cache = self.spec.fiber(coord, cell, roof);
        out.iter_mut().for_each(|o| *o = 0.0);
        gauss_legendre_fiber(0.0, roof, |s, w| {
            let mut v = [0.0; MAX_DIM];
            self.spec.eval_cached(x, &cache, s, &mut v[..d]);
            for i in 0..d {
                out[i] += w * v[i];
            }
        });
    }

    /// `D_1F`, row-major.
    pub fn jacobian(&self, x: &[f64], coord: f64, cell: i64, roof: f64, out: &mut [f64]) {
        let d = self.spec.dim;
        let cache = self.spec.fiber(coord, cell, roof);
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut j = vec![0.0; d * d];
        gauss_legendre_fiber(0.0, roof, |s, w| {
            self.spec.jacobian_cached(x, &cache, s, &mut j);
            for (o, v) in out.iter_mut().zip(&j) {
                *o += w * v;
            }
        });
    }
}

/// Solutions of the piecewise-autonomous comparison equations
/// `x̃' = F(x̃, T^{⌊t/ε⌋}ω) + τ(T^{⌊t/ε⌋}ω) f̄(x̃)` and
/// `w̃' = τ(T^{⌊t/ε⌋}ω) f̄(w̃)`, read at the times `ε n_{t/ε}` for `t` on
/// the grid.
#[derive(Debug, Clone)]
pub struct DiscreteComparison {
    pub xtilde: PathSample,
    pub wtilde: PathSample,
    /// `n_{t/ε}` for each grid time.
    pub nodes: Vec<u64>,
}

/// RK4 substeps per interval of length ε.
const SUBSTEPS_PER_MAP_STEP: usize = 2;

pub fn discrete_comparison<Z: ZExtension>(
    spec: &PerturbationSpec,
    model: &Z,
    x0: &[f64],
    omega: &Z::Point,
    eps: f64,
    grid: &[f64],
) -> Result<DiscreteComparison> {
    super::drive::check_grid(grid)?;
    let d = spec.dim;
    if x0.len() != d {
        return Err(Error::InvalidParam(format!("x0 has length {}, spec dimension is {d}", x0.len())));
    }
    let big_f = f_of(spec);
    let mut walk = FiberWalk::new(model, &SuspensionPoint::on_section(*omega, 0));
    let mut xt = [0.0; MAX_DIM];
    let mut wt = [0.0; MAX_DIM];
    xt[..d].copy_from_slice(x0);
    wt[..d].copy_from_slice(x0);
    let mut xs = Vec::with_capacity(grid.len());
    let mut ws = Vec::with_capacity(grid.len());
    let mut nodes = Vec::with_capacity(grid.len());
    let mut gi = 0;
    let mut k = 0u64;
    let h = eps / SUBSTEPS_PER_MAP_STEP as f64;
    while gi < grid.len() {
        let fiber = walk.next()?;
        // grid times whose fast time falls in fiber k read the state at εk
        while gi < grid.len() && grid[gi] / eps < fiber.end() {
            xs.push(xt[..d].to_vec());
            ws.push(wt[..d].to_vec());
            nodes.push(k);
            gi += 1;
        }
        let coord = model.coord(&fiber.base);
        let tk = eps * k as f64;
        for j in 0..substeps(eps, h) {
            let t = tk + j as f64 * h;
            rk4_step(d, t, h, &mut xt[..d], |_, y, out| {
                big_f.eval(y, coord, fiber.cell, fiber.roof, out);
                let mut fb = [0.0; MAX_DIM];
                spec.fbar.eval(y, &mut fb[..d]);
                for i in 0..d {
                    out[i] += fiber.roof * fb[i];
                }
            });
            rk4_step(d, t, h, &mut wt[..d], |_, y, out| {
                spec.fbar.eval(y, out);
                out.iter_mut().for_each(|o| *o *= fiber.roof);
            });
        }
        k += 1;
    }
    let meta = PathMeta { eps, seed: 0, model: model.name().to_string() };
    Ok(DiscreteComparison {
        xtilde: PathSample::new(grid.to_vec(), xs, meta.clone())?,
        wtilde: PathSample::new(grid.to_vec(), ws, meta)?,
        nodes,
    })
}
