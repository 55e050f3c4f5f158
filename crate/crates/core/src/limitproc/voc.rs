use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::path::PathSample;

/// Precomputed propagators of `dY = Df̄(W) Y dt + dV` along a fixed `W`.
///
/// `Y = V + Z` with `Z_t = ∫_0^t Φ(t, s) Df̄(W_s) V_s ds` and `Φ` the
/// propagator of `Df̄(W)`. One grid step uses
/// `Z_{k+1} = E_k (Z_k + Δ/2 A_k V_k) + Δ/2 A_{k+1} V_{k+1}` with
/// `A_k = Df̄(W_k)` and `E_k = exp(Δ (A_k + A_{k+1}) / 2)`.
#[derive(Debug, Clone)]
pub struct VariationOfConstants {
    times: Vec<f64>,
    jac: Vec<DMatrix<f64>>,
    prop: Vec<DMatrix<f64>>,
    zero: bool,
}

impl VariationOfConstants {
    pub fn new(w: &PathSample, dfbar: &dyn Fn(&[f64], &mut [f64])) -> Self {
        let d = w.dim();
        let mut buf = vec![0.0; d * d];
        let jac: Vec<DMatrix<f64>> = w
            .values
            .iter()
            .map(|x| {
                dfbar(x, &mut buf);
                DMatrix::from_row_slice(d, d, &buf)
            })
            .collect();
        let zero = jac.iter().all(|a| a.iter().all(|v| *v == 0.0));
        let prop = w
            .times
            .windows(2)
            .zip(jac.windows(2))
            .map(|(t, a)| {
                let m = (&a[0] + &a[1]) * (0.5 * (t[1] - t[0]));
                if d == 1 {
                    DMatrix::from_element(1, 1, m[(0, 0)].exp())
                } else {
                    m.exp()
                }
            })
            .collect();
        Self { times: w.times.clone(), jac, prop, zero }
    }

    pub fn apply(&self, v: &PathSample) -> Result<PathSample> {
        if v.len() != self.times.len() {
            return Err(Error::GridMismatch(format!("{} vs {} grid points", v.len(), self.times.len())));
        }
        if self.zero {
            return Ok(v.clone());
        }
        let d = v.dim();
        let vk = |k: usize| nalgebra::DVector::from_column_slice(&v.values[k]);
        let mut z = nalgebra::DVector::zeros(d);
        let mut values = Vec::with_capacity(v.len());
        values.push(v.values[0].clone());
        for k in 0..v.len() - 1 {
            let h = 0.5 * (self.times[k + 1] - self.times[k]);
            z = &self.prop[k] * (z + &self.jac[k] * vk(k) * h) + &self.jac[k + 1] * vk(k + 1) * h;
            values.push(v.values[k + 1].iter().zip(z.iter()).map(|(a, b)| a + b).collect());
        }
        PathSample::new(v.times.clone(), values, v.meta.clone())
    }
}

/// `Y_t = V_t + ∫_0^t Φ(t,s) Df̄(W_s) V_s ds` on the common grid.
pub fn variation_of_constants(
    v: &PathSample,
    w: &PathSample,
    dfbar: &dyn Fn(&[f64], &mut [f64]),
) -> Result<PathSample> {
    if !v.same_grid(w) {
        return Err(Error::GridMismatch("V and W grids differ".into()));
    }
    VariationOfConstants::new(w, dfbar).apply(v)
}

/// `max_k |Y_k - Y^E_k|` where `Y^E` re-solves `dY = Df̄(W) Y dt + dV` by
/// forward Euler on the same grid.
pub fn euler_residual(
    y: &PathSample,
    v: &PathSample,
    w: &PathSample,
    dfbar: &dyn Fn(&[f64], &mut [f64]),
) -> Result<f64> {
    if !y.same_grid(v) || !y.same_grid(w) {
        return Err(Error::GridMismatch("Y, V and W grids differ".into()));
    }
    let d = y.dim();
    let mut a = vec![0.0; d * d];
    let mut ye = y.values[0].clone();
    let mut worst: f64 = 0.0;
    for k in 0..y.len() - 1 {
        let h = y.times[k + 1] - y.times[k];
        dfbar(&w.values[k], &mut a);
        let drift: Vec<f64> = (0..d).map(|i| (0..d).map(|j| a[i * d + j] * ye[j]).sum()).collect();
        for i in 0..d {
            ye[i] += drift[i] * h + v.values[k + 1][i] - v.values[k][i];
        }
        let err = ye.iter().zip(&y.values[k + 1]).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(err);
    }
    Ok(worst)
}
