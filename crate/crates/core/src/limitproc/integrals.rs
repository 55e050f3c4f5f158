use nalgebra::DMatrix;

use super::bm::LazyBrownian;
use crate::error::{Error, Result};
use crate::path::PathSample;

/// Largest tolerated `max |a_ij - a_ji|`.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Symmetric nonnegative square root through the eigendecomposition, with
/// negative eigenvalues clipped to 0. `a` is row-major `d x d`.
pub fn sqrt_psd(a: &[f64], d: usize) -> Result<DMatrix<f64>> {
    let m = DMatrix::from_row_slice(d, d, a);
    let asym = (&m - m.transpose()).abs().max();
    if asym > SYMMETRY_TOL {
        return Err(Error::NonSymmetricVariance { asym });
    }
    if d == 1 {
        return Ok(DMatrix::from_element(1, 1, a[0].max(0.0).sqrt()));
    }
    let sym = (&m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose())
}

/// `√ã(W_k)` at every grid point of `w`.
pub fn sqrt_along(a_tilde: &dyn Fn(&[f64]) -> Vec<f64>, w: &PathSample) -> Result<Vec<DMatrix<f64>>> {
    let d = w.dim();
    w.values.iter().map(|x| sqrt_psd(&a_tilde(x), d)).collect()
}

/// `V_t = ∫_0^t √ã(W_s) dB_{L̃_s}` as the left-point Stieltjes sum
/// `Σ √ã(W_{s_k}) (B_{L̃_{k+1}} - B_{L̃_k})`, with `B` queried at the
/// time-change points.
pub fn time_changed_integral(
    a_tilde: &dyn Fn(&[f64]) -> Vec<f64>,
    w: &PathSample,
    b: &mut LazyBrownian,
    ltilde: &[f64],
) -> Result<PathSample> {
    let roots = sqrt_along(a_tilde, w)?;
    time_changed_integral_with_roots(&roots, w, b, ltilde)
}

/// As [`time_changed_integral`] with the roots precomputed.
pub fn time_changed_integral_with_roots(
    roots: &[DMatrix<f64>],
    w: &PathSample,
    b: &mut LazyBrownian,
    ltilde: &[f64],
) -> Result<PathSample> {
    let n = w.len();
    if roots.len() != n || ltilde.len() != n {
        return Err(Error::GridMismatch(format!(
            "{} grid points, {} roots, {} local-time values",
            n,
            roots.len(),
            ltilde.len()
        )));
    }
    let d = b.dim();
    let mut v = vec![0.0; d];
    let mut values = Vec::with_capacity(n);
    values.push(v.clone());
    let mut prev = b.at(ltilde[0]);
    for k in 0..n - 1 {
        if ltilde[k + 1] > ltilde[k] {
            let next = b.at(ltilde[k + 1]);
            for i in 0..d {
                for j in 0..d {
                    v[i] += roots[k][(i, j)] * (next[j] - prev[j]);
                }
            }
            b.forget_before(ltilde[k + 1]);
            prev = next;
        }
        values.push(v.clone());
    }
    PathSample::new(w.times.clone(), values, w.meta.clone())
}

/// `Ṽ_t = ∫_0^t h(W_s) dL̃_s` as the left-point Stieltjes sum.
pub fn drift_integral(h: &dyn Fn(&[f64]) -> Vec<f64>, w: &PathSample, ltilde: &[f64]) -> Result<PathSample> {
    if ltilde.len() != w.len() {
        return Err(Error::GridMismatch(format!("{} grid points, {} local-time values", w.len(), ltilde.len())));
    }
    let d = w.dim();
    let mut v = vec![0.0; d];
    let mut values = Vec::with_capacity(w.len());
    values.push(v.clone());
    for k in 0..w.len() - 1 {
        let dl = ltilde[k + 1] - ltilde[k];
        if dl != 0.0 {
            let hk = h(&w.values[k]);
            for i in 0..d {
                v[i] += hk[i] * dl;
            }
        }
        values.push(v.clone());
    }
    PathSample::new(w.times.clone(), values, w.meta.clone())
}
