use std::sync::Arc;

use crate::limitproc::{MatrixFn, VectorFn};
use crate::slowfast::{Amplitude, PerturbationSpec};

/// `spec` with every amplitude replaced by the constant 1. Estimates of `h`
/// and `a` for it are the `x`-independent factors `H` and `G` of
/// `h(x) = diag(A(x)) H` and `a(x) = diag(A(x)) G diag(A(x))`.
pub fn unit_amplitude(spec: &PerturbationSpec) -> PerturbationSpec {
    let mut s = spec.clone();
    s.amplitude = vec![Amplitude::constant(1.0); s.dim];
    s
}

/// `x -> diag(A(x)) G diag(A(x))`, row-major.
pub fn variance_field(spec: &PerturbationSpec, g: Vec<f64>) -> MatrixFn {
    let spec = spec.clone();
    Arc::new(move |x: &[f64]| {
        let a = spec.amplitude_at(x);
        let d = a.len();
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = a[i] * g[i * d + j] * a[j];
            }
        }
        out
    })
}

/// `x -> diag(A(x)) H`.
pub fn drift_field(spec: &PerturbationSpec, h: Vec<f64>) -> VectorFn {
    let spec = spec.clone();
    Arc::new(move |x: &[f64]| spec.amplitude_at(x).iter().zip(&h).map(|(a, b)| a * b).collect())
}
