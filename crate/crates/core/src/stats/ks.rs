use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest sample size accepted by [`ks_two_sample`].
pub const KS_MIN_SAMPLES: usize = 50;

/// Two-sample Kolmogorov-Smirnov result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    /// Asymptotic critical value `c(α) √((n + m) / (n m))`.
    pub critical: f64,
    pub reject: bool,
}

/// `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = if a[i].total_cmp(&b[j]).is_le() { a[i] } else { b[j] };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Kolmogorov survival function `Q(λ) = 2 Σ_{k>=1} (-1)^{k-1} e^{-2k²λ²}`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// `c(α)` with `Q(c) = α`, by bisection.
pub fn kolmogorov_critical(alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.2, 5.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sample KS test at level `alpha`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsResult> {
    for s in [a, b] {
        if s.len() < KS_MIN_SAMPLES {
            return Err(Error::TooFewSamples { min: KS_MIN_SAMPLES, got: s.len() });
        }
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParam(format!("level {alpha} not in (0,1)")));
    }
    let statistic = ks_statistic(a, b);
    let (n, m) = (a.len(), b.len());
    let critical = kolmogorov_critical(alpha) * ((n + m) as f64 / (n * m) as f64).sqrt();
    Ok(KsResult { statistic, n, m, alpha, critical, reject: statistic > critical })
}
