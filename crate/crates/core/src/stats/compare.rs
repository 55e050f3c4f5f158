use serde::{Deserialize, Serialize};

use super::ks::ks_two_sample;
use crate::error::{Error, Result};
use crate::path::PathSample;

/// Marginal comparison of two ensembles at one grid time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub time: f64,
    /// KS statistic per component.
    pub ks: Vec<f64>,
    /// Asymptotic critical value at `alpha`.
    pub critical: f64,
    pub alpha: f64,
    pub threshold: f64,
    pub n_dynamics: usize,
    pub n_limit: usize,
    pub pass: bool,
    pub eps: f64,
    pub seeds: Vec<u64>,
    pub note: String,
}

pub const THRESHOLD_NOTE: &str = "KS threshold is an engineering choice; no quantitative convergence rate is available";

/// Column `i` of the ensemble at time `t`.
pub fn marginal(ensemble: &[PathSample], t: f64, i: usize) -> Result<Vec<f64>> {
    ensemble
        .iter()
        .map(|p| {
            p.value_at(t)
                .map(|v| v[i])
                .ok_or_else(|| Error::GridMismatch(format!("time {t} missing from a path")))
        })
        .collect()
}

/// Per-time, per-component KS comparison. A time passes when every
/// component's statistic is at most `threshold`.
pub fn compare_to_limit(
    dynamics: &[PathSample],
    limit: &[PathSample],
    times: &[f64],
    threshold: f64,
    alpha: f64,
) -> Result<Vec<ComparisonReport>> {
    let d = dynamics.first().map_or(0, PathSample::dim);
    if limit.first().map_or(0, PathSample::dim) != d {
        return Err(Error::GridMismatch("ensembles differ in dimension".into()));
    }
    let eps = dynamics.first().map_or(0.0, |p| p.meta.eps);
    let mut seeds: Vec<u64> = dynamics.iter().chain(limit).map(|p| p.meta.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    if seeds.len() > 2 {
        seeds = vec![seeds[0], *seeds.last().unwrap()];
    }
    times
        .iter()
        .map(|&t| {
            let mut ks = Vec::with_capacity(d);
            let mut critical = 0.0;
            for i in 0..d {
                let r = ks_two_sample(&marginal(dynamics, t, i)?, &marginal(limit, t, i)?, alpha)?;
                critical = r.critical;
                ks.push(r.statistic);
            }
            Ok(ComparisonReport {
                time: t,
                pass: ks.iter().all(|k| *k <= threshold),
                ks,
                critical,
                alpha,
                threshold,
                n_dynamics: dynamics.len(),
                n_limit: limit.len(),
                eps,
                seeds: seeds.clone(),
                note: THRESHOLD_NOTE.into(),
            })
        })
        .collect()
}
