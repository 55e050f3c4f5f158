use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::{ExperimentConfig, PipelineKind};
use super::ensemble::{dynamics_ensemble, DynamicsEnsemble};
use super::io::{write_ensemble, ArtifactWriter, FileEntry};
use crate::dynsys::ZExtension;
use crate::error::Result;
use crate::limitproc::{LimitKind, LimitLawParams, LimitSampler};
use crate::path::PathSample;
use crate::slowfast::PerturbationSpec;
use crate::stats::{
    compare_to_limit, drift_field, estimate_h, estimate_sigma, estimate_tau_bar, exponent_fit, green_kubo,
    unit_amplitude, variance_field, ComparisonReport, Estimate, ExponentFit, GreenKuboEstimate, HEstimate,
};
use crate::with_model;

/// How stream seeds are derived; recorded in every manifest.
pub const SEEDING_NOTE: &str = "stream seed = splitmix64 hash of (master seed, domain, index); \
domains: 1 initial conditions, 2 limit driver B', 3 limit noise B, 4 estimators, 5 centering";

/// Parameter estimates used to build the limit law.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Estimates {
    pub tau_bar: Estimate,
    pub tau_bar_exact: Option<f64>,
    pub sigma: Estimate,
    pub sigma_exact: Option<f64>,
    /// Values handed to the limit law (exact when known).
    pub tau_bar_used: f64,
    pub sigma_used: f64,
    /// `H` of `h(x) = diag(A(x)) H`, for the non-centered kinds.
    pub h_unit: Option<HEstimate>,
    /// `G` of `a(x) = diag(A(x)) G diag(A(x))`, for the centered kinds.
    pub green_kubo_unit: Option<GreenKuboEstimate>,
    /// Centering offsets of the prepared spec.
    pub offsets: Vec<f64>,
}

impl Estimates {
    pub fn limit_params(&self, spec: &PerturbationSpec) -> Result<LimitLawParams> {
        let d = spec.dim;
        let g = self.green_kubo_unit.as_ref().map_or(vec![0.0; d * d], |g| g.value.clone());
        let h = self.h_unit.as_ref().map_or(vec![0.0; d], |h| h.value.clone());
        LimitLawParams::new(self.tau_bar_used, self.sigma_used, d, variance_field(spec, g), drift_field(spec, h))
    }
}

pub fn limit_kind(kind: PipelineKind) -> LimitKind {
    match kind {
        PipelineKind::Integrable => LimitKind::Integrable,
        PipelineKind::NonCentered => LimitKind::NonCentered,
        PipelineKind::Centered => LimitKind::Centered,
        PipelineKind::Birkhoff => LimitKind::Birkhoff,
    }
}

/// Estimates `τ̄`, `Σ` and the `h` or `a` factor the pipeline needs.
pub fn estimate<Z: ZExtension>(cfg: &ExperimentConfig, model: &Z, spec: &PerturbationSpec) -> Result<Estimates> {
    let tau_bar = estimate_tau_bar(model, cfg.samples(), cfg.seed)?;
    let sigma = estimate_sigma(model, cfg.sigma_walk(), cfg.sigma_samples(), cfg.seed)?;
    let unit = unit_amplitude(spec);
    let x = vec![0.0; spec.dim];
    let (h_unit, green_kubo_unit) = match cfg.pipeline {
        PipelineKind::Integrable | PipelineKind::NonCentered => {
            (Some(estimate_h(&unit, model, &x, cfg.samples(), cfg.cells(), cfg.seed)?), None)
        }
        PipelineKind::Centered | PipelineKind::Birkhoff => {
            (None, Some(green_kubo(&unit, model, &x, cfg.lags(), cfg.cells(), cfg.samples(), cfg.seed)?))
        }
    };
    Ok(Estimates {
        tau_bar_exact: model.tau_bar_exact(),
        sigma_exact: model.sigma_exact(),
        tau_bar_used: model.tau_bar_exact().unwrap_or(tau_bar.value),
        sigma_used: model.sigma_exact().unwrap_or(sigma.value),
        tau_bar,
        sigma,
        h_unit,
        green_kubo_unit,
        offsets: spec.offsets.clone().unwrap_or_default(),
    })
}

/// Limit-law ensemble at the record times.
pub fn limit_ensemble(cfg: &ExperimentConfig, spec: &PerturbationSpec, est: &Estimates) -> Result<Vec<PathSample>> {
    let params = est.limit_params(spec)?;
    let sampler = LimitSampler::new(params, limit_kind(cfg.pipeline), &spec.fbar, &cfg.x0(), &cfg.grid.limit_grid())?;
    sampler.ensemble(cfg.seed, cfg.n, &cfg.grid.record)
}

/// Dynamics ensembles over the `ε` ladder.
pub fn dynamics<Z: ZExtension>(
    cfg: &ExperimentConfig,
    model: &Z,
    spec: &PerturbationSpec,
) -> Result<Vec<DynamicsEnsemble>> {
    let grid = cfg.grid.dynamics_grid();
    cfg.eps
        .iter()
        .map(|&eps| {
            dynamics_ensemble(cfg.pipeline, spec, model, &cfg.x0(), &grid, &cfg.grid.record, eps, cfg.n, cfg.dt, cfg.seed)
        })
        .collect()
}

/// Directory name of the ensemble at `ε`.
pub fn eps_dir(eps: f64) -> String {
    format!("dynamics/eps_{eps:e}")
}

/// One pass/fail line of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub pipeline: PipelineKind,
    pub model: String,
    pub eps: Vec<f64>,
    pub n: usize,
    pub master_seed: u64,
    pub seeding: String,
    pub wall_time_s: f64,
    pub checks: Vec<Check>,
    pub files: Vec<FileEntry>,
}

/// Result of a run: where it wrote and what it checked.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub checks: Vec<Check>,
    pub manifest: Manifest,
}

impl RunOutcome {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Stages of a run, selected by subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stages {
    pub estimate: bool,
    pub limit: bool,
    pub dynamics: bool,
    pub compare: bool,
}

impl Stages {
    pub const PIPELINE: Self = Self { estimate: true, limit: true, dynamics: true, compare: true };
    pub const SIMULATE: Self = Self { estimate: false, limit: false, dynamics: true, compare: false };
    pub const LIMIT: Self = Self { estimate: true, limit: true, dynamics: false, compare: false };
    pub const ESTIMATE: Self = Self { estimate: true, limit: false, dynamics: false, compare: false };
}

/// Full pipeline: estimates, limit ensemble, dynamics ensembles, KS
/// comparisons and the exponent fit.
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    run_stages(cfg, Stages::PIPELINE, "pipeline")
}

pub fn run_stages(cfg: &ExperimentConfig, stages: Stages, command: &str) -> Result<RunOutcome> {
    cfg.validate()?;
    let clock = Instant::now();
    let mut out = ArtifactWriter::new(&cfg.out)?;
    out.write_json("config.json", cfg)?;
    let model = cfg.model.build()?;
    let (checks, model_name) = with_model!(&model, |z| run_on(cfg, z, stages, &mut out).map(|c| (c, z.name().to_string())))?;
    let manifest = Manifest {
        command: command.into(),
        pipeline: cfg.pipeline,
        model: model_name,
        eps: cfg.eps.clone(),
        n: cfg.n,
        master_seed: cfg.seed,
        seeding: SEEDING_NOTE.into(),
        wall_time_s: clock.elapsed().as_secs_f64(),
        checks: checks.clone(),
        files: out.files().to_vec(),
    };
    out.write_json("manifest.json", &manifest)?;
    Ok(RunOutcome { dir: out.root().to_path_buf(), checks, manifest })
}

fn run_on<Z: ZExtension>(
    cfg: &ExperimentConfig,
    model: &Z,
    stages: Stages,
    out: &mut ArtifactWriter,
) -> Result<Vec<Check>> {
    let spec = cfg.spec().prepare(model, cfg.seed)?;
    let mut checks = Vec::new();
    let record = &cfg.grid.record;

    let est = if stages.estimate {
        let est = estimate(cfg, model, &spec)?;
        out.write_json("estimates.json", &est)?;
        if let Some(g) = &est.green_kubo_unit {
            checks.push(Check {
                name: "green_kubo_symmetric_psd".into(),
                pass: g.max_asymmetry() == 0.0 && g.min_eigenvalue() >= -1e-10,
                detail: format!("min eigenvalue {:.3e}, tail bound {:.3e}", g.min_eigenvalue(), g.tail_bound),
            });
        }
        Some(est)
    } else {
        None
    };

    let limit = match (&est, stages.limit) {
        (Some(est), true) => {
            let lim = limit_ensemble(cfg, &spec, est)?;
            write_ensemble(out, "limit", &lim, record)?;
            Some(lim)
        }
        _ => None,
    };

    if !stages.dynamics {
        return Ok(checks);
    }
    let ensembles = dynamics(cfg, model, &spec)?;
    let mut sup_csv = csv::Writer::from_writer(Vec::new());
    sup_csv.write_record(["eps", "seed", "sup_error"])?;
    for ens in &ensembles {
        write_ensemble(out, &eps_dir(ens.eps), &ens.paths, record)?;
        for (p, s) in ens.paths.iter().zip(&ens.sup_errors) {
            sup_csv.write_record([ens.eps.to_string(), p.meta.seed.to_string(), s.to_string()])?;
        }
    }
    out.write("reports/sup_errors.csv", &sup_csv.into_inner().map_err(|e| e.into_error())?)?;

    if let (Some(lim), true) = (&limit, stages.compare) {
        let mut reports: Vec<ComparisonReport> = Vec::new();
        for ens in &ensembles {
            reports.extend(compare_to_limit(&ens.paths, lim, record, cfg.compare.threshold, cfg.compare.alpha)?);
        }
        let mut table = csv::Writer::from_writer(Vec::new());
        table.write_record(["eps", "time", "component", "ks", "critical", "threshold", "pass"])?;
        for r in &reports {
            for (i, k) in r.ks.iter().enumerate() {
                table.write_record([
                    r.eps.to_string(),
                    r.time.to_string(),
                    i.to_string(),
                    k.to_string(),
                    r.critical.to_string(),
                    r.threshold.to_string(),
                    r.pass.to_string(),
                ])?;
            }
        }
        out.write("reports/comparison.csv", &table.into_inner().map_err(|e| e.into_error())?)?;
        out.write_json("reports/comparison.json", &reports)?;
        let smallest = cfg.eps.iter().cloned().fold(f64::INFINITY, f64::min);
        for r in reports.iter().filter(|r| r.eps == smallest) {
            checks.push(Check {
                name: format!("ks_eps_{smallest:e}_t_{}", r.time),
                pass: r.pass,
                detail: format!("KS {:?} vs threshold {}", r.ks, r.threshold),
            });
        }
    }

    if let (Some(target), true) = (cfg.pipeline.expected_exponent(), cfg.eps.len() >= 3) {
        let medians: Vec<f64> = ensembles.iter().map(DynamicsEnsemble::median_sup_error).collect();
        let fit = exponent_fit(&cfg.eps, &medians)?;
        #[derive(Serialize)]
        struct FitReport<'a> {
            eps: &'a [f64],
            median_sup_error: &'a [f64],
            fit: ExponentFit,
            expected: f64,
            tolerance: f64,
        }
        out.write_json(
            "reports/exponent_fit.json",
            &FitReport { eps: &cfg.eps, median_sup_error: &medians, fit, expected: target, tolerance: 0.1 },
        )?;
        checks.push(Check {
            name: "exponent".into(),
            pass: fit.within(target, 0.1),
            detail: format!("slope {:.4} (95% CI {:.4}..{:.4}), expected {target}", fit.slope, fit.ci.0, fit.ci.1),
        });
    }
    Ok(checks)
}

/// KS comparison of two ensemble directories written by a run.
pub fn compare_dirs(
    dynamics: &Path,
    limit: &Path,
    threshold: f64,
    alpha: f64,
) -> Result<Vec<ComparisonReport>> {
    let a = super::io::read_ensemble(dynamics)?;
    let b = super::io::read_ensemble(limit)?;
    let times = a.first().map(|p| p.times.clone()).unwrap_or_default();
    compare_to_limit(&a, &b, &times, threshold, alpha)
}
