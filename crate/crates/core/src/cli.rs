//! Command-line front end. The binary only calls [`main`].

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use crate::dynsys::ModelConfig;
use crate::error::{Error, Result};
use crate::pipeline::{compare_dirs, run_stages, validate, ArtifactWriter, ExperimentConfig, PipelineKind, Stages};

/// Environment variable overriding `--out`.
pub const OUT_ENV: &str = "SLOWFAST_OUT";

#[derive(Debug, Parser)]
#[command(name = "slowfast", version, about = "Slow-fast systems driven by infinite-measure flows")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// JSON experiment config.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// integrable | non-centered | centered | birkhoff
    #[arg(long, global = true, value_name = "NAME")]
    pub pipeline: Option<PipelineKind>,
    /// toy | billiard; replaces the config's model unless it is already of
    /// that kind.
    #[arg(long, global = true, value_name = "NAME")]
    pub model: Option<String>,
    /// Comma-separated ε ladder.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Ensemble size.
    #[arg(long, global = true, value_name = "INT")]
    pub n: Option<usize>,
    /// Master seed.
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true, value_name = "INT")]
    pub jobs: Option<usize>,
    /// Output directory (SLOWFAST_OUT takes precedence).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Exit nonzero when any check fails.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dynamics ensembles over the ε ladder.
    Simulate,
    /// Parameter estimates and the limit-law ensemble.
    Limit,
    /// Parameter estimates only.
    Estimate,
    /// KS comparison of two ensemble directories.
    Compare {
        /// Directory of t_*.csv files from the dynamics.
        dynamics: PathBuf,
        /// Directory of t_*.csv files from the limit law.
        limit: PathBuf,
        /// Largest KS statistic that passes; 0.12 by default.
        #[arg(long)]
        threshold: Option<f64>,
        /// Level of the reported KS critical value; 0.05 by default.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Estimate, simulate, sample the limit, compare and fit exponents.
    Pipeline,
    /// Checks the table, horizon, spec and grids without running.
    Validate,
}

/// Config from `--config` (or defaults) with flag overrides applied.
pub fn resolve_config(common: &Common, env_out: Option<&str>) -> Result<ExperimentConfig> {
    let cfg = match &common.config {
        Some(p) => ExperimentConfig::from_json_file(p)?,
        None => ExperimentConfig::default(),
    };
    let cfg = apply_overrides(cfg, common, env_out)?;
    cfg.validate()?;
    Ok(cfg)
}

fn apply_overrides(mut cfg: ExperimentConfig, common: &Common, env_out: Option<&str>) -> Result<ExperimentConfig> {
    if let Some(k) = common.pipeline {
        cfg.pipeline = k;
    }
    if let Some(m) = &common.model {
        if !cfg.model.name().eq_ignore_ascii_case(m) {
            cfg.model = ModelConfig::preset(m)?;
        }
    }
    if let Some(e) = &common.eps {
        cfg.eps = e.clone();
    }
    if let Some(n) = common.n {
        cfg.n = n;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.out = o.clone();
    }
    if let Some(o) = env_out.filter(|s| !s.is_empty()) {
        cfg.out = PathBuf::from(o);
    }
    Ok(cfg)
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        b = b.num_threads(j);
    }
    let pool = b.build().map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(f))
}

/// Runs a parsed command; returns the process exit status.
pub fn run(cli: Cli, env_out: Option<&str>) -> Result<u8> {
    let common = cli.common;
    let stages = match &cli.command {
        Command::Simulate => Some((Stages::SIMULATE, "simulate")),
        Command::Limit => Some((Stages::LIMIT, "limit")),
        Command::Estimate => Some((Stages::ESTIMATE, "estimate")),
        Command::Pipeline => Some((Stages::PIPELINE, "pipeline")),
        _ => None,
    };
    if let Some((stages, name)) = stages {
        let cfg = resolve_config(&common, env_out)?;
        let outcome = in_pool(common.jobs, || run_stages(&cfg, stages, name))??;
        for c in &outcome.checks {
            println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        println!("wrote {} files to {}", outcome.manifest.files.len() + 1, outcome.dir.display());
        return Ok(if common.strict && !outcome.all_pass() { 2 } else { 0 });
    }
    match cli.command {
        Command::Compare { dynamics, limit, threshold, alpha } => {
            let base = match &common.config {
                Some(p) => ExperimentConfig::from_json_file(p)?,
                None => ExperimentConfig::default(),
            };
            let threshold = threshold.unwrap_or(base.compare.threshold);
            let alpha = alpha.unwrap_or(base.compare.alpha);
            let reports = in_pool(common.jobs, || compare_dirs(&dynamics, &limit, threshold, alpha))??;
            let out_dir = out_dir(&common, env_out, &base.out);
            let mut w = ArtifactWriter::new(&out_dir)?;
            w.write_json("comparison.json", &reports)?;
            for r in &reports {
                println!("{} t={} KS {:?} threshold {}", if r.pass { "PASS" } else { "FAIL" }, r.time, r.ks, r.threshold);
            }
            Ok(if common.strict && reports.iter().any(|r| !r.pass) { 2 } else { 0 })
        }
        Command::Validate => {
            let cfg = match &common.config {
                Some(p) => {
                    let text = std::fs::read_to_string(p)?;
                    match serde_json::from_str::<ExperimentConfig>(&text) {
                        Ok(c) => c,
                        Err(e) => {
                            println!("FAIL config: line {}, column {}: {e}", e.line(), e.column());
                            return Ok(if common.strict { 2 } else { 0 });
                        }
                    }
                }
                None => ExperimentConfig::default(),
            };
            let cfg = apply_overrides(cfg, &common, env_out)?;
            let report = validate(&cfg);
            for i in &report.items {
                println!("{} {}: {}", if i.ok { "PASS" } else { "FAIL" }, i.check, i.detail);
            }
            ArtifactWriter::new(&cfg.out)?.write_json("validation.json", &report)?;
            Ok(if common.strict && !report.ok() { 2 } else { 0 })
        }
        _ => unreachable!("handled above"),
    }
}

fn out_dir(common: &Common, env_out: Option<&str>, fallback: &Path) -> PathBuf {
    match env_out.filter(|s| !s.is_empty()) {
        Some(e) => PathBuf::from(e),
        None => common.out.clone().unwrap_or_else(|| fallback.to_path_buf()),
    }
}

/// Entry point of the `slowfast` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_out = std::env::var(OUT_ENV).ok();
    match run(cli, env_out.as_deref()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
