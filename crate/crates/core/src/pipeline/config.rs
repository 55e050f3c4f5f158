use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::dynsys::ModelConfig;
use crate::error::{Error, Result};
use crate::path::{uniform_grid, PathMeta, PathSample};
use crate::slowfast::{Envelope, Fbar, PerturbationSpec, Profile};

/// Which limit theorem a run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum PipelineKind {
    #[serde(rename = "integrable")]
    Integrable,
    #[serde(rename = "non-centered", alias = "noncentered", alias = "non_centered")]
    NonCentered,
    #[default]
    #[serde(rename = "centered")]
    Centered,
    #[serde(rename = "birkhoff")]
    Birkhoff,
}

impl PipelineKind {
    pub const ALL: [Self; 4] = [Self::Integrable, Self::NonCentered, Self::Centered, Self::Birkhoff];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Integrable => "integrable",
            Self::NonCentered => "non-centered",
            Self::Centered => "centered",
            Self::Birkhoff => "birkhoff",
        }
    }

    /// Power `γ` with `ε^{-γ}` normalizing the recorded quantity.
    pub fn gamma(&self) -> f64 {
        match self {
            Self::Integrable | Self::NonCentered => 0.5,
            Self::Centered => 0.75,
            Self::Birkhoff => 0.0,
        }
    }

    /// Expected slope of `log median sup|E^ε|` against `log ε`.
    pub fn expected_exponent(&self) -> Option<f64> {
        match self {
            Self::Birkhoff => None,
            k => Some(k.gamma()),
        }
    }

    /// Default perturbation for this pipeline.
    pub fn default_spec(&self) -> PerturbationSpec {
        let env = Envelope::Power { p: 5.0 };
        let damping = Fbar::SineDamping { rate: 0.5 };
        match self {
            Self::Integrable => PerturbationSpec::scalar(env, 1.0, Profile::Constant { value: 1.0 }, false, Fbar::Zero),
            Self::NonCentered => PerturbationSpec::scalar(env, 1.0, Profile::Constant { value: 1.0 }, false, damping),
            Self::Centered | Self::Birkhoff => PerturbationSpec::scalar(
                env,
                1.0,
                Profile::Cosine { harmonic: 1, phase: 0.0 },
                true,
                if *self == Self::Centered { damping } else { Fbar::Zero },
            ),
        }
    }
}

impl fmt::Display for PipelineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PipelineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "integrable" => Ok(Self::Integrable),
            "non-centered" | "noncentered" | "non_centered" => Ok(Self::NonCentered),
            "centered" => Ok(Self::Centered),
            "birkhoff" => Ok(Self::Birkhoff),
            other => Err(Error::Config(format!(
                "unknown pipeline {other:?}; expected integrable, non-centered, centered or birkhoff"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Slow-time horizon.
    #[serde(default = "one")]
    pub horizon: f64,
    /// Intervals of the dynamics grid; sup-errors are taken over it.
    #[serde(default = "default_points")]
    pub points: usize,
    /// Times at which ensembles are written and compared.
    #[serde(default = "default_record")]
    pub record: Vec<f64>,
    /// Step of the limit-law grid.
    #[serde(default = "default_limit_dt")]
    pub limit_dt: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { horizon: 1.0, points: default_points(), record: default_record(), limit_dt: default_limit_dt() }
    }
}

impl GridConfig {
    pub fn dynamics_grid(&self) -> Vec<f64> {
        uniform_grid(self.horizon, self.points)
    }

    pub fn limit_grid(&self) -> Vec<f64> {
        uniform_grid(self.horizon, (self.horizon / self.limit_dt).round() as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Base samples for τ̄, h and Green-Kubo; 10^5 on the toy, 2·10^4 on the billiard.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Lag truncation; 200 on the toy, 100 on the billiard.
    #[serde(default)]
    pub lags: Option<usize>,
    /// Cell truncation; 20 on the toy, 10 on the billiard.
    #[serde(default)]
    pub cells: Option<u64>,
    /// Walk length and sample count of the Σ estimator.
    #[serde(default)]
    pub sigma_walk: Option<u64>,
    #[serde(default)]
    pub sigma_samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { threshold: default_threshold(), alpha: default_alpha() }
    }
}

/// A full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub pipeline: PipelineKind,
    /// Perturbation; the pipeline's default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<PerturbationSpec>,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Start of the slow variable; `0.3` in every coordinate when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Integration step; `ε inf τ / 4` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub compare: CompareConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields default")
    }
}

fn one() -> f64 {
    1.0
}
fn default_points() -> usize {
    100
}
fn default_record() -> Vec<f64> {
    vec![0.5, 1.0]
}
fn default_limit_dt() -> f64 {
    1e-4
}
fn default_threshold() -> f64 {
    0.12
}
fn default_alpha() -> f64 {
    0.05
}
fn default_eps() -> Vec<f64> {
    vec![1e-2, 1e-3, 1e-4, 1e-5]
}
fn default_n() -> usize {
    2000
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// 1-based line of the first occurrence of `"key"` in `text`.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.find(&needle).map(|pos| text[..pos].matches('\n').count() + 1)
}

impl ExperimentConfig {
    /// Parses and validates. Messages carry the line of the offending key.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        cfg.validate_with_source(Some(text))?;
        Ok(cfg)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn spec(&self) -> PerturbationSpec {
        self.spec.clone().unwrap_or_else(|| self.pipeline.default_spec())
    }

    pub fn x0(&self) -> Vec<f64> {
        self.x0.clone().unwrap_or_else(|| vec![0.3; self.spec().dim])
    }

    pub fn is_toy(&self) -> bool {
        matches!(self.model, ModelConfig::Toy { .. })
    }

    pub fn samples(&self) -> usize {
        self.estimator.samples.unwrap_or(if self.is_toy() { 100_000 } else { 20_000 })
    }

    pub fn lags(&self) -> usize {
        self.estimator.lags.unwrap_or(if self.is_toy() { 200 } else { 100 })
    }

    pub fn cells(&self) -> u64 {
        self.estimator.cells.unwrap_or(if self.is_toy() { 20 } else { 10 })
    }

    pub fn sigma_walk(&self) -> u64 {
        self.estimator.sigma_walk.unwrap_or(10_000)
    }

    pub fn sigma_samples(&self) -> usize {
        self.estimator.sigma_samples.unwrap_or(if self.is_toy() { 4000 } else { 1000 })
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_source(None)
    }

    fn validate_with_source(&self, src: Option<&str>) -> Result<()> {
        let at = |key: &str, msg: String| -> Error {
            match src.and_then(|s| key_line(s, key)) {
                Some(l) => Error::Config(format!("line {l}: {msg}")),
                None => Error::Config(msg),
            }
        };
        if self.eps.is_empty() {
            return Err(at("eps", "eps: at least one value required".into()));
        }
        for (i, e) in self.eps.iter().enumerate() {
            if !(e.is_finite() && *e > 0.0) {
                return Err(at("eps", format!("eps[{i}] = {e} must be positive")));
            }
            if self.eps[..i].contains(e) {
                return Err(at("eps", format!("eps[{i}] = {e} repeats an earlier value")));
            }
        }
        if self.n == 0 {
            return Err(at("n", "n must be at least 1".into()));
        }
        let spec = self.spec();
        spec.check().map_err(|e| at("spec", format!("spec: {e}")))?;
        match self.pipeline {
            PipelineKind::Integrable => {
                if !spec.fbar.is_zero() {
                    return Err(at("pipeline", "integrable pipeline requires fbar = zero".into()));
                }
                if !spec.integrable() {
                    return Err(at("spec", "integrable pipeline requires an integrable envelope (p > 1)".into()));
                }
            }
            PipelineKind::NonCentered => {
                if spec.centered {
                    return Err(at("centered", "non-centered pipeline requires centered = false".into()));
                }
                if !spec.integrable() {
                    return Err(at("spec", "non-centered pipeline requires an integrable envelope (p > 1)".into()));
                }
            }
            PipelineKind::Centered | PipelineKind::Birkhoff => {
                if !spec.centered {
                    return Err(at("centered", format!("{} pipeline requires centered = true", self.pipeline)));
                }
                if !spec.satisfies_decay() {
                    return Err(at(
                        "spec",
                        format!("{} pipeline requires envelope decay p > 2(1+eps0)+1", self.pipeline),
                    ));
                }
            }
        }
        let x0 = self.x0();
        if x0.len() != spec.dim || x0.iter().any(|v| !v.is_finite()) {
            return Err(at("x0", format!("x0 must have {} finite entries", spec.dim)));
        }
        let g = &self.grid;
        if !(g.horizon.is_finite() && g.horizon > 0.0) {
            return Err(at("horizon", format!("grid.horizon = {} must be positive", g.horizon)));
        }
        if g.points == 0 {
            return Err(at("points", "grid.points must be at least 1".into()));
        }
        if !(g.limit_dt > 0.0 && g.limit_dt <= g.horizon) {
            return Err(at("limit_dt", format!("grid.limit_dt = {} must be in (0, horizon]", g.limit_dt)));
        }
        if g.record.is_empty() {
            return Err(at("record", "grid.record: at least one time required".into()));
        }
        let dyn_grid = PathSample::new(g.dynamics_grid(), vec![vec![]; g.points + 1], PathMeta::default())?;
        let lim = g.limit_grid();
        let lim_grid = PathSample::new(lim.clone(), vec![vec![]; lim.len()], PathMeta::default())?;
        for (i, t) in g.record.iter().enumerate() {
            if !(*t > 0.0 && *t <= g.horizon) || dyn_grid.value_at(*t).is_none() || lim_grid.value_at(*t).is_none() {
                return Err(at("record", format!("grid.record[{i}] = {t} is not a point of both grids in (0, horizon]")));
            }
        }
        if g.record.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(at("record", "grid.record must be increasing".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(at("dt", format!("dt = {dt} must be positive")));
            }
        }
        let c = &self.compare;
        if !(c.threshold > 0.0 && c.threshold <= 1.0) {
            return Err(at("threshold", format!("compare.threshold = {} not in (0,1]", c.threshold)));
        }
        if !(c.alpha > 0.0 && c.alpha < 1.0) {
            return Err(at("alpha", format!("compare.alpha = {} not in (0,1)", c.alpha)));
        }
        if self.samples() < 2 {
            return Err(at("samples", "estimator.samples must be at least 2".into()));
        }
        Ok(())
    }
}
