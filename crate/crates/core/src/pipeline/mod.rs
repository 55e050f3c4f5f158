//! Experiment orchestration: configs, ensembles, artifacts and reports.

mod config;
mod ensemble;
mod io;
mod run;
mod validate;

pub use config::{CompareConfig, EstimatorConfig, ExperimentConfig, GridConfig, PipelineKind};
pub use ensemble::{averaged_path, dynamics_ensemble, dynamics_sample, median, DynamicsEnsemble};
pub use io::{ensemble_csv, read_ensemble, sha256_hex, time_file, write_ensemble, ArtifactWriter, FileEntry};
pub use run::{
    compare_dirs, dynamics, eps_dir, estimate, limit_ensemble, limit_kind, run_pipeline, run_stages, Check,
    Estimates, Manifest, RunOutcome, Stages, SEEDING_NOTE,
};
pub use validate::{validate, ValidationItem, ValidationReport, HORIZON_SAMPLES};
