//! A small end-to-end run: estimates, limit ensemble, dynamics ensembles,
//! KS comparison and the error exponent, written under `out/example`.

use slowfast::pipeline::{run_pipeline, EstimatorConfig, ExperimentConfig, PipelineKind};

fn main() -> slowfast::Result<()> {
    let cfg = ExperimentConfig {
        pipeline: PipelineKind::NonCentered,
        eps: vec![1e-2, 3e-3, 1e-3],
        n: 300,
        seed: 5,
        out: "out/example".into(),
        estimator: EstimatorConfig { samples: Some(20_000), ..Default::default() },
        ..Default::default()
    };
    let run = run_pipeline(&cfg)?;
    for c in &run.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{} files under {}", run.manifest.files.len(), run.dir.display());
    Ok(())
}
