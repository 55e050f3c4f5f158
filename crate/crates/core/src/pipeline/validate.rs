use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::dynsys::ModelConfig;
use crate::geometry::{validate_finite_horizon, BilliardTable, HorizonReport};

/// Samples used by the finite-horizon certificate.
pub const HORIZON_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationItem {
    pub check: String,
    pub ok: bool,
    pub detail: String,
}

/// Outcome of [`validate`]; a value, never an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub items: Vec<ValidationItem>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.items.iter().all(|i| i.ok)
    }

    fn push(&mut self, check: &str, ok: bool, detail: impl Into<String>) {
        self.items.push(ValidationItem { check: check.into(), ok, detail: detail.into() });
    }
}

/// Checks table disjointness, the finite-horizon certificate, spec decay
/// metadata and grid sanity.
pub fn validate(cfg: &ExperimentConfig) -> ValidationReport {
    let mut r = ValidationReport { items: Vec::new() };
    match &cfg.model {
        ModelConfig::Toy { alpha, roof_scale } => {
            let ok = (0.0..1.0).contains(alpha) && *roof_scale > 0.0;
            r.push("model", ok, format!("toy alpha {alpha}, roof scale {roof_scale}"));
        }
        ModelConfig::Billiard { table } => match BilliardTable::new(table.obstacles.clone()) {
            Err(e) => {
                r.push("table_disjoint", false, e.to_string());
                r.push("finite_horizon", false, "not checked: invalid table");
            }
            Ok(t) => {
                r.push("table_disjoint", true, format!("{} obstacles, min gap {:.4}", t.obstacles().len(), t.min_gap()));
                match validate_finite_horizon(&t, HORIZON_SAMPLES, t.search_cap()) {
                    HorizonReport::Certified(c) => r.push(
                        "finite_horizon",
                        true,
                        format!("max flight {:.4} over {} rays", c.max_flight, c.rays_checked),
                    ),
                    HorizonReport::Failed { reason, .. } => r.push("finite_horizon", false, reason),
                }
            }
        },
    }
    let spec = cfg.spec();
    match spec.check() {
        Ok(()) => {
            r.push("spec", true, format!("dimension {}", spec.dim));
            r.push(
                "spec_decay",
                spec.satisfies_decay() || !spec.centered,
                format!("envelope {:?}, eps0 {}, decay condition {}", spec.envelope, spec.eps0, spec.satisfies_decay()),
            );
        }
        Err(e) => r.push("spec", false, e.to_string()),
    }
    match cfg.validate() {
        Ok(()) => r.push("config", true, "eps ladder, ensemble size and grids consistent"),
        Err(e) => r.push("config", false, e.to_string()),
    }
    r
}
