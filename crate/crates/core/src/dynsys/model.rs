use serde::{Deserialize, Serialize};

use super::{BilliardBase, ToyDoubling};
use crate::error::{Error, Result};
use crate::geometry::{BilliardTable, Obstacle};

/// Model selector as it appears in configs:
/// `{"model":"toy","alpha":0.3}` or `{"model":"billiard","table":{...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelConfig {
    Toy {
        #[serde(default)]
        alpha: f64,
        #[serde(default = "one")]
        roof_scale: f64,
    },
    Billiard {
        table: TableSpec,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    pub obstacles: Vec<Obstacle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_bound: Option<f64>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::Toy { alpha: 0.3, roof_scale: 1.0 }
    }
}

impl ModelConfig {
    pub fn build(&self) -> Result<Model> {
        Ok(match self {
            Self::Toy { alpha, roof_scale } => Model::Toy(ToyDoubling::scaled(*alpha, *roof_scale)?),
            Self::Billiard { table } => Model::Billiard(BilliardBase::new(table.build()?)?),
        })
    }

    pub fn table(&self) -> Option<Result<BilliardTable>> {
        match self {
            Self::Billiard { table } => Some(table.build()),
            Self::Toy { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Toy { .. } => "toy",
            Self::Billiard { .. } => "billiard",
        }
    }

    /// Built-in model by name: the toy map with `α = 0.3`, or the two-disc
    /// finite-horizon table.
    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "toy" => Ok(Self::default()),
            "billiard" => Ok(Self::Billiard {
                table: TableSpec {
                    obstacles: BilliardTable::two_disc_finite_horizon().obstacles().to_vec(),
                    horizon_bound: None,
                },
            }),
            other => Err(Error::Config(format!("unknown model {other:?}; expected toy or billiard"))),
        }
    }
}

impl TableSpec {
    pub fn build(&self) -> Result<BilliardTable> {
        let t = BilliardTable::new(self.obstacles.clone())?;
        match self.horizon_bound {
            Some(h) => t.with_horizon_bound(h),
            None => Ok(t),
        }
    }
}

/// A built model. Use [`with_model!`](crate::with_model) to run generic code
/// on the inner [`ZExtension`](super::ZExtension).
#[derive(Debug, Clone)]
pub enum Model {
    Toy(ToyDoubling),
    Billiard(BilliardBase),
}

/// Dispatches a generic expression over the variants of [`Model`].
#[macro_export]
macro_rules! with_model {
    ($model:expr, |$z:ident| $body:expr) => {
        match $model {
            $crate::dynsys::Model::Toy($z) => $body,
            $crate::dynsys::Model::Billiard($z) => $body,
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_selectors() {
        let t: ModelConfig = serde_json::from_str(r#"{"model":"toy","alpha":0.3}"#).unwrap();
        assert_eq!(t, ModelConfig::Toy { alpha: 0.3, roof_scale: 1.0 });
        let b: ModelConfig = serde_json::from_str(
            r#"{"model":"billiard","table":{"obstacles":[{"cx":0.0,"cy":0.0,"r":0.4},{"cx":0.5,"cy":0.5,"r":0.25}]}}"#,
        )
        .unwrap();
        assert!(matches!(b.build().unwrap(), Model::Billiard(_)));
    }
}
