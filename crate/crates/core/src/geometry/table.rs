use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

/// Default free-flight search cap, in fundamental-cell widths.
pub const DEFAULT_SEARCH_CAP: f64 = 10.0;

/// A disc obstacle whose center lies in the fundamental cell `[0,1) x [0,1)`.
///
/// The translates `O + (l, 0)` for `l` in Z tile the cylinder R x T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    #[serde(rename = "cx")]
    pub cx: f64,
    #[serde(rename = "cy")]
    pub cy: f64,
    #[serde(rename = "r")]
    pub r: f64,
}

impl Obstacle {
    pub fn new(cx: f64, cy: f64, r: f64) -> Self {
        Self { cx, cy, r }
    }

    pub fn perimeter(&self) -> f64 {
        std::f64::consts::TAU * self.r
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableDoc {
    obstacles: Vec<Obstacle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon_bound: Option<f64>,
}

/// Periodic disc configuration of the Lorentz gas fundamental cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BilliardTable {
    obstacles: Vec<Obstacle>,
    horizon_bound: Option<f64>,
    search_cap: f64,
}

impl BilliardTable {
    /// Builds a table, checking radii, centers and pairwise disjointness of
    /// all closed translates.
    pub fn new(obstacles: Vec<Obstacle>) -> Result<Self> {
        for (i, o) in obstacles.iter().enumerate() {
            if !(o.r.is_finite() && o.r > 0.0) {
                return Err(Error::InvalidTable(format!("obstacle {i}: radius must be > 0")));
            }
            if !(0.0..1.0).contains(&o.cx) || !(0.0..1.0).contains(&o.cy) {
                return Err(Error::InvalidTable(format!(
                    "obstacle {i}: center ({}, {}) outside the fundamental cell",
                    o.cx, o.cy
                )));
            }
        }
        let table = Self {
            obstacles,
            horizon_bound: None,
            search_cap: DEFAULT_SEARCH_CAP,
        };
        if let Some((i, j, gap)) = table.first_overlap() {
            return Err(Error::InvalidTable(format!(
                "obstacles {i} and {j} overlap (closure gap {gap:.3e})"
            )));
        }
        Ok(table)
    }

    /// Two-disc finite-horizon configuration: a large disc at the cell corner
    /// and a smaller one at the cell center. Blocks the horizontal, vertical
    /// and diagonal corridors.
    pub fn two_disc_finite_horizon() -> Self {
        Self::new(vec![Obstacle::new(0.0, 0.0, 0.4), Obstacle::new(0.5, 0.5, 0.25)])
            .expect("built-in table is valid")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: TableDoc = serde_json::from_str(s)?;
        let mut t = Self::new(doc.obstacles)?;
        if let Some(h) = doc.horizon_bound {
            t = t.with_horizon_bound(h)?;
        }
        Ok(t)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        Self::from_json_str(&v.to_string())
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TableDoc {
            obstacles: self.obstacles.clone(),
            horizon_bound: self.horizon_bound,
        })
        .expect("table serializes")
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn horizon_bound(&self) -> Option<f64> {
        self.horizon_bound
    }

    pub fn search_cap(&self) -> f64 {
        self.search_cap
    }

    pub fn with_horizon_bound(mut self, bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::InvalidTable(format!("horizon bound {bound} must be positive")));
        }
        self.horizon_bound = Some(bound);
        Ok(self)
    }

    pub fn with_search_cap(mut self, cap: f64) -> Self {
        self.search_cap = cap;
        self
    }

    /// Smallest gap between closures of distinct obstacle translates, a lower
    /// bound on every free flight between two collisions.
    pub fn min_gap(&self) -> f64 {
        let mut best = f64::INFINITY;
        self.for_each_translate_pair(|_, _, gap| best = best.min(gap));
        best
    }

    /// Area of the free region in one fundamental cell.
    pub fn free_area(&self) -> f64 {
        1.0 - self
            .obstacles
            .iter()
            .map(|o| std::f64::consts::PI * o.r * o.r)
            .sum::<f64>()
    }

    pub fn total_perimeter(&self) -> f64 {
        self.obstacles.iter().map(Obstacle::perimeter).sum()
    }

    /// Mean free path under the collision-invariant measure, `pi |Q| / |dQ|`.
    pub fn mean_free_path(&self) -> f64 {
        std::f64::consts::PI * self.free_area() / self.total_perimeter()
    }

    /// True if the (cell-relative) point lies strictly inside some obstacle.
    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        let fx = x - x.floor();
        let fy = y - y.floor();
        self.obstacles.iter().any(|o| {
            (-1..=1).any(|l| {
                (-1..=1).any(|k| {
                    let dx = fx - (o.cx + l as f64);
                    let dy = fy - (o.cy + k as f64);
                    dx * dx + dy * dy < o.r * o.r
                })
            })
        })
    }

    fn first_overlap(&self) -> Option<(usize, usize, f64)> {
        let mut hit = None;
        self.for_each_translate_pair(|i, j, gap| {
            if hit.is_none() && gap <= 0.0 {
                hit = Some((i, j, gap));
            }
        });
        hit
    }

    // Closure gaps over translates l in {-1,0,1} (cylinder axis) and k in {-1,0,1}
    // (torus wraparound); pairs of an obstacle with its own nonzero translate included.
    fn for_each_translate_pair(&self, mut f: impl FnMut(usize, usize, f64)) {
        for (i, a) in self.obstacles.iter().enumerate() {
            for (j, b) in self.obstacles.iter().enumerate().skip(i) {
                for l in -1..=1 {
                    for k in -1..=1 {
                        if i == j && l == 0 && k == 0 {
                            continue;
                        }
                        let dx = b.cx + l as f64 - a.cx;
                        let dy = b.cy + k as f64 - a.cy;
                        let gap = (dx * dx + dy * dy).sqrt() - a.r - b.r;
                        f(i, j, gap);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlap_and_bad_radius() {
        assert!(BilliardTable::new(vec![Obstacle::new(0.2, 0.5, 0.2), Obstacle::new(0.5, 0.5, 0.2)]).is_err());
        assert!(BilliardTable::new(vec![Obstacle::new(0.5, 0.5, 0.0)]).is_err());
        assert!(BilliardTable::new(vec![Obstacle::new(1.5, 0.5, 0.1)]).is_err());
        // a disc touching its own translate
        assert!(BilliardTable::new(vec![Obstacle::new(0.5, 0.5, 0.5)]).is_err());
    }

    #[test]
    fn wraparound_overlap_detected() {
        // overlaps only through the torus identification y ~ y + 1
        let r = BilliardTable::new(vec![Obstacle::new(0.5, 0.05, 0.1), Obstacle::new(0.5, 0.9, 0.1)]);
        assert!(r.is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = BilliardTable::from_json_str(r#"{"obstacles":[{"cx":0.0,"cy":0.0,"r":0.4},{"cx":0.5,"cy":0.5,"r":0.25}]}"#)
            .unwrap();
        assert_eq!(t, BilliardTable::two_disc_finite_horizon());
        let back = BilliardTable::from_json_str(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn two_disc_gap() {
        let t = BilliardTable::two_disc_finite_horizon();
        let expected = 0.5f64.sqrt() - 0.65;
        assert!((t.min_gap() - expected).abs() < 1e-15);
    }
}
