use serde::{Deserialize, Serialize};

use super::table::BilliardTable;
use crate::error::{Error, Result};

/// Tolerance on `|v| = 1` accepted by [`PhasePoint::new`].
pub const UNIT_SPEED_TOL: f64 = 1e-12;

/// State of the continuous flow on the cylinder R x T.
///
/// The axis coordinate is kept as an integer cell plus an offset in `[0, 1)`,
/// so deck translations `q -> q + (k, 0)` are exact and the offset never loses
/// precision far from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    cell: i64,
    x: f64,
    y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl PhasePoint {
    /// Builds a point from cylinder coordinates. `qy` is reduced mod 1.
    pub fn new(qx: f64, qy: f64, vx: f64, vy: f64) -> Result<Self> {
        if !(qx.is_finite() && qy.is_finite() && vx.is_finite() && vy.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        let speed = (vx * vx + vy * vy).sqrt();
        if (speed - 1.0).abs() > UNIT_SPEED_TOL {
            return Err(Error::InvalidPoint(format!("speed {speed} is not 1")));
        }
        let cell = qx.floor();
        Ok(Self::from_parts(cell as i64, qx - cell, qy, vx, vy))
    }

    /// Unit-speed point with heading `angle` (radians).
    pub fn with_heading(qx: f64, qy: f64, angle: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        Self::new(qx, qy, c, s)
    }

    /// Cell-relative constructor. Offsets outside `[0,1)` are renormalized.
    pub(crate) fn from_parts(cell: i64, x: f64, y: f64, vx: f64, vy: f64) -> Self {
        let (dc, x) = split_unit(x);
        let (_, y) = split_unit(y);
        Self { cell: cell + dc, x, y, vx, vy }
    }

    pub fn qx(&self) -> f64 {
        self.cell as f64 + self.x
    }

    pub fn qy(&self) -> f64 {
        self.y
    }

    /// Offset of the axis coordinate within its cell, in `[0, 1)`.
    pub fn x_in_cell(&self) -> f64 {
        self.x
    }

    /// Z-label of the copy of the fundamental domain holding the point.
    pub fn cell_index(&self) -> i64 {
        self.cell
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.vx, self.vy)
    }

    pub fn speed(&self) -> f64 {
        (self.vx * self.vx + self.vy * self.vy).sqrt()
    }

    /// Deck transformation `q -> q + (k, 0)`.
    pub fn translate(&self, k: i64) -> Self {
        Self { cell: self.cell + k, ..*self }
    }

    pub fn flip_velocity(&self) -> Self {
        Self { vx: -self.vx, vy: -self.vy, ..*self }
    }

    /// Straight-line motion for time `s`, ignoring obstacles.
    pub fn advance_free(&self, s: f64) -> Self {
        Self::from_parts(self.cell, self.x + s * self.vx, self.y + s * self.vy, self.vx, self.vy)
    }

    pub fn is_outside_obstacles(&self, table: &BilliardTable) -> bool {
        !table.contains_point(self.x, self.y)
    }

    /// Distance between positions on the cylinder (torus-aware in `qy`).
    pub fn position_distance(&self, other: &Self) -> f64 {
        let dx = (self.cell - other.cell) as f64 + (self.x - other.x);
        let mut dy = self.y - other.y;
        dy -= dy.round();
        (dx * dx + dy * dy).sqrt()
    }

    /// Max of position distance and velocity difference.
    pub fn distance(&self, other: &Self) -> f64 {
        let dv = ((self.vx - other.vx).powi(2) + (self.vy - other.vy).powi(2)).sqrt();
        self.position_distance(other).max(dv)
    }

    pub(crate) fn rel(&self) -> (f64, f64) {
        (self.x, self.y)
    }
}

/// Point on an obstacle boundary, stored by angle so that it cannot drift off
/// the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub obstacle: usize,
    /// Z-label of the obstacle translate.
    pub cell: i64,
    pub angle: f64,
    pub vx: f64,
    pub vy: f64,
}

impl BoundaryPoint {
    /// Outward unit normal of the obstacle at the point (pointing into the
    /// billiard domain).
    pub fn normal(&self) -> (f64, f64) {
        let (s, c) = self.angle.sin_cos();
        (c, s)
    }

    /// Position relative to the origin of cell `self.cell`; may leave `[0,1)^2`.
    pub(crate) fn local_position(&self, table: &BilliardTable) -> (f64, f64) {
        let o = &table.obstacles()[self.obstacle];
        let (nx, ny) = self.normal();
        (o.cx + o.r * nx, o.cy + o.r * ny)
    }

    pub fn to_phase_point(&self, table: &BilliardTable) -> PhasePoint {
        let (x, y) = self.local_position(table);
        PhasePoint::from_parts(self.cell, x, y, self.vx, self.vy)
    }

    /// Free motion for time `s` from the boundary point.
    pub fn advance_free(&self, table: &BilliardTable, s: f64) -> PhasePoint {
        let (x, y) = self.local_position(table);
        PhasePoint::from_parts(self.cell, x + s * self.vx, y + s * self.vy, self.vx, self.vy)
    }

    /// `<v, n>`; nonnegative for outgoing velocities.
    pub fn normal_velocity(&self) -> f64 {
        let (nx, ny) = self.normal();
        self.vx * nx + self.vy * ny
    }

    pub fn translate(&self, k: i64) -> Self {
        Self { cell: self.cell + k, ..*self }
    }

    /// Same point with the cell label reset to 0 (the base point of the
    /// Z-extension).
    pub fn base(&self) -> Self {
        Self { cell: 0, ..*self }
    }
}

/// Specular reflection `v - 2 <v, n> n`.
#[inline]
pub fn reflect(v: (f64, f64), n: (f64, f64)) -> (f64, f64) {
    let dot = v.0 * n.0 + v.1 * n.1;
    (v.0 - 2.0 * dot * n.0, v.1 - 2.0 * dot * n.1)
}

// Exact split x = k + f with f in [0, 1).
fn split_unit(x: f64) -> (i64, f64) {
    let k = x.floor();
    let f = x - k;
    if f >= 1.0 {
        // x = -tiny rounds to f = 1
        (k as i64 + 1, 0.0)
    } else {
        (k as i64, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_index_examples() {
        let p = PhasePoint::new(0.3, 0.5, 1.0, 0.0).unwrap();
        assert_eq!(p.cell_index(), 0);
        let q = PhasePoint::new(-0.2, 0.5, 1.0, 0.0).unwrap();
        assert_eq!(q.cell_index(), -1);
        assert_eq!(q.translate(5).cell_index(), 4);
        assert!((q.qx() + 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_unit_speed() {
        assert!(PhasePoint::new(0.0, 0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn tiny_negative_offset_wraps() {
        let p = PhasePoint::from_parts(3, -1e-20, -1e-20, 1.0, 0.0);
        assert_eq!(p.cell_index(), 3);
        assert!(p.x_in_cell() < 1.0 && p.qy() < 1.0);
    }

    #[test]
    fn reflection_is_an_involution() {
        let n = (0.6, 0.8);
        let v = (0.28, -0.96);
        let w = reflect(reflect(v, n), n);
        assert!((w.0 - v.0).abs() < 1e-15 && (w.1 - v.1).abs() < 1e-15);
    }
}
