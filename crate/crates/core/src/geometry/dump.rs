use serde::Serialize;
use std::io::Write;

use super::collision::{collisions_until, evolve};
use super::point::PhasePoint;
use super::table::BilliardTable;
use crate::error::Result;

/// One row of a trajectory dump: `t,qx,qy,vx,vy,cell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub qx: f64,
    pub qy: f64,
    pub vx: f64,
    pub vy: f64,
    pub cell: i64,
}

impl TrajectoryRow {
    pub fn new(t: f64, p: &PhasePoint) -> Self {
        Self { t, qx: p.qx(), qy: p.qy(), vx: p.vx, vy: p.vy, cell: p.cell_index() }
    }
}

/// Writes the state at each grid time, plus every collision when
/// `with_collisions` is set.
pub fn write_trajectory_csv<W: Write>(
    out: W,
    p: &PhasePoint,
    grid: &[f64],
    with_collisions: bool,
    table: &BilliardTable,
) -> Result<()> {
    let mut rows: Vec<TrajectoryRow> = grid
        .iter()
        .map(|&t| evolve(p, t, table).map(|q| TrajectoryRow::new(t, &q)))
        .collect::<Result<_>>()?;
    if with_collisions {
        let end = grid.iter().copied().fold(0.0, f64::max);
        for ev in collisions_until(p, end, table)? {
            rows.push(TrajectoryRow::new(ev.time, &ev.point(table)));
        }
        rows.sort_by(|a, b| a.t.total_cmp(&b.t));
    }
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
