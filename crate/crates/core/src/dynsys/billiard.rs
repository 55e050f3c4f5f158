use rand::Rng;

use super::{Transition, ZExtension};
use crate::error::{Error, Result};
use crate::geometry::{
    collision_map, validate_finite_horizon, BilliardTable, BoundaryPoint, HorizonReport,
};

/// Collision map of a finite-horizon Lorentz gas as the base of a
/// Z-extension: `φ` is the cell label of the next obstacle hit and `τ` the
/// free flight.
#[derive(Debug, Clone)]
pub struct BilliardBase {
    table: BilliardTable,
    inf_tau: f64,
    sup_tau: f64,
}

impl BilliardBase {
    /// Validates the horizon when the table carries no certified bound.
    pub fn new(table: BilliardTable) -> Result<Self> {
        let table = match table.horizon_bound() {
            Some(_) => table,
            None => match validate_finite_horizon(&table, 20_000, table.search_cap()) {
                r @ HorizonReport::Certified(_) => r.apply(table).expect("certified"),
                HorizonReport::Failed { reason, .. } => return Err(Error::InvalidTable(reason)),
            },
        };
        let inf_tau = table.min_gap();
        let sup_tau = table.horizon_bound().expect("bound set above");
        Ok(Self { table, inf_tau, sup_tau })
    }

    pub fn table(&self) -> &BilliardTable {
        &self.table
    }
}

impl ZExtension for BilliardBase {
    type Point = BoundaryPoint;

    fn transition(&self, p: &BoundaryPoint) -> Result<Transition<BoundaryPoint>> {
        let (next, roof) = collision_map(p, &self.table)?;
        Ok(Transition { next: next.base(), step: next.cell - p.cell, roof })
    }

    /// Collision-invariant measure: arclength times the cosine of the
    /// outgoing angle.
    fn sample_base<R: Rng + ?Sized>(&self, rng: &mut R) -> BoundaryPoint {
        let obs = self.table.obstacles();
        let total: f64 = obs.iter().map(|o| o.r).sum();
        let mut pick = rng.random::<f64>() * total;
        let mut oid = obs.len() - 1;
        for (i, o) in obs.iter().enumerate() {
            if pick < o.r {
                oid = i;
                break;
            }
            pick -= o.r;
        }
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        let psi = (2.0 * rng.random::<f64>() - 1.0).asin();
        let (s, c) = (angle + psi).sin_cos();
        BoundaryPoint { obstacle: oid, cell: 0, angle, vx: c, vy: s }
    }

    fn coord(&self, p: &BoundaryPoint) -> f64 {
        let turns = p.angle / std::f64::consts::TAU;
        let frac = turns - turns.floor();
        (p.obstacle as f64 + frac) / self.table.obstacles().len() as f64
    }

    fn roof_bounds(&self) -> (f64, f64) {
        (self.inf_tau, self.sup_tau)
    }

    fn psi(&self, p: &BoundaryPoint, cell: i64, height: f64) -> i64 {
        p.translate(cell).advance_free(&self.table, height).cell_index()
    }

    fn name(&self) -> &str {
        "billiard"
    }
}
