use rand::Rng;
use serde::{Deserialize, Serialize};

use super::collision::{search, Origin};
use super::point::{BoundaryPoint, PhasePoint};
use super::table::BilliardTable;
use crate::error::Error;
use crate::rng::{domain, stream_rng};

/// Relative margin added to the largest observed flight.
const BOUND_MARGIN: f64 = 0.01;
const SWEEP_POSITIONS: usize = 8;
const SWEEP_ANGLES: usize = 720;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonCertificate {
    /// Largest free flight observed (after local refinement).
    pub max_flight: f64,
    /// `max_flight` with a safety margin; stored on the table.
    pub horizon_bound: f64,
    pub rays_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HorizonReport {
    Certified(HorizonCertificate),
    Failed { witness: PhasePoint, reason: String },
}

impl HorizonReport {
    pub fn is_certified(&self) -> bool {
        matches!(self, Self::Certified(_))
    }

    /// Table with the certified bound attached, if any.
    pub fn apply(&self, table: BilliardTable) -> Option<BilliardTable> {
        match self {
            Self::Certified(c) => table.with_horizon_bound(c.horizon_bound).ok(),
            Self::Failed { .. } => None,
        }
    }
}

/// Sample-based finite-horizon check: random rays from free points and from
/// obstacle boundaries, a deterministic angular sweep over a grid of free
/// positions, then local refinement of the longest boundary flights.
pub fn validate_finite_horizon(table: &BilliardTable, n_samples: usize, cap: f64) -> HorizonReport {
    validate_finite_horizon_seeded(table, n_samples, cap, 0)
}

pub fn validate_finite_horizon_seeded(
    table: &BilliardTable,
    n_samples: usize,
    cap: f64,
    seed: u64,
) -> HorizonReport {
    if table.obstacles().is_empty() {
        return HorizonReport::Failed {
            witness: PhasePoint::new(0.5, 0.5, 1.0, 0.0).expect("valid"),
            reason: "no obstacles: every ray is an infinite free flight".into(),
        };
    }
    let t = table.clone().with_search_cap(cap);
    let mut checked = 0usize;
    let mut best: (f64, Option<BoundaryPoint>) = (0.0, None);

    let fail = |p: PhasePoint| HorizonReport::Failed {
        witness: p,
        reason: format!("free flight longer than cap {cap}"),
    };

    // deterministic sweep first: it finds corridors along lattice directions
    for a in 0..SWEEP_POSITIONS {
        for b in 0..SWEEP_POSITIONS {
            let qx = (a as f64 + 0.5) / SWEEP_POSITIONS as f64;
            let qy = (b as f64 + 0.5) / SWEEP_POSITIONS as f64;
            if t.contains_point(qx, qy) {
                continue;
            }
            for k in 0..SWEEP_ANGLES {
                let ang = std::f64::consts::TAU * k as f64 / SWEEP_ANGLES as f64;
                let p = PhasePoint::with_heading(qx, qy, ang).expect("unit heading");
                checked += 1;
                if search(Origin::Free(p), &t).is_err() {
                    return fail(p);
                }
            }
        }
    }

    let mut rng = stream_rng(seed, domain::HORIZON, 0);
    for _ in 0..n_samples {
        // free point by rejection
        let (qx, qy) = loop {
            let (x, y): (f64, f64) = (rng.random(), rng.random());
            if !t.contains_point(x, y) {
                break (x, y);
            }
        };
        let p = PhasePoint::with_heading(qx, qy, rng.random::<f64>() * std::f64::consts::TAU).expect("unit heading");
        checked += 1;
        if search(Origin::Free(p), &t).is_err() {
            return fail(p);
        }
        let b = random_boundary(&t, &mut rng);
        checked += 1;
        match search(Origin::Boundary(b), &t) {
            Ok(ev) => {
                if ev.time > best.0 {
                    best = (ev.time, Some(b));
                }
            }
            Err(Error::NoCollisionWithinBound { .. }) => return fail(b.to_phase_point(&t)),
            Err(_) => unreachable!("search only fails on the cap"),
        }
    }

    let mut max_flight = best.0;
    if let Some(b) = best.1 {
        let (refined, n) = refine(&t, b, best.0);
        checked += n;
        if !refined.is_finite() {
            return fail(b.to_phase_point(&t));
        }
        max_flight = max_flight.max(refined);
    }
    HorizonReport::Certified(HorizonCertificate {
        max_flight,
        horizon_bound: max_flight * (1.0 + BOUND_MARGIN),
        rays_checked: checked,
    })
}

/// Boundary point with uniformly chosen obstacle angle and outgoing direction.
pub(crate) fn random_boundary<R: Rng>(t: &BilliardTable, rng: &mut R) -> BoundaryPoint {
    let oid = rng.random_range(0..t.obstacles().len());
    let angle = rng.random::<f64>() * std::f64::consts::TAU;
    let psi = (rng.random::<f64>() - 0.5) * std::f64::consts::PI;
    boundary_at(oid, angle, psi)
}

/// Boundary point at `angle` with velocity at angle `psi` from the normal.
pub(crate) fn boundary_at(obstacle: usize, angle: f64, psi: f64) -> BoundaryPoint {
    let (s, c) = (angle + psi).sin_cos();
    BoundaryPoint { obstacle, cell: 0, angle, vx: c, vy: s }
}

// Pattern search on (angle, psi) maximizing the flight time.
fn refine(t: &BilliardTable, start: BoundaryPoint, start_tau: f64) -> (f64, usize) {
    let (sin_psi, cos_psi) = {
        let (nx, ny) = start.normal();
        (nx * start.vy - ny * start.vx, nx * start.vx + ny * start.vy)
    };
    let mut angle = start.angle;
    let mut psi = sin_psi.atan2(cos_psi);
    let mut best = start_tau;
    let mut step = 1e-2;
    let mut evals = 0;
    let limit = std::f64::consts::FRAC_PI_2 - 1e-9;
    while step > 1e-10 {
        let mut improved = false;
        for (da, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let p = (psi + dp).clamp(-limit, limit);
            evals += 1;
            match search(Origin::Boundary(boundary_at(start.obstacle, angle + da, p)), t) {
                Ok(ev) if ev.time > best => {
                    best = ev.time;
                    angle += da;
                    psi = p;
                    improved = true;
                }
                Ok(_) => {}
                Err(_) => return (f64::INFINITY, evals),
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::table::Obstacle;

    #[test]
    fn empty_table_fails() {
        let t = BilliardTable::new(vec![]).unwrap();
        assert!(!validate_finite_horizon(&t, 10, 10.0).is_certified());
    }

    #[test]
    fn single_small_disc_has_corridor() {
        let t = BilliardTable::new(vec![Obstacle::new(0.5, 0.5, 0.1)]).unwrap();
        match validate_finite_horizon(&t, 100, 10.0) {
            HorizonReport::Failed { witness, .. } => {
                // the witness must really fly past the cap
                assert!(search(Origin::Free(witness), &t).is_err());
            }
            r => panic!("expected failure, got {r:?}"),
        }
    }

    #[test]
    fn two_disc_table_certified() {
        let t = BilliardTable::two_disc_finite_horizon();
        let r = validate_finite_horizon(&t, 2000, 10.0);
        let HorizonReport::Certified(c) = r else { panic!("{r:?}") };
        assert!(c.max_flight > t.min_gap() && c.max_flight < 2.0);
    }
}
