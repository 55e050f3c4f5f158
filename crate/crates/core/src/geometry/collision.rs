use serde::{Deserialize, Serialize};

use super::point::{reflect, BoundaryPoint, PhasePoint};
use super::table::BilliardTable;
use crate::error::{Error, Result};

/// Impacts with `|<v, n>|` below this are tangencies and do not count.
pub const GRAZING_TOL: f64 = 1e-12;

/// Reflection off obstacle `obstacle_id` in translate `cell`, `time` after the
/// start of the flight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub time: f64,
    /// Post-reflection state.
    pub boundary: BoundaryPoint,
    pub obstacle_id: usize,
    pub cell: i64,
}

impl CollisionEvent {
    pub fn point(&self, table: &BilliardTable) -> PhasePoint {
        self.boundary.to_phase_point(table)
    }
}

/// Where a flight starts: a free point, or a boundary point whose own
/// obstacle must be skipped.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Origin {
    Free(PhasePoint),
    Boundary(BoundaryPoint),
}

/// First collision of the free flight from `p`.
pub fn next_collision(p: &PhasePoint, table: &BilliardTable) -> Result<CollisionEvent> {
    search(Origin::Free(*p), table)
}

/// Collision map on the boundary: the next reflection and the flight time.
pub fn collision_map(b: &BoundaryPoint, table: &BilliardTable) -> Result<(BoundaryPoint, f64)> {
    let ev = search(Origin::Boundary(*b), table)?;
    Ok((ev.boundary, ev.time))
}

/// Flow for time `t` from a free point.
pub fn evolve(p: &PhasePoint, t: f64, table: &BilliardTable) -> Result<PhasePoint> {
    let mut remaining = t;
    let ev = next_collision(p, table)?;
    if ev.time > remaining {
        return Ok(p.advance_free(remaining));
    }
    remaining -= ev.time;
    evolve_boundary(&ev.boundary, remaining, table)
}

/// Flow for time `t` from a boundary point with outgoing velocity.
pub fn evolve_boundary(b: &BoundaryPoint, t: f64, table: &BilliardTable) -> Result<PhasePoint> {
    let mut cur = *b;
    let mut remaining = t;
    loop {
        let (next, tau) = collision_map(&cur, table)?;
        if tau > remaining {
            return Ok(cur.advance_free(table, remaining));
        }
        remaining -= tau;
        cur = next;
    }
}

/// Collisions met while flowing for time `t` from `p`, with absolute times.
pub fn collisions_until(p: &PhasePoint, t: f64, table: &BilliardTable) -> Result<Vec<CollisionEvent>> {
    let mut out = Vec::new();
    let mut ev = next_collision(p, table)?;
    let mut clock = 0.0;
    while clock + ev.time <= t {
        clock += ev.time;
        out.push(CollisionEvent { time: clock, ..ev });
        ev = search(Origin::Boundary(ev.boundary), table)?;
    }
    Ok(out)
}

pub(crate) fn search(origin: Origin, table: &BilliardTable) -> Result<CollisionEvent> {
    let (frame, (px, py), (vx, vy), skip) = match origin {
        Origin::Free(p) => (p.cell_index(), p.rel(), p.velocity(), None),
        Origin::Boundary(b) => (b.cell, b.local_position(table), (b.vx, b.vy), Some(b.obstacle)),
    };
    let cap = table.search_cap();

    // Amanatides-Woo traversal of the unit squares crossed by the ray.
    let mut i = px.floor() as i64;
    let mut j = py.floor() as i64;
    let (step_i, mut t_max_x, t_delta_x) = axis_setup(px, vx);
    let (step_j, mut t_max_y, t_delta_y) = axis_setup(py, vy);

    let mut best: Option<(f64, usize, i64, i64)> = None;
    let mut t_entry = 0.0_f64;
    loop {
        if t_entry > cap {
            return Err(Error::NoCollisionWithinBound { cap });
        }
        for (oid, o) in table.obstacles().iter().enumerate() {
            for l in (i - 1)..=(i + 1) {
                for k in (j - 1)..=(j + 1) {
                    if skip == Some(oid) && l == 0 && k == 0 {
                        continue;
                    }
                    let rx = px - (o.cx + l as f64);
                    let ry = py - (o.cy + k as f64);
                    if let Some(t) = ray_disc(rx, ry, vx, vy, o.r) {
                        if best.is_none_or(|(bt, ..)| t < bt) {
                            best = Some((t, oid, l, k));
                        }
                    }
                }
            }
        }
        let t_exit = t_max_x.min(t_max_y);
        if let Some((t, oid, l, k)) = best {
            if t <= t_exit {
                let o = &table.obstacles()[oid];
                let hx = px + t * vx - (o.cx + l as f64);
                let hy = py + t * vy - (o.cy + k as f64);
                let angle = hy.atan2(hx);
                let (s, c) = angle.sin_cos();
                let (wx, wy) = reflect((vx, vy), (c, s));
                let cell = frame + l;
                return Ok(CollisionEvent {
                    time: t,
                    boundary: BoundaryPoint { obstacle: oid, cell, angle, vx: wx, vy: wy },
                    obstacle_id: oid,
                    cell,
                });
            }
        }
        t_entry = t_exit;
        if t_max_x < t_max_y {
            i += step_i;
            t_max_x += t_delta_x;
        } else {
            j += step_j;
            t_max_y += t_delta_y;
        }
    }
}

fn axis_setup(p: f64, v: f64) -> (i64, f64, f64) {
    if v > 0.0 {
        (1, (p.floor() + 1.0 - p) / v, 1.0 / v)
    } else if v < 0.0 {
        (-1, (p - p.floor()) / -v, -1.0 / v)
    } else {
        (0, f64::INFINITY, f64::INFINITY)
    }
}

/// Smallest nonnegative hitting time of the unit-speed ray `rel + t v` on the
/// circle of radius `r` centred at the origin, entering from outside.
#[inline]
pub(crate) fn ray_disc(rx: f64, ry: f64, vx: f64, vy: f64, r: f64) -> Option<f64> {
    let b = vx * rx + vy * ry;
    if b >= 0.0 {
        return None;
    }
    let cc = rx * rx + ry * ry - r * r;
    let disc = b * b - cc;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    if sq < GRAZING_TOL * r {
        return None;
    }
    // stable form of -b - sq
    let t = cc / (-b + sq);
    Some(t.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::table::Obstacle;

    fn single(r: f64) -> BilliardTable {
        BilliardTable::new(vec![Obstacle::new(0.5, 0.5, r)]).unwrap()
    }

    #[test]
    fn head_on() {
        let t = BilliardTable::two_disc_finite_horizon();
        // aim at the centre disc from the left along y = 0.5
        let d = 0.1;
        let p = PhasePoint::new(0.5 - 0.25 - d, 0.5, 1.0, 0.0).unwrap();
        let ev = next_collision(&p, &t).unwrap();
        assert!((ev.time - d).abs() < 1e-14);
        assert_eq!(ev.obstacle_id, 1);
        assert!((ev.boundary.vx + 1.0).abs() < 1e-15 && ev.boundary.vy.abs() < 1e-15);
        let back = evolve(&p, 2.0 * d, &t).unwrap();
        assert!(back.position_distance(&p) < 1e-14);
        assert!((back.vx + 1.0).abs() < 1e-15);
    }

    #[test]
    fn grazing_is_no_collision() {
        // tangent to the disc at the top point
        assert!(ray_disc(-1.0, 0.25, 1.0, 0.0, 0.25).is_none());
        assert!(ray_disc(-1.0, 0.2499, 1.0, 0.0, 0.25).is_some());
    }

    #[test]
    fn corridor_has_no_collision() {
        let t = single(0.1);
        let p = PhasePoint::new(0.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(next_collision(&p, &t), Err(Error::NoCollisionWithinBound { .. })));
    }

    #[test]
    fn collision_across_cells_and_wraparound() {
        let t = single(0.2);
        // heading down through y = 0 into the translate below
        let p = PhasePoint::new(3.5, 0.1, 0.0, -1.0).unwrap();
        let ev = next_collision(&p, &t).unwrap();
        assert!((ev.time - (0.1 + 0.5 - 0.2)).abs() < 1e-14);
        assert_eq!(ev.cell, 3);
        let q = ev.point(&t);
        assert!((q.qy() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn post_reflection_is_outgoing() {
        let t = BilliardTable::two_disc_finite_horizon();
        let mut b = collision_map(
            &BoundaryPoint { obstacle: 1, cell: 0, angle: 0.3, vx: 0.3f64.cos(), vy: 0.3f64.sin() },
            &t,
        )
        .unwrap()
        .0;
        for _ in 0..200 {
            assert!(b.normal_velocity() >= 0.0);
            b = collision_map(&b, &t).unwrap().0;
        }
    }
}
