//! Event-driven Z-periodic Lorentz gas on the cylinder R x T with disc
//! obstacles.

mod collision;
mod dump;
mod horizon;
mod point;
mod table;

pub use collision::{
    collision_map, collisions_until, evolve, evolve_boundary, next_collision, CollisionEvent, GRAZING_TOL,
};
pub use dump::{write_trajectory_csv, TrajectoryRow};
pub use horizon::{validate_finite_horizon, HorizonCertificate, HorizonReport};
pub use point::{reflect, BoundaryPoint, PhasePoint, UNIT_SPEED_TOL};
pub use table::{BilliardTable, Obstacle, DEFAULT_SEARCH_CAP};

/// `floor(qx)`, the label of the copy of the fundamental domain.
pub fn cell_index(p: &PhasePoint) -> i64 {
    p.cell_index()
}
