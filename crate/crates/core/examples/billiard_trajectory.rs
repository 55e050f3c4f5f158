//! Prints a Lorentz-gas trajectory as CSV, then the first few collisions.
//!
//! ```text
//! cargo run --example billiard_trajectory > orbit.csv
//! ```

use slowfast::geometry::{collisions_until, write_trajectory_csv, BilliardTable, PhasePoint};
use slowfast::slowfast::uniform_grid;

fn main() -> slowfast::Result<()> {
    let table = BilliardTable::two_disc_finite_horizon();
    let start = PhasePoint::with_heading(0.05, 0.1, 0.7)?;
    let grid = uniform_grid(20.0, 400);
    write_trajectory_csv(std::io::stdout().lock(), &start, &grid, true, &table)?;

    for ev in collisions_until(&start, 3.0, &table)? {
        eprintln!(
            "t={:.6} obstacle {} cell {:+} angle {:.4}",
            ev.time, ev.boundary.obstacle, ev.cell, ev.boundary.angle
        );
    }
    Ok(())
}
