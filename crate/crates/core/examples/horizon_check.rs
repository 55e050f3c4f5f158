//! Certifies finite horizon for the two-disc table and finds the open
//! corridor of a lone small disc.

use slowfast::geometry::{validate_finite_horizon, BilliardTable, HorizonReport, Obstacle};

fn report(name: &str, table: &BilliardTable) {
    match validate_finite_horizon(table, 5000, 50.0) {
        HorizonReport::Certified(c) => println!(
            "{name}: finite horizon, longest flight {:.4}, bound {:.4} ({} rays)",
            c.max_flight, c.horizon_bound, c.rays_checked
        ),
        HorizonReport::Failed { witness, reason } => println!(
            "{name}: {reason}; free ray from ({:.3}, {:.3}) heading ({:.3}, {:.3})",
            witness.qx(),
            witness.qy(),
            witness.vx,
            witness.vy
        ),
    }
}

fn main() -> slowfast::Result<()> {
    report("two discs", &BilliardTable::two_disc_finite_horizon());
    report("one small disc", &BilliardTable::new(vec![Obstacle::new(0.5, 0.5, 0.1)])?);
    Ok(())
}
