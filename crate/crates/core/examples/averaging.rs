//! Perturbed slow-fast system against its averaged equation on the
//! billiard, for a shrinking time-scale separation.

use slowfast::dynsys::{sample_start, BilliardBase};
use slowfast::geometry::BilliardTable;
use slowfast::rng::stream_rng;
use slowfast::slowfast::{
    gronwall_check, integrate_averaged, integrate_perturbed, uniform_grid, Envelope, Fbar, PerturbationSpec, Profile,
};

fn main() -> slowfast::Result<()> {
    let model = BilliardBase::new(BilliardTable::two_disc_finite_horizon())?;
    let spec = PerturbationSpec::scalar(
        Envelope::Power { p: 5.0 },
        1.0,
        Profile::Constant { value: 1.0 },
        false,
        Fbar::SineDamping { rate: 0.5 },
    )
    .prepare(&model, 0)?;
    let x0 = [0.3];
    let grid = uniform_grid(1.0, 50);
    let w = integrate_averaged(&spec.fbar, &x0, &grid, 1e-4)?;

    for eps in [1e-2, 1e-3, 1e-4] {
        let start = sample_start(&model, &mut stream_rng(1, 0, 0))?;
        let x = integrate_perturbed(&spec, &model, &x0, &start, eps, &grid, None)?;
        let sup = x.values.iter().zip(&w.values).map(|(a, b)| (a[0] - b[0]).abs()).fold(0.0, f64::max);
        let g = gronwall_check(&spec, &model, &x0, &start, eps, 1.0, None)?;
        println!(
            "eps {eps:e}: X(1) = {:.5}, W(1) = {:.5}, sup|X - W| = {sup:.3e}, scaled by eps^-1/2: {:.3}, gronwall {}",
            x.values[50][0],
            w.values[50][0],
            sup / eps.sqrt(),
            if g.holds(1e-9) { "holds" } else { "VIOLATED" }
        );
    }
    Ok(())
}
