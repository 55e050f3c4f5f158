//! Samples the limiting processes driven by Brownian local time and checks
//! the mean of the rescaled local time at t = 1.

use slowfast::limitproc::{LimitKind, LimitLawParams, LimitSampler};
use slowfast::slowfast::{uniform_grid, Fbar};
use std::f64::consts::PI;

fn main() -> slowfast::Result<()> {
    let (tau_bar, sigma) = (1.5, 0.8);
    let grid = uniform_grid(1.0, 5000);
    let n = 4000;
    let fbar = Fbar::SineDamping { rate: 0.5 };
    for kind in [LimitKind::Integrable, LimitKind::NonCentered, LimitKind::Centered, LimitKind::Birkhoff] {
        let params = LimitLawParams::constant(tau_bar, sigma, vec![0.6], vec![1.0])?;
        let sampler = LimitSampler::new(params, kind, &fbar, &[0.3], &grid)?;
        let (mut l, mut y, mut y2) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let b = sampler.bundle(7, i)?;
            l += b.ltilde.last().unwrap();
            let v = b.y.values.last().unwrap()[0];
            y += v;
            y2 += v * v;
        }
        let (l, y) = (l / n as f64, y / n as f64);
        println!(
            "{kind:?}: E L(1) = {l:.4} (exact {:.4}), E Y(1) = {y:+.4}, sd Y(1) = {:.4}",
            (2.0 * tau_bar / (PI * sigma)).sqrt(),
            (y2 / n as f64 - y * y).sqrt()
        );
    }
    Ok(())
}
