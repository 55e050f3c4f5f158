#![allow(dead_code)]

use rand::Rng;
use slowfast::dynsys::{BilliardBase, ZExtension};
use slowfast::geometry::{BilliardTable, BoundaryPoint, PhasePoint};
use slowfast::rng::{stream_rng, StreamRng};

pub fn rng(index: u64) -> StreamRng {
    stream_rng(0x7e57, 99, index)
}

pub fn two_disc() -> BilliardTable {
    BilliardBase::new(BilliardTable::two_disc_finite_horizon()).unwrap().table().clone()
}

pub fn billiard() -> BilliardBase {
    BilliardBase::new(BilliardTable::two_disc_finite_horizon()).unwrap()
}

/// Uniform position outside the obstacles, uniform heading.
pub fn free_point<R: Rng>(table: &BilliardTable, rng: &mut R) -> PhasePoint {
    loop {
        let (x, y) = (rng.random::<f64>(), rng.random::<f64>());
        if !table.contains_point(x, y) {
            let a = rng.random::<f64>() * std::f64::consts::TAU;
            return PhasePoint::with_heading(x, y, a).unwrap();
        }
    }
}

pub fn boundary_point<R: Rng>(base: &BilliardBase, rng: &mut R) -> BoundaryPoint {
    base.sample_base(rng)
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Standard normal sample by Box-Muller, independent of the crate's samplers.
pub fn normals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
        .collect()
}
