//! Z-extensions over probability-preserving bases and their suspension flows.
//!
//! A base map `T̄` with step function `φ` and roof `τ` defines the skew
//! product `T(ω, m) = (T̄ω, m + φ(ω))` and the flow under `τ` over it. Two
//! bases are provided: a doubling-map toy model with exactly known constants
//! and the collision map of the Lorentz gas.

mod billiard;
mod model;
mod suspension;
mod toy;

use rand::Rng;
use std::fmt::Debug;

use crate::error::Result;

pub use billiard::BilliardBase;
pub use model::{Model, ModelConfig};
pub use suspension::{
    birkhoff_step_sum, displacement_path, n_t, roof_sums, sample_start, suspension_flow, Displacement, Fiber, FiberWalk,
    SuspensionPoint,
};
pub use toy::{DyadicPoint, ToyDoubling};

/// One application of the skew product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition<P> {
    /// `T̄ω`
    pub next: P,
    /// `φ(ω)`
    pub step: i64,
    /// `τ(ω)`
    pub roof: f64,
}

/// Base system `(M̄, μ̄, T̄)` with step function and roof.
pub trait ZExtension: Send + Sync {
    type Point: Copy + Send + Sync + Debug;

    fn transition(&self, p: &Self::Point) -> Result<Transition<Self::Point>>;

    /// Draws a point from the invariant probability `μ̄`.
    fn sample_base<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;

    /// Scalar coordinate in `[0, 1)` on which base observables are built.
    fn coord(&self, p: &Self::Point) -> f64;

    /// `(inf τ, sup τ)`.
    fn roof_bounds(&self) -> (f64, f64);

    /// Cell label `Ψ` of the flow point at `height` above `(p, cell)`.
    fn psi(&self, _p: &Self::Point, cell: i64, _height: f64) -> i64 {
        cell
    }

    fn name(&self) -> &str;

    /// `τ̄` when known in closed form.
    fn tau_bar_exact(&self) -> Option<f64> {
        None
    }

    /// Variance `Σ` of the limiting Brownian motion of `S_nφ / √n`, when known.
    fn sigma_exact(&self) -> Option<f64> {
        None
    }

    /// Equal-weight nodes integrating base observables of the coordinate
    /// exactly (up to spectral accuracy), when such a rule exists.
    fn base_nodes(&self, _n: usize) -> Option<Vec<Self::Point>> {
        None
    }

    fn roof(&self, p: &Self::Point) -> Result<f64> {
        Ok(self.transition(p)?.roof)
    }
}
