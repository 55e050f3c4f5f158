//! Slow-fast systems driven by infinite-measure-preserving flows.
//!
//! The fast motion is either a Z-periodic Lorentz gas on the cylinder R x T
//! ([`geometry`]) or an abstract Z-extension suspension flow ([`dynsys`]).
//! [`slowfast`] integrates the perturbed and averaged equations,
//! [`limitproc`] samples the limiting processes driven by Brownian local time,
//! and [`stats`] estimates their parameters and compares ensembles.

pub mod cli;
pub mod dynsys;
pub mod error;
pub mod geometry;
pub mod limitproc;
pub mod path;
pub mod pipeline;
pub mod rng;
pub mod slowfast;
pub mod stats;

pub use error::{Error, Result};
