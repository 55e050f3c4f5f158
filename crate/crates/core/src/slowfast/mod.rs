//! Perturbed and averaged slow equations driven by a suspension flow.

mod birkhoff;
mod comparison;
mod drive;
mod integrate;
mod quad;
mod spec;

pub use crate::path::{uniform_grid, PathMeta, PathSample};
pub use birkhoff::{birkhoff_integral, birkhoff_path, perturbed_birkhoff, Normalization};
pub use comparison::{discrete_comparison, f_of, DiscreteComparison, FiberIntegral};
pub use integrate::{
    error_path, gronwall_check, integrate_averaged, integrate_perturbed, max_step, GronwallReport,
};
pub use quad::gauss_legendre_fiber;
pub use spec::{
    Amplitude, Envelope, FastState, Fbar, FiberCache, PerturbationSpec, Profile, CENTERING_SAMPLES, MAX_DIM,
};
