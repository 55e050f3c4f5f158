//! Limit objects: Brownian motion, its local time at 0, time-changed
//! integrals and the linear limit equations.

mod bm;
mod integrals;
mod law;
mod local_time;
mod voc;

pub use bm::{simulate_bm, simulate_bm_with, LazyBrownian};
pub use integrals::{drift_integral, sqrt_along, sqrt_psd, time_changed_integral, time_changed_integral_with_roots};
pub use law::{
    restrict, sample_limit_law, LimitKind, LimitLawParams, LimitPathBundle, LimitSampler, MatrixFn, VectorFn,
};
pub use local_time::{default_bandwidth, local_time_at_zero, rescale_pair};
pub use voc::{euler_residual, variation_of_constants, VariationOfConstants};
