//! Parameter estimators and ensemble comparison.

mod compare;
mod estimators;
mod fields;
mod fit;
mod green_kubo;
mod ks;

pub use compare::{compare_to_limit, marginal, ComparisonReport, THRESHOLD_NOTE};
pub use estimators::{estimate_h, estimate_sigma, estimate_tau_bar, Estimate, HEstimate};
pub use fields::{drift_field, unit_amplitude, variance_field};
pub use fit::{exponent_fit, ExponentFit};
pub use green_kubo::{green_kubo, GreenKuboEstimate};
pub use ks::{kolmogorov_critical, kolmogorov_sf, ks_statistic, ks_two_sample, KsResult, KS_MIN_SAMPLES};
