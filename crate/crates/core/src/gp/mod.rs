//! Exact Gaussian-process regression, confidence bounds and information-gain
//! diagnostics.

mod beta;
mod kernel;
mod mig;
mod process;

pub use beta::BetaSchedule;
pub use kernel::{KernelFamily, KernelSpec};
pub use mig::{mig_curve, mig_estimate, DEFAULT_MIG_CANDIDATES};
pub use process::{GaussianProcess, Posterior};

/// Default regularizer: `1 + 2/T` when a horizon is known, otherwise the
/// observation noise variance plus jitter.
pub fn default_lambda(horizon: Option<usize>, noise_sd: f64) -> f64 {
    match horizon {
        Some(t) if t > 0 => 1.0 + 2.0 / t as f64,
        _ => noise_sd * noise_sd + 1e-6,
    }
}
