//! Numerical laboratory for a discrete-time career-concerns equilibrium with
//! normally distributed ability and output noise.
//!
//! The market learns about the manager's ability from de-biased output and
//! pays expected output as the wage; the manager's only reason to work is
//! the effect of effort on future beliefs. This crate computes that effect
//! exactly: belief dynamics and steady states ([`belief`]), the per-period
//! marginal benefit of effort as an infinite series with certified
//! truncation and the implied equilibrium effort ([`equilibrium`]), the
//! transient comparative statics behind its monotonicity ([`statics`]), two
//! historically published erroneous variants of the first-order condition
//! kept as executable contrasts, and a deterministic Monte-Carlo rig that
//! verifies the equilibrium conditions end to end ([`sim`], [`verify`]).

pub mod belief;
pub mod equilibrium;
pub mod error;
pub mod export;
pub mod model;
pub mod sim;
pub mod statics;
pub mod verify;

pub use error::{Error, Result};
pub use model::{validate_params, CostSpec, HDelta, ModelParams, ValidatedModel};

/// Runs `f` on a dedicated rayon pool of `workers` threads, or on the global
/// pool when `None`. Results never depend on the worker count; this only
/// bounds parallelism.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}
