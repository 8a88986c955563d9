//! Symmetric Cournot equilibrium analysis under stochastic linear demand.
//!
//! The crate evaluates reliability-theoretic transforms of a demand-intercept
//! distribution (hazard rate, generalized failure rate, mean residual demand),
//! classifies their monotonicity on a quantile grid, enumerates symmetric
//! equilibrium candidates of the associated first-order condition, and emits
//! machine-checkable uniqueness certificates with independent numerical
//! cross-checks.

pub mod analysis;
pub mod dist;
pub mod equilibrium;
mod error;
pub mod quad;
pub mod reliability;
pub mod verify;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
