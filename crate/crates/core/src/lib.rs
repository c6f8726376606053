//! Discrete broadly stable distributions.
//!
//! The family is the Poisson–delayed Sibuya laws, identified by their
//! alternate probability generating function `ψ(t) = E(1-t)^X`:
//! `exp(-δt - γt^α)` for `α ≠ 1` and `exp(-δt - γ t log t)` for `α = 1`,
//! with `α ∈ (0, 2]`. Hermite (`α = 2`) and Poisson (`γ = 0`) laws are
//! members.
//!
//! * [`family`]: parameter types, validation, APGF, closed-form thinning,
//!   Poisson shifts, sums and moments.
//! * [`severity`]: Sibuya and delayed Sibuya summand laws.
//! * [`pmf`]: exact truncated PMFs and PMF-level operators.
//! * [`sample`]: exact samplers.
//! * [`stability`]: stability coefficients and the verifier.
//! * [`oracle`]: independent power-series and Monte Carlo references.

// `!(x >= 0.0)` is used throughout so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod family;
pub mod oracle;
pub mod pmf;
pub mod sample;
pub mod severity;
pub mod special;
pub mod stability;

pub use error::{Result, StableError};
pub use family::{CompoundParams, HermiteParams, Moment, StableParams, Violation};
pub use pmf::CountPmf;
pub use severity::DelayedSibuyaParams;
pub use stability::{Classification, StabilityReport, Verdict};
