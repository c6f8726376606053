//! The discrete stable parameter family and its closed-form operator algebra.
//!
//! A law is identified by its alternate probability generating function
//! `ψ(t) = E(1-t)^X`, which for this family is
//!
//! * `exp(-δt - γt^α)` for `α ∈ (0,1) ∪ (1,2]`,
//! * `exp(-δt - γ t log t)` for `α = 1`.
//!
//! Thinning, Poisson shifting and summing independent copies all act on
//! `(δ, γ)` in closed form, so most of the algebra here is exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_apgf_arg, check_unit_interval, Result, StableError};

/// Relative slack on boundary inequalities such as `δ ≥ -αγ`.
pub const BOUNDARY_RTOL: f64 = 1e-12;

/// `(α, δ, γ)` parametrization of a discrete stable law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub delta: f64,
    pub gamma: f64,
    /// True exactly when `alpha == 1`; the APGF then carries a `t log t` term.
    pub log_form: bool,
}

/// A failed constraint reported by [`StableParams::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite,
    AlphaOutOfRange {
        alpha: f64,
    },
    LogFormMismatch {
        alpha: f64,
        log_form: bool,
    },
    GammaSign {
        alpha: f64,
        gamma: f64,
        must_be: &'static str,
    },
    DeltaBelowBound {
        delta: f64,
        bound: f64,
    },
    NegativeRate {
        rate: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite => write!(f, "parameters must be finite"),
            Violation::AlphaOutOfRange { alpha } => {
                write!(f, "alpha must lie in (0, 2], got {alpha}")
            }
            Violation::LogFormMismatch { alpha, log_form } => {
                write!(
                    f,
                    "log_form = {log_form} is inconsistent with alpha = {alpha}"
                )
            }
            Violation::GammaSign {
                alpha,
                gamma,
                must_be,
            } => {
                write!(
                    f,
                    "gamma must be {must_be} for alpha = {alpha}, got {gamma}"
                )
            }
            Violation::DeltaBelowBound { delta, bound } => {
                write!(f, "delta must be >= {bound}, got {delta}")
            }
            Violation::NegativeRate { rate } => {
                write!(f, "compound rate lambda must be >= 0, got {rate}")
            }
        }
    }
}

fn slack(values: &[f64]) -> f64 {
    BOUNDARY_RTOL * values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

impl StableParams {
    /// Builds the triple without validating it; `log_form` follows `alpha`.
    pub fn new(alpha: f64, delta: f64, gamma: f64) -> Self {
        Self {
            alpha,
            delta,
            gamma,
            log_form: alpha == 1.0,
        }
    }

    /// Builds the triple and rejects it if any constraint fails.
    pub fn checked(alpha: f64, delta: f64, gamma: f64) -> Result<Self> {
        let p = Self::new(alpha, delta, gamma);
        p.ensure_valid()?;
        Ok(p)
    }

    /// Poisson law with the given mean.
    pub fn poisson(mean: f64) -> Self {
        Self::new(1.0, mean, 0.0)
    }

    /// Every violated constraint; empty when the triple is a valid law.
    pub fn validate(&self) -> Vec<Violation> {
        let Self {
            alpha,
            delta,
            gamma,
            log_form,
        } = *self;
        if !(alpha.is_finite() && delta.is_finite() && gamma.is_finite()) {
            return vec![Violation::NonFinite];
        }
        let mut out = Vec::new();
        if !(alpha > 0.0 && alpha <= 2.0) {
            out.push(Violation::AlphaOutOfRange { alpha });
        }
        if log_form != (alpha == 1.0) {
            out.push(Violation::LogFormMismatch { alpha, log_form });
        }
        if alpha == 1.0 {
            let tol = slack(&[delta, gamma]);
            if gamma > 0.0 {
                out.push(Violation::GammaSign {
                    alpha,
                    gamma,
                    must_be: "<= 0",
                });
            }
            if delta + gamma < -tol {
                out.push(Violation::DeltaBelowBound {
                    delta,
                    bound: -gamma,
                });
            }
            if delta < -tol {
                out.push(Violation::NegativeRate { rate: delta });
            }
        } else {
            let tol = slack(&[delta, alpha * gamma]);
            if alpha < 1.0 && gamma < 0.0 {
                out.push(Violation::GammaSign {
                    alpha,
                    gamma,
                    must_be: ">= 0",
                });
            }
            if alpha > 1.0 && gamma > 0.0 {
                out.push(Violation::GammaSign {
                    alpha,
                    gamma,
                    must_be: "<= 0",
                });
            }
            if delta + alpha * gamma < -tol {
                out.push(Violation::DeltaBelowBound {
                    delta,
                    bound: -alpha * gamma,
                });
            }
            if delta + gamma < -slack(&[delta, gamma]) {
                out.push(Violation::NegativeRate {
                    rate: delta + gamma,
                });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(StableError::InvalidParams(
                v.iter().map(ToString::to_string).collect(),
            ))
        }
    }

    /// Factorial cumulant generating function `C(t) = log ψ(t)`.
    pub fn fcgf(&self, t: f64) -> Result<f64> {
        check_apgf_arg(t)?;
        let tail = if self.log_form {
            if t == 0.0 {
                0.0
            } else {
                t * t.ln()
            }
        } else {
            t.powf(self.alpha)
        };
        Ok(-self.delta * t - self.gamma * tail)
    }

    /// Alternate probability generating function `ψ(t) = E(1-t)^X`.
    pub fn apgf(&self, t: f64) -> Result<f64> {
        self.fcgf(t).map(f64::exp)
    }

    /// `a ∘ X`: binomial thinning with retention probability `a`.
    pub fn thin(&self, a: f64) -> Result<Self> {
        check_unit_interval("a", a)?;
        if a == 0.0 {
            return Ok(Self {
                delta: 0.0,
                gamma: 0.0,
                ..*self
            });
        }
        let (delta, gamma) = if self.log_form {
            (a * (self.delta + self.gamma * a.ln()), a * self.gamma)
        } else {
            (a * self.delta, a.powf(self.alpha) * self.gamma)
        };
        Ok(Self {
            delta,
            gamma,
            ..*self
        })
    }

    /// `X ⊕ b` for `b ≥ 0`, or the left shift `X ⊖ |b|` for `b < 0`.
    pub fn shift(&self, b: f64) -> Result<Self> {
        let shifted = Self {
            delta: self.delta + b,
            ..*self
        };
        if b < 0.0 && !shifted.is_valid() {
            return Err(StableError::LeftShiftNonexistent {
                shift: b,
                delta: shifted.delta,
            });
        }
        Ok(shifted)
    }

    /// Law of `X_1 + … + X_n` for independent copies.
    pub fn iid_sum(&self, n: u32) -> Self {
        let n = f64::from(n);
        Self {
            delta: n * self.delta,
            gamma: n * self.gamma,
            ..*self
        }
    }

    pub fn mean(&self) -> Moment {
        if self.gamma == 0.0 || self.alpha > 1.0 {
            Moment::Finite(self.delta)
        } else {
            Moment::Infinite
        }
    }

    /// Dispersion `Var X − E X`; finite only for Hermite (α = 2) and Poisson laws.
    pub fn dispersion(&self) -> Moment {
        if self.gamma == 0.0 {
            Moment::Finite(0.0)
        } else if self.alpha == 2.0 {
            Moment::Finite(-2.0 * self.gamma)
        } else {
            Moment::Infinite
        }
    }

    /// Compound rate `λ`; zero for the point mass at 0.
    pub fn rate(&self) -> f64 {
        if self.log_form {
            self.delta
        } else {
            self.delta + self.gamma
        }
    }

    /// Compound Poisson–delayed Sibuya parameters of the same law.
    pub fn to_compound(&self) -> Result<CompoundParams> {
        let lambda = self.rate();
        if lambda <= slack(&[self.delta, self.gamma]) {
            return Err(StableError::Degenerate);
        }
        let theta = if self.log_form {
            1.0 + self.gamma / self.delta
        } else {
            (self.delta + self.alpha * self.gamma) / lambda
        };
        CompoundParams::new(lambda, theta.clamp(0.0, 1.0), self.alpha)
    }
}

/// Extended-real moment value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn value(self) -> f64 {
        match self {
            Moment::Finite(v) => v,
            Moment::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Moment::Finite(_))
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Moment::Finite(v) => write!(f, "{v}"),
            Moment::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Moment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Moment::Finite(v) => s.serialize_f64(*v),
            Moment::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `PoDSib(λ, θ, α)`: a Poisson(λ) number of IID delayed Sibuya summands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompoundParams {
    pub lambda: f64,
    pub theta: f64,
    pub alpha: f64,
    /// `(1-θ)/(1-α)` for `α ≠ 1`.
    pub zeta: Option<f64>,
}

impl CompoundParams {
    pub fn new(lambda: f64, theta: f64, alpha: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(StableError::Domain {
                name: "lambda",
                value: lambda,
                domain: "[0, inf)",
            });
        }
        check_unit_interval("theta", theta)?;
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(StableError::Domain {
                name: "alpha",
                value: alpha,
                domain: "(0, 2]",
            });
        }
        let zeta = (alpha != 1.0).then(|| (1.0 - theta) / (1.0 - alpha));
        Ok(Self {
            lambda,
            theta,
            alpha,
            zeta,
        })
    }

    pub fn severity(&self) -> crate::severity::DelayedSibuyaParams {
        crate::severity::DelayedSibuyaParams {
            theta: self.theta,
            alpha: self.alpha,
        }
    }

    pub fn to_stable(&self) -> StableParams {
        let Self {
            lambda,
            theta,
            alpha,
            ..
        } = *self;
        if theta == 1.0 {
            return StableParams::new(alpha, lambda, 0.0);
        }
        if alpha == 1.0 {
            return StableParams::new(1.0, lambda, -lambda * (1.0 - theta));
        }
        StableParams::new(
            alpha,
            lambda * (theta - alpha) / (1.0 - alpha),
            lambda * (1.0 - theta) / (1.0 - alpha),
        )
    }
}

/// `Herm(μ, σ²)`: `U + 2V` with `U ~ Po(μ − σ²)`, `V ~ Po(σ²/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteParams {
    pub mu: f64,
    pub sigma2: f64,
}

impl HermiteParams {
    pub fn new(mu: f64, sigma2: f64) -> Result<Self> {
        if !(sigma2 >= 0.0 && mu >= sigma2 && mu.is_finite()) {
            return Err(StableError::InvalidParams(vec![format!(
                "Hermite parameters need mu >= sigma2 >= 0, got mu = {mu}, sigma2 = {sigma2}"
            )]));
        }
        Ok(Self { mu, sigma2 })
    }

    pub fn to_stable(&self) -> StableParams {
        StableParams::new(2.0, self.mu, -self.sigma2 / 2.0)
    }
}
