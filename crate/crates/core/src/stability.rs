//! Stability coefficients and verification of
//! `a_n ∘ (X_1 + … + X_n) ≡ X ⊕ b_n`.
//!
//! The parameter-level check is pure `(δ, γ)` algebra. The PMF-level check
//! builds both sides as probability vectors on a window `{0, …, K}`. The
//! left shift is never deconvolved: whichever side would need `⊖` gets a
//! `⊕` on the other side instead.

use serde::Serialize;

use crate::error::{Result, StableError};
use crate::family::StableParams;
use crate::pmf::{
    convolve_window, poisson_pmf, stable_pmf, thin_window, window_distance, MAX_TRUNCATION,
};
use crate::special::{binomial_point, compensated_sum};

/// Largest copy count accepted by [`verify_pmf_level`].
pub const MAX_PMF_COPIES: u32 = 16;
/// Residual bound for the parameter-level identity.
pub const PARAM_TOL: f64 = 1e-10;
/// Default certified-TV tolerance for the PMF-level identity.
pub const PMF_TOL: f64 = 1e-8;
/// Default PMF window.
pub const DEFAULT_WINDOW: usize = 100;
/// Target for the thinning truncation error inside the window.
const THINNING_ERROR_TARGET: f64 = 1e-13;

/// `(a_n, b_n)` with `a_n = n^{-1/α}`; `b_n = δ(n^{1-1/α} - 1)` for `α ≠ 1`
/// and `b_n = -γ log n` for `α = 1`.
pub fn coefficients(p: &StableParams, n: u32) -> (f64, f64) {
    let nf = f64::from(n);
    if p.log_form {
        (1.0 / nf, -p.gamma * nf.ln())
    } else {
        let a = nf.powf(-1.0 / p.alpha);
        (a, p.delta * (nf.powf(1.0 - 1.0 / p.alpha) - 1.0))
    }
}

/// `a ∘ (X_1 + … + X_n)`, with the factor `n·a` evaluated as `n^{1-1/α}` so
/// that it is exactly 1 when `α = 1`.
fn thinned_sum(p: &StableParams, n: u32, a: f64) -> StableParams {
    let nf = f64::from(n);
    let (delta, gamma) = if p.log_form {
        (p.delta + p.gamma * a.ln(), p.gamma)
    } else {
        (
            p.delta * nf.powf(1.0 - 1.0 / p.alpha),
            p.gamma * nf * a.powf(p.alpha),
        )
    };
    StableParams { delta, gamma, ..*p }
}

/// Largest componentwise deviation of `(a_n ∘ Σ X_i) ⊖ b_n` from `X`.
pub fn verify_param_level(p: &StableParams, n: u32) -> Result<f64> {
    p.ensure_valid()?;
    let (a, b) = coefficients(p, n);
    let thinned = thinned_sum(p, n, a);
    let back = match thinned.shift(-b) {
        Ok(q) => q,
        // rounding pushed a boundary case past the constraint; the residual still measures it
        Err(StableError::LeftShiftNonexistent { .. }) => StableParams {
            delta: thinned.delta - b,
            ..thinned
        },
        Err(e) => return Err(e),
    };
    Ok((back.delta - p.delta)
        .abs()
        .max((back.gamma - p.gamma).abs())
        .max((back.alpha - p.alpha).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Which side of the identity received the compensating Poisson shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceForm {
    /// `b_n > 0`: compared `a_n ∘ Σ X_i` against `X ⊕ b_n`.
    TargetShifted,
    /// `b_n < 0`: compared `(a_n ∘ Σ X_i) ⊕ |b_n|` against `X`.
    SumShifted,
    /// `b_n = 0`: strict stability, no shift.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub n: u32,
    pub a_n: f64,
    pub b_n: f64,
    pub param_residual: f64,
    /// Certified bound on the discrepancy between the two sides over `0..=window`.
    pub tv: f64,
    pub verdict: Verdict,
    pub form_used: BalanceForm,
    pub window: usize,
    /// Truncation index of the n-fold sum before thinning.
    pub inner_truncation: usize,
    /// Certified bound on thinned mass the truncation loses inside the window.
    pub truncation_error: f64,
    /// Mass of the balanced target law beyond the window.
    pub outside_mass: f64,
    pub tolerance: f64,
}

fn binomial_cdf(k: usize, n: u64, a: f64) -> f64 {
    compensated_sum((0..=k as u64).map(|j| binomial_point(j, n, a))).min(1.0)
}

/// Smallest inner truncation whose thinning loss in the window meets the target.
fn inner_truncation(window: usize, a: f64) -> (usize, f64) {
    if a >= 1.0 {
        return (window, 0.0);
    }
    let mut k = window
        .max((window as f64 / a).ceil() as usize)
        .min(MAX_TRUNCATION);
    loop {
        let bound = binomial_cdf(window, k as u64 + 1, a);
        if bound <= THINNING_ERROR_TARGET || k >= MAX_TRUNCATION {
            return (k, bound);
        }
        k = ((k as f64 * 1.15) as usize).max(k + 1).min(MAX_TRUNCATION);
    }
}

fn shift_window(p: &[f64], b: f64, window: usize) -> Vec<f64> {
    let z = poisson_pmf(b, window).expect("shift is positive and finite");
    convolve_window(p, z.probs(), window)
}

/// Checks the stability identity for `n` copies on the window `0..=window`.
pub fn verify_pmf_level(
    p: &StableParams,
    n: u32,
    window: usize,
    tol: f64,
) -> Result<StabilityReport> {
    p.ensure_valid()?;
    if n == 0 || n > MAX_PMF_COPIES {
        return Err(StableError::CopyCount(n));
    }
    let (a, b) = coefficients(p, n);
    let param_residual = verify_param_level(p, n)?;
    let (tv, sides) = compare_sides(p, n, a, b, window)?;
    let verdict = if param_residual <= PARAM_TOL && tv <= tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(StabilityReport {
        n,
        a_n: a,
        b_n: b,
        param_residual,
        tv,
        verdict,
        form_used: sides.form_used,
        window,
        inner_truncation: sides.inner_truncation,
        truncation_error: sides.truncation_error,
        outside_mass: sides.outside_mass,
        tolerance: tol,
    })
}

struct SideSummary {
    form_used: BalanceForm,
    inner_truncation: usize,
    truncation_error: f64,
    outside_mass: f64,
}

/// Certified window distance between `a ∘ (X_1+…+X_n)` and `X ⊕ b`, balanced
/// so that both applied shifts are non-negative.
fn compare_sides(
    p: &StableParams,
    n: u32,
    a: f64,
    b: f64,
    window: usize,
) -> Result<(f64, SideSummary)> {
    let (inner, cdf_bound) = inner_truncation(window, a);

    let x = stable_pmf(p, inner)?;
    let mut sum = x.probs().to_vec();
    for _ in 1..n {
        sum = convolve_window(&sum, x.probs(), inner);
    }
    let sum_missing = (1.0 - compensated_sum(sum.iter().copied())).clamp(0.0, 1.0);
    let truncation_error = cdf_bound * (sum_missing + 1e-12).min(1.0);

    let lhs = thin_window(&sum, a, window);
    let rhs = &x.probs()[..=window];
    let (lhs, rhs, form_used) = if b > 0.0 {
        (
            lhs,
            shift_window(rhs, b, window),
            BalanceForm::TargetShifted,
        )
    } else if b < 0.0 {
        (
            shift_window(&lhs, -b, window),
            rhs.to_vec(),
            BalanceForm::SumShifted,
        )
    } else {
        (lhs, rhs.to_vec(), BalanceForm::None)
    };

    let tv = window_distance(&lhs, &rhs, window) + 0.5 * truncation_error;
    let outside_mass = (1.0 - compensated_sum(rhs.iter().copied())).max(0.0);
    Ok((
        tv,
        SideSummary {
            form_used,
            inner_truncation: inner,
            truncation_error,
            outside_mass,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    StrictlyStable,
    BroadlyStableOnly,
    Poisson,
}

/// Poisson when `γ = 0`; strictly stable when `δ = 0`, `γ > 0`, `α ≤ 1`.
pub fn classify(p: &StableParams) -> Classification {
    if p.gamma == 0.0 {
        return Classification::Poisson;
    }
    let delta_zero = p.delta.abs() <= crate::family::BOUNDARY_RTOL * p.gamma.abs().max(1.0);
    if delta_zero && p.gamma > 0.0 && p.alpha <= 1.0 {
        Classification::StrictlyStable
    } else {
        Classification::BroadlyStableOnly
    }
}
