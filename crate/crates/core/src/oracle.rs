//! Independent reference engines.
//!
//! `series_pmf` expands the closed-form APGF as a truncated power series in
//! `s = 1 - t`, so the PMF appears as Taylor coefficients without going
//! through the severity law. The Monte Carlo helpers check samplers.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Result, StableError};
use crate::family::StableParams;
use crate::pmf::{falling_factorial, CountPmf};
use crate::special::compensated_sum;

/// Coefficients beyond this magnitude are treated as a blow-up.
const COEFF_LIMIT: f64 = 1e300;
/// Most negative PMF coefficient still attributed to rounding.
pub const NEGATIVE_FLOOR: f64 = -1e-10;
/// Minimum sample count accepted by [`mc_chisquare`].
pub const MIN_CHISQ_SAMPLES: usize = 10_000;

/// Truncated power series `Σ c[k] s^k`, `k = 0..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least c[0]");
        Self { coeffs }
    }

    pub fn zeros(order: usize) -> Self {
        Self::new(vec![0.0; order + 1])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|x| c * x).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order());
        Self::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order());
        let k = self.order();
        let mut out = vec![0.0; k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs[..=k - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `exp` via `b' = a' b`: `b[k] = (1/k) Σ_{j=1}^{k} j a[j] b[k-j]`.
    pub fn exp(&self) -> Result<Self> {
        let a = &self.coeffs;
        let mut b = vec![0.0; a.len()];
        b[0] = a[0].exp();
        for k in 1..a.len() {
            let acc: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b[k] = acc / k as f64;
            if !b[k].is_finite() || b[k].abs() > COEFF_LIMIT {
                return Err(StableError::SeriesOverflow { index: k });
            }
        }
        Ok(Self::new(b))
    }

    /// `log` via `a' = b'/b`; needs `c[0] > 0`.
    pub fn ln(&self) -> Result<Self> {
        let b = &self.coeffs;
        if !(b[0] > 0.0) {
            return Err(StableError::Domain {
                name: "c[0]",
                value: b[0],
                domain: "(0, inf)",
            });
        }
        let mut a = vec![0.0; b.len()];
        a[0] = b[0].ln();
        for k in 1..b.len() {
            let inner: f64 = (1..k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            a[k] = (k as f64 * b[k] - inner) / (k as f64 * b[0]);
        }
        Ok(Self::new(a))
    }
}

/// Coefficients of `(1+u)^α`: `c[k] = binom(α, k)` by the incremental product.
pub fn binomial_series(alpha: f64, order: usize) -> PowerSeries {
    let mut c = vec![0.0; order + 1];
    c[0] = 1.0;
    for k in 1..=order {
        c[k] = c[k - 1] * (alpha - (k - 1) as f64) / k as f64;
    }
    PowerSeries::new(c)
}

/// `log(1-s) = -Σ_{k≥1} s^k / k`.
fn log_one_minus(order: usize) -> PowerSeries {
    let mut c = vec![0.0; order + 1];
    for (k, v) in c.iter_mut().enumerate().skip(1) {
        *v = -1.0 / k as f64;
    }
    PowerSeries::new(c)
}

fn one_minus_s(order: usize) -> PowerSeries {
    let mut c = vec![0.0; order + 1];
    c[0] = 1.0;
    if order >= 1 {
        c[1] = -1.0;
    }
    PowerSeries::new(c)
}

/// `t log t` at `t = 1 - s`, built as `(1-s) · log(1-s)`.
pub fn t_log_t_series(order: usize) -> PowerSeries {
    one_minus_s(order).mul(&log_one_minus(order))
}

/// `t^α` at `t = 1 - s`: the binomial series with `u = -s`.
pub fn t_pow_series(alpha: f64, order: usize) -> PowerSeries {
    let mut s = binomial_series(alpha, order);
    for (k, c) in s.coeffs.iter_mut().enumerate() {
        if k % 2 == 1 {
            *c = -*c;
        }
    }
    s
}

/// PMF on `0..=k_max` as the Taylor coefficients of `ψ(1-s)` in `s`.
pub fn series_pmf(p: &StableParams, k_max: usize) -> Result<CountPmf> {
    p.ensure_valid()?;
    let nonlinear = if p.log_form {
        t_log_t_series(k_max)
    } else {
        t_pow_series(p.alpha, k_max)
    };
    let exponent = one_minus_s(k_max)
        .scale(-p.delta)
        .add(&nonlinear.scale(-p.gamma));
    let series = exponent.exp()?;
    let mut probs = series.coeffs;
    for (index, v) in probs.iter_mut().enumerate() {
        if *v < NEGATIVE_FLOOR {
            return Err(StableError::NegativeCoefficient { index, value: *v });
        }
        *v = v.max(0.0);
    }
    let tail = (1.0 - compensated_sum(probs.iter().copied())).max(0.0);
    CountPmf::new(probs, tail)
}

/// Outcome of a pooled chi-square goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
}

/// Pearson chi-square of `samples` against `reference`.
///
/// Adjacent cells are pooled until each expects at least five draws; the
/// region beyond the reference's range forms one cell whose probability is
/// the reference's missing mass.
pub fn mc_chisquare(samples: &[u64], reference: &CountPmf) -> Result<ChiSquareResult> {
    if samples.len() < MIN_CHISQ_SAMPLES {
        return Err(StableError::InsufficientData {
            required: MIN_CHISQ_SAMPLES,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let k_max = reference.max_k();
    let mut counts = vec![0u64; k_max + 1];
    let mut beyond = 0u64;
    for &x in samples {
        match counts.get_mut(x as usize) {
            Some(c) if x <= k_max as u64 => *c += 1,
            _ => beyond += 1,
        }
    }

    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (k, &c) in counts.iter().enumerate() {
        obs += c as f64;
        exp += n * reference.get(k);
        if exp >= 5.0 {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    obs += beyond as f64;
    exp += n * (1.0 - reference.mass()).max(0.0);
    if obs > 0.0 || exp > 0.0 {
        match cells.last_mut() {
            Some(last) if exp < 5.0 => {
                last.0 += obs;
                last.1 += exp;
            }
            _ => cells.push((obs, exp)),
        }
    }

    let statistic: f64 = cells
        .iter()
        .filter(|(o, e)| *o > 0.0 || *e > 0.0)
        .map(|(o, e)| (o - e).powi(2) / e)
        .sum();
    let dof = cells.len().saturating_sub(1);
    let p_value = if dof == 0 {
        if statistic == 0.0 {
            1.0
        } else {
            0.0
        }
    } else if statistic.is_infinite() {
        0.0
    } else {
        ChiSquared::new(dof as f64)
            .expect("positive degrees of freedom")
            .sf(statistic)
    };
    Ok(ChiSquareResult {
        statistic,
        p_value,
        dof,
    })
}

/// Sample average of `x(x-1)…(x-k+1)`.
pub fn empirical_factorial_moment(samples: &[u64], k: u32) -> f64 {
    factorial_moment_estimate(samples, k).0
}

/// Sample factorial moment and its standard error.
pub fn factorial_moment_estimate(samples: &[u64], k: u32) -> (f64, f64) {
    let n = samples.len() as f64;
    let values: Vec<f64> = samples
        .iter()
        .map(|&x| falling_factorial(x as f64, k))
        .collect();
    let mean = compensated_sum(values.iter().copied()) / n;
    let var = compensated_sum(values.iter().map(|v| (v - mean).powi(2))) / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}
