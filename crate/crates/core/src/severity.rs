//! Sibuya and delayed Sibuya severity laws on {1, 2, 3, …}.
//!
//! `DSib(θ, α)` is the index of the first success in independent trials
//! that succeed with probabilities `θ, α/2, α/3, …`. Setting `θ = α`
//! recovers `Sib(α)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_apgf_arg, check_unit_interval, Result, StableError};
use crate::special::{ln_gamma, ln_gamma_ratio};

/// Below this index the survival function is evaluated as a direct product.
const PRODUCT_CUTOFF: u64 = 32;
/// Above this index the point mass is taken from the survival function.
const PMF_PRODUCT_LIMIT: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayedSibuyaParams {
    pub theta: f64,
    pub alpha: f64,
}

impl DelayedSibuyaParams {
    pub fn new(theta: f64, alpha: f64) -> Result<Self> {
        check_unit_interval("theta", theta)?;
        if theta < 1.0 && !(alpha > 0.0 && alpha <= 2.0) {
            return Err(StableError::Domain {
                name: "alpha",
                value: alpha,
                domain: "(0, 2]",
            });
        }
        Ok(Self { theta, alpha })
    }

    /// `Sib(α) = DSib(α, α)`, defined for `α ∈ (0, 1]`.
    pub fn sibuya(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(StableError::Domain {
                name: "alpha",
                value: alpha,
                domain: "(0, 1]",
            });
        }
        Ok(Self {
            theta: alpha,
            alpha,
        })
    }

    fn is_unit_mass(&self) -> bool {
        self.theta == 1.0
    }

    /// `P(Y = y)`.
    pub fn pmf(&self, y: u64) -> f64 {
        if y == 0 {
            return 0.0;
        }
        if self.is_unit_mass() {
            return if y == 1 { 1.0 } else { 0.0 };
        }
        if y == 1 {
            return self.theta;
        }
        let yf = y as f64;
        if self.alpha == 1.0 {
            return (1.0 - self.theta) / ((yf - 1.0) * yf);
        }
        if y > PMF_PRODUCT_LIMIT {
            return self.survival(y - 1) * self.alpha / yf;
        }
        let head: f64 = (2..y).map(|j| 1.0 - self.alpha / j as f64).product();
        (1.0 - self.theta) * head * self.alpha / yf
    }

    /// `[0, P(Y=1), …, P(Y=k_max)]` via the ratio `p(y+1)/p(y) = (y-α)/(y+1)`.
    pub fn pmf_table(&self, k_max: usize) -> Vec<f64> {
        let mut q = vec![0.0; k_max + 1];
        if k_max == 0 {
            return q;
        }
        if self.is_unit_mass() {
            q[1] = 1.0;
            return q;
        }
        q[1] = self.theta;
        if k_max >= 2 {
            q[2] = (1.0 - self.theta) * self.alpha / 2.0;
        }
        for y in 2..k_max {
            let yf = y as f64;
            q[y + 1] = q[y] * (yf - self.alpha) / (yf + 1.0);
        }
        q
    }

    /// `P(Y > y) = (1-θ) Γ(y+1-α) / (Γ(2-α) y!)` for `y ≥ 1`.
    pub fn survival(&self, y: u64) -> f64 {
        if y == 0 {
            return 1.0;
        }
        if self.is_unit_mass() {
            return 0.0;
        }
        let rest = 1.0 - self.theta;
        if y == 1 {
            return rest;
        }
        if self.alpha == 2.0 {
            return 0.0;
        }
        if self.alpha == 1.0 {
            return rest / y as f64;
        }
        if y < PRODUCT_CUTOFF {
            return rest
                * (2..=y)
                    .map(|j| 1.0 - self.alpha / j as f64)
                    .product::<f64>();
        }
        let yf = y as f64;
        rest * (ln_gamma_ratio(yf + 1.0, -self.alpha) - ln_gamma(2.0 - self.alpha)).exp()
    }

    /// `ψ_Y(t) = 1 - (1-ζ)t - ζt^α`, or `1 - t + (1-θ) t log t` when `α = 1`.
    pub fn apgf(&self, t: f64) -> Result<f64> {
        check_apgf_arg(t)?;
        if self.is_unit_mass() {
            return Ok(1.0 - t);
        }
        if self.alpha == 1.0 {
            let tlogt = if t == 0.0 { 0.0 } else { t * t.ln() };
            return Ok(1.0 - t + (1.0 - self.theta) * tlogt);
        }
        let zeta = (1.0 - self.theta) / (1.0 - self.alpha);
        Ok(1.0 - (1.0 - zeta) * t - zeta * t.powf(self.alpha))
    }

    /// One draw by inversion of the survival function.
    ///
    /// Exponential search brackets the answer, bisection finishes it, so a
    /// draw of size `y` costs `O(log y)` survival evaluations. Draws beyond
    /// `u64::MAX` saturate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.is_unit_mass() {
            return 1;
        }
        let u = 1.0 - rng.random::<f64>();
        if self.survival(1) <= u {
            return 1;
        }
        if self.alpha == 2.0 {
            return 2;
        }
        let mut lo = 1u64;
        let mut hi = 2u64;
        while self.survival(hi) > u {
            if hi == u64::MAX {
                return u64::MAX;
            }
            lo = hi;
            hi = hi.saturating_mul(2);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.survival(mid) <= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn product_survival(d: &DelayedSibuyaParams, y: u64) -> f64 {
        if y == 0 {
            return 1.0;
        }
        let mut s = 1.0 - d.theta;
        for j in 2..=y {
            s *= 1.0 - d.alpha / j as f64;
        }
        s
    }

    const GRID_THETA: [f64; 4] = [0.0, 0.3, 0.7, 1.0];
    const GRID_ALPHA: [f64; 5] = [0.3, 0.5, 1.0, 1.5, 2.0];

    #[test]
    fn sibuya_constructor() {
        assert_eq!(
            DelayedSibuyaParams::sibuya(1.0).unwrap(),
            DelayedSibuyaParams {
                theta: 1.0,
                alpha: 1.0
            }
        );
        assert_eq!(
            DelayedSibuyaParams::sibuya(0.5).unwrap(),
            DelayedSibuyaParams {
                theta: 0.5,
                alpha: 0.5
            }
        );
        assert!(DelayedSibuyaParams::sibuya(1.5).is_err());
        assert!(DelayedSibuyaParams::sibuya(0.0).is_err());
    }

    #[test]
    fn pmf_examples() {
        let d = DelayedSibuyaParams::new(0.35, 2.0).unwrap();
        assert_eq!(d.pmf(1), 0.35);
        assert!((d.pmf(2) - 0.65).abs() < 1e-15);
        assert_eq!(d.pmf(3), 0.0);
        let d = DelayedSibuyaParams::new(0.5, 1.0).unwrap();
        assert!((d.pmf(3) - 0.5 / 6.0).abs() < 1e-15);
        let s = DelayedSibuyaParams::sibuya(0.5).unwrap();
        assert!((s.pmf(2) - 0.125).abs() < 1e-15);
        // large index takes the survival route
        let d = DelayedSibuyaParams::new(0.2, 0.7).unwrap();
        let direct: f64 =
            (1.0 - 0.2) * (2..5000).map(|j| 1.0 - 0.7 / j as f64).product::<f64>() * 0.7 / 5000.0;
        assert!((d.pmf(5000) - direct).abs() < 1e-13 * direct);
    }

    #[test]
    fn survival_examples() {
        for alpha in GRID_ALPHA {
            let d = DelayedSibuyaParams::new(0.3, alpha).unwrap();
            assert_eq!(d.survival(1), 0.7);
        }
        let d = DelayedSibuyaParams::new(0.3, 1.0).unwrap();
        for y in 1..200 {
            assert!((d.survival(y) - 0.7 / y as f64).abs() < 1e-15);
        }
        assert_eq!(DelayedSibuyaParams::new(0.3, 2.0).unwrap().survival(2), 0.0);
    }

    #[test]
    fn survival_matches_product_oracle() {
        for theta in GRID_THETA {
            for alpha in GRID_ALPHA {
                let d = DelayedSibuyaParams::new(theta, alpha).unwrap();
                for y in 0..=1000 {
                    let a = d.survival(y);
                    let b = product_survival(&d, y);
                    assert!(
                        (a - b).abs() <= 1e-13 * b + 1e-300,
                        "{theta} {alpha} {y}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn pmf_survival_consistency_on_grid() {
        for theta in GRID_THETA {
            for alpha in GRID_ALPHA {
                let d = DelayedSibuyaParams::new(theta, alpha).unwrap();
                let table = d.pmf_table(10_000);
                let mut prev = 1.0;
                for (y, &q) in table.iter().enumerate().skip(1) {
                    assert!(q >= 0.0);
                    let s = d.survival(y as u64);
                    assert!(s <= prev);
                    assert!((prev - s - q).abs() <= 1e-12, "{theta} {alpha} {y}");
                    prev = s;
                }
            }
        }
    }

    #[test]
    fn partial_sums_approach_one() {
        for theta in GRID_THETA {
            for alpha in GRID_ALPHA {
                let d = DelayedSibuyaParams::new(theta, alpha).unwrap();
                let table = d.pmf_table(5_000);
                let mut acc = 0.0;
                for (k, &q) in table.iter().enumerate().skip(1) {
                    let next = acc + q;
                    assert!(next >= acc);
                    acc = next;
                    if k % 97 == 0 {
                        assert!((acc - (1.0 - d.survival(k as u64))).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn pmf_table_matches_pointwise() {
        let d = DelayedSibuyaParams::new(0.4, 1.5).unwrap();
        let t = d.pmf_table(300);
        for y in 0..=300u64 {
            assert!((t[y as usize] - d.pmf(y)).abs() < 1e-15);
        }
    }

    #[test]
    fn apgf_examples() {
        for alpha in [0.2, 0.5, 0.9, 1.0] {
            let s = DelayedSibuyaParams::sibuya(alpha).unwrap();
            for t in [0.0, 0.3, 1.0, 1.7, 2.0] {
                assert!((s.apgf(t).unwrap() - (1.0 - f64::powf(t, alpha))).abs() < 1e-14);
            }
        }
        for theta in GRID_THETA {
            for alpha in GRID_ALPHA {
                let d = DelayedSibuyaParams::new(theta, alpha).unwrap();
                assert!(d.apgf(1.0).unwrap().abs() < 1e-15);
                assert_eq!(d.apgf(0.0).unwrap(), 1.0);
            }
        }
        let d = DelayedSibuyaParams::new(0.25, 1.0).unwrap();
        let expect = -1.0 + 0.75 * 2.0 * 2f64.ln();
        assert!((d.apgf(2.0).unwrap() - expect).abs() < 1e-15);
        assert!(d.apgf(2.5).is_err());
    }

    #[test]
    fn apgf_is_bracketed_by_series() {
        for theta in [0.0, 0.3, 0.7] {
            for alpha in GRID_ALPHA {
                let d = DelayedSibuyaParams::new(theta, alpha).unwrap();
                let k = 2000;
                let table = d.pmf_table(k);
                for t in [0.05_f64, 0.3, 0.8, 1.0] {
                    let partial: f64 = table
                        .iter()
                        .enumerate()
                        .map(|(y, q)| q * (1.0 - t).powi(y as i32))
                        .sum();
                    let bound = d.survival(k as u64) * (1.0 - t).powi(k as i32 + 1);
                    let exact = d.apgf(t).unwrap();
                    assert!(partial - 1e-12 <= exact && exact <= partial + bound + 1e-12);
                }
            }
        }
    }

    #[test]
    fn sampler_degenerate_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let one = DelayedSibuyaParams::sibuya(1.0).unwrap();
        assert!((0..1000).all(|_| one.sample(&mut rng) == 1));
        let two = DelayedSibuyaParams::new(0.3, 2.0).unwrap();
        assert!((0..1000).all(|_| matches!(two.sample(&mut rng), 1 | 2)));
    }

    #[test]
    fn sampler_frequencies() {
        let n = 1_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = DelayedSibuyaParams::new(0.3, 2.0).unwrap();
        let ones = (0..n).filter(|_| d.sample(&mut rng) == 1).count() as f64;
        let sd = (n as f64 * 0.3 * 0.7).sqrt();
        assert!((ones - 0.3 * n as f64).abs() < 4.0 * sd);

        let d = DelayedSibuyaParams::new(0.5, 0.5).unwrap();
        let twos = (0..n).filter(|_| d.sample(&mut rng) == 2).count() as f64;
        let sd = (n as f64 * 0.125 * 0.875).sqrt();
        assert!((twos - 0.125 * n as f64).abs() < 4.0 * sd);
    }
}
