//! Exact samplers for Poisson, Poisson–delayed Sibuya and Hermite laws.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::family::{CompoundParams, HermiteParams};

/// Rates below this use sequential inversion; above it, the PTRS
/// transformed-rejection sampler from `rand_distr`.
const INVERSION_LIMIT: f64 = 30.0;

/// One Poisson(`rate`) draw.
pub fn sample_poisson<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> u64 {
    if rate <= 0.0 {
        return 0;
    }
    if rate >= INVERSION_LIMIT {
        let dist = Poisson::new(rate).expect("finite positive rate");
        return dist.sample(rng) as u64;
    }
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-rate).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= rate / k as f64;
        if p == 0.0 {
            break;
        }
        cdf += p;
    }
    k
}

/// `count` draws of `PoDSib(λ, θ, α)`: a Poisson(λ) count of delayed Sibuya summands.
pub fn stable_sample<R: Rng + ?Sized>(c: &CompoundParams, rng: &mut R, count: usize) -> Vec<u64> {
    let severity = c.severity();
    (0..count)
        .map(|_| {
            let n = sample_poisson(c.lambda, rng);
            (0..n).fold(0u64, |acc, _| acc.saturating_add(severity.sample(rng)))
        })
        .collect()
}

/// `count` draws of `Herm(μ, σ²)` as `U + 2V`.
pub fn hermite_sample<R: Rng + ?Sized>(h: &HermiteParams, rng: &mut R, count: usize) -> Vec<u64> {
    let single = h.mu - h.sigma2;
    let pairs = h.sigma2 / 2.0;
    (0..count)
        .map(|_| sample_poisson(single, rng) + 2 * sample_poisson(pairs, rng))
        .collect()
}
