//! Truncated probability mass vectors and the PMF-level operators.
//!
//! A [`CountPmf`] stores `p[0..=K]` plus a certified upper bound on the
//! mass beyond `K`. Every operator propagates that bound, so two laws can
//! be compared with a certified total variation distance.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Result, StableError};
use crate::family::{CompoundParams, HermiteParams, StableParams};
use crate::special::{binomial_row, compensated_sum, poisson_point, CompensatedSum};

/// Tail target for the default truncation policy.
pub const DEFAULT_TAIL_TARGET: f64 = 1e-12;
/// Hard cap on the truncation index.
pub const MAX_TRUNCATION: usize = 100_000;
/// Poisson tail allowed when realizing a shift as a convolution.
const SHIFT_TAIL: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPmf")]
pub struct CountPmf {
    probs: Vec<f64>,
    tail_bound: f64,
}

#[derive(Deserialize)]
struct RawPmf {
    probs: Vec<f64>,
    tail_bound: f64,
}

impl TryFrom<RawPmf> for CountPmf {
    type Error = StableError;

    fn try_from(raw: RawPmf) -> Result<Self> {
        CountPmf::new(raw.probs, raw.tail_bound)
    }
}

impl CountPmf {
    /// Checks non-negativity, total mass and the tail bound before building.
    pub fn new(probs: Vec<f64>, tail_bound: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if probs.is_empty() {
            problems.push("probs must hold at least p[0]".to_string());
        }
        if let Some(k) = probs.iter().position(|p| !(*p >= 0.0)) {
            problems.push(format!("p[{k}] = {} is negative or NaN", probs[k]));
        }
        if !(tail_bound >= 0.0) {
            problems.push(format!("tail_bound = {tail_bound} must be >= 0"));
        }
        let mass = compensated_sum(probs.iter().copied());
        if mass > 1.0 + 1e-12 {
            problems.push(format!("total mass {mass} exceeds 1"));
        }
        if 1.0 - mass > tail_bound + 1e-12 {
            problems.push(format!(
                "missing mass {} exceeds tail_bound {tail_bound}",
                1.0 - mass
            ));
        }
        if problems.is_empty() {
            Ok(Self { probs, tail_bound })
        } else {
            Err(StableError::InvalidParams(problems))
        }
    }

    fn from_parts(probs: Vec<f64>, tail_bound: f64) -> Self {
        Self {
            probs,
            tail_bound: tail_bound.max(0.0),
        }
    }

    /// Point mass at `k`.
    pub fn point_mass(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        Self {
            probs,
            tail_bound: 0.0,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn max_k(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn get(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn mass(&self) -> f64 {
        compensated_sum(self.probs.iter().copied())
    }

    /// `E X^(k)` over the stored range (exact when the tail is empty).
    pub fn factorial_moment(&self, k: u32) -> f64 {
        compensated_sum(
            self.probs
                .iter()
                .enumerate()
                .map(|(x, p)| p * falling_factorial(x as f64, k)),
        )
    }

    pub fn mean(&self) -> f64 {
        self.factorial_moment(1)
    }

    /// `E X(X-1) − (E X)²`.
    pub fn dispersion(&self) -> f64 {
        let m = self.mean();
        self.factorial_moment(2) - m * m
    }

    /// `Σ p[k] (1-t)^k` over the stored range; within `tail_bound` of the
    /// true APGF for `t ∈ [0, 1]`.
    pub fn apgf(&self, t: f64) -> f64 {
        let base = 1.0 - t;
        let mut acc = CompensatedSum::new();
        let mut w = 1.0;
        for p in &self.probs {
            acc.add(p * w);
            w *= base;
        }
        acc.value()
    }

    /// `k,p` rows followed by a `tail,<bound>` line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,p\n");
        for (k, p) in self.probs.iter().enumerate() {
            out.push_str(&format!("{k},{}\n", format_value(*p)));
        }
        out.push_str(&format!("tail,{}\n", format_value(self.tail_bound)));
        out
    }

    /// Copy restricted to `0..=k_max`, moving the dropped mass into the tail.
    pub fn truncate(&self, k_max: usize) -> Self {
        if k_max >= self.max_k() {
            return self.clone();
        }
        let dropped = compensated_sum(self.probs[k_max + 1..].iter().copied());
        Self::from_parts(self.probs[..=k_max].to_vec(), self.tail_bound + dropped)
    }
}

pub(crate) fn falling_factorial(x: f64, k: u32) -> f64 {
    (0..k).map(|j| x - f64::from(j)).product()
}

/// Plain decimal for moderate magnitudes, scientific notation otherwise.
pub fn format_value(v: f64) -> String {
    if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Poisson(`rate`) on `0..=k_max`.
pub fn poisson_pmf(rate: f64, k_max: usize) -> Result<CountPmf> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(StableError::Domain {
            name: "rate",
            value: rate,
            domain: "[0, inf)",
        });
    }
    let mut probs = vec![0.0; k_max + 1];
    if rate == 0.0 {
        probs[0] = 1.0;
        return Ok(CountPmf::from_parts(probs, 0.0));
    }
    let mode = (rate.floor() as usize).min(k_max);
    probs[mode] = poisson_point(mode as u64, rate);
    let mut f = probs[mode];
    for k in mode..k_max {
        f *= rate / (k + 1) as f64;
        if f < f64::MIN_POSITIVE {
            break;
        }
        probs[k + 1] = f;
    }
    let mut f = probs[mode];
    for k in (1..=mode).rev() {
        f *= k as f64 / rate;
        if f < f64::MIN_POSITIVE {
            break;
        }
        probs[k - 1] = f;
    }
    let kf = k_max as f64;
    let tail = if kf + 1.0 > rate {
        probs[k_max] * rate / (kf + 1.0 - rate)
    } else {
        1.0 - compensated_sum(probs.iter().copied())
    };
    Ok(CountPmf::from_parts(probs, tail))
}

/// Smallest `K` whose Poisson(`rate`) tail bound is below `target`.
fn poisson_cutoff(rate: f64, target: f64) -> usize {
    let mut k = (rate + 10.0 * rate.sqrt()).ceil() as usize + 10;
    loop {
        let kf = k as f64;
        let bound = poisson_point(k as u64, rate) * rate / (kf + 1.0 - rate);
        if bound < target {
            return k;
        }
        k += k / 4 + 1;
    }
}

/// Compound Poisson–delayed Sibuya PMF on `0..=k_max` by the recursion
/// `p(n) = (λ/n) Σ_{y=1}^{n} y q(y) p(n-y)`, `p(0) = e^{-λ}`.
pub fn panjer_pmf(c: &CompoundParams, k_max: usize) -> CountPmf {
    panjer_run(c, k_max, None)
}

/// [`panjer_pmf`] with `K` chosen as the smallest index giving a tail below
/// [`DEFAULT_TAIL_TARGET`], capped at [`MAX_TRUNCATION`].
pub fn panjer_pmf_auto(c: &CompoundParams) -> CountPmf {
    panjer_run(c, MAX_TRUNCATION, Some(DEFAULT_TAIL_TARGET))
}

fn panjer_run(c: &CompoundParams, k_max: usize, stop_tail: Option<f64>) -> CountPmf {
    let lambda = c.lambda;
    if lambda == 0.0 {
        return CountPmf::point_mass(0).padded(if stop_tail.is_some() { 0 } else { k_max });
    }
    let q = c.severity().pmf_table(k_max);
    let support = q.iter().rposition(|&v| v > 0.0).unwrap_or(0);
    let w: Vec<f64> = q
        .iter()
        .enumerate()
        .map(|(y, &qy)| lambda * y as f64 * qy)
        .collect();
    let mut p = Vec::with_capacity(if stop_tail.is_some() { 1024 } else { k_max + 1 });
    p.push((-lambda).exp());
    let mut mass = CompensatedSum::new();
    mass.add(p[0]);
    for n in 1..=k_max {
        let m = n.min(support);
        let acc: f64 = w[1..=m]
            .iter()
            .zip(p[n - m..n].iter().rev())
            .map(|(a, b)| a * b)
            .sum();
        let pn = acc / n as f64;
        p.push(pn);
        mass.add(pn);
        if let Some(target) = stop_tail {
            if 1.0 - mass.value() < target {
                break;
            }
        }
    }
    CountPmf::from_parts(p, 1.0 - mass.value())
}

impl CountPmf {
    fn padded(mut self, k_max: usize) -> Self {
        if self.probs.len() <= k_max {
            self.probs.resize(k_max + 1, 0.0);
        }
        self
    }
}

/// Exact truncated PMF of a stable law, including the point mass at 0.
pub fn stable_pmf(p: &StableParams, k_max: usize) -> Result<CountPmf> {
    p.ensure_valid()?;
    match p.to_compound() {
        Ok(c) => Ok(panjer_pmf(&c, k_max)),
        Err(StableError::Degenerate) => Ok(CountPmf::point_mass(0).padded(k_max)),
        Err(e) => Err(e),
    }
}

/// Hermite PMF built directly as the law of `U + 2V`.
pub fn hermite_pmf(h: &HermiteParams, k_max: usize) -> CountPmf {
    let u = poisson_pmf(h.mu - h.sigma2, k_max).expect("mu >= sigma2");
    let v = poisson_pmf(h.sigma2 / 2.0, k_max / 2).expect("sigma2 >= 0");
    let mut doubled = vec![0.0; 2 * v.max_k() + 1];
    for (k, p) in v.probs.iter().enumerate() {
        doubled[2 * k] = *p;
    }
    let doubled = CountPmf::from_parts(doubled, v.tail_bound);
    convolve_capped(&u, &doubled, k_max)
}

/// `a ∘ X` over the full stored range.
pub fn thin_pmf(x: &CountPmf, a: f64) -> Result<CountPmf> {
    check_unit_interval("a", a)?;
    Ok(CountPmf::from_parts(
        thin_window(x.probs(), a, x.max_k()),
        x.tail_bound,
    ))
}

/// `Σ_{x ≥ k} p[x] C(x,k) a^k (1-a)^{x-k}` for `k = 0..=k_max`, using only the stored `p`.
pub(crate) fn thin_window(p: &[f64], a: f64, k_max: usize) -> Vec<f64> {
    let mut out = vec![CompensatedSum::new(); k_max + 1];
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        let row = binomial_row(x as u64, a, k_max as u64);
        for (k, w) in row.iter().enumerate() {
            if *w != 0.0 {
                out[k].add(px * w);
            }
        }
    }
    out.iter().map(CompensatedSum::value).collect()
}

/// `X + Y` for independent `X`, `Y` on `0..=Kx+Ky`.
pub fn convolve(x: &CountPmf, y: &CountPmf) -> CountPmf {
    convolve_capped(x, y, x.max_k() + y.max_k())
}

/// `X + Y` truncated to `0..=cap`; the dropped mass joins the tail bound.
pub fn convolve_capped(x: &CountPmf, y: &CountPmf, cap: usize) -> CountPmf {
    let full = x.max_k() + y.max_k();
    let top = full.min(cap);
    let probs = convolve_window(&x.probs, &y.probs, top);
    let dropped = if top < full {
        // mass of the full convolution beyond `top`
        let kept = compensated_sum(probs.iter().copied());
        (x.mass() * y.mass() - kept).max(0.0)
    } else {
        0.0
    };
    CountPmf::from_parts(probs, x.tail_bound + y.tail_bound + dropped)
}

/// `Σ_j x[j] y[k-j]` for `k = 0..=k_max`; exact on indices both inputs cover.
pub(crate) fn convolve_window(x: &[f64], y: &[f64], k_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; k_max + 1];
    for (j, &xj) in x.iter().enumerate().take(k_max + 1) {
        if xj == 0.0 {
            continue;
        }
        let len = y.len().min(k_max + 1 - j);
        for (o, &yv) in out[j..j + len].iter_mut().zip(&y[..len]) {
            *o += xj * yv;
        }
    }
    out
}

/// `X ⊕ b`: adds an independent Poisson(`b`) variable.
pub fn poisson_shift_pmf(x: &CountPmf, b: f64) -> Result<CountPmf> {
    if !(b >= 0.0) {
        return Err(StableError::Domain {
            name: "b",
            value: b,
            domain: "[0, inf) (left shifts exist only at parameter level)",
        });
    }
    if b == 0.0 {
        return Ok(x.clone());
    }
    let z = poisson_pmf(b, poisson_cutoff(b, SHIFT_TAIL))?;
    Ok(convolve(x, &z))
}

/// Certified upper bound on the total variation distance.
pub fn tv_distance(x: &CountPmf, y: &CountPmf) -> f64 {
    let n = x.probs.len().max(y.probs.len());
    let diff = compensated_sum((0..n).map(|k| (x.get(k) - y.get(k)).abs()));
    (0.5 * diff + 0.5 * (x.tail_bound + y.tail_bound)).min(1.0)
}

/// `½ Σ |x[k] − y[k]|` over `0..=k_max` only, ignoring tails.
pub fn window_distance(x: &[f64], y: &[f64], k_max: usize) -> f64 {
    let get = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    0.5 * compensated_sum((0..=k_max).map(|k| (get(x, k) - get(y, k)).abs()))
}
