//! Special functions: log-gamma ratios, Loader's saddle-point terms for
//! binomial and Poisson point probabilities, and compensated summation.

use std::f64::consts::PI;

pub use statrs::function::gamma::ln_gamma;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling error `ln Γ(n+1) - (n+½)ln n + n - ln √(2π)` at n = 0, ½, 1, …, 15.
#[allow(clippy::excessive_precision)]
const STIRLERR_HALVES: [f64; 31] = [
    0.0,
    0.153_426_409_720_027_345_291_4,
    0.081_061_466_795_327_258_219_67,
    0.054_814_121_051_917_653_896_14,
    0.041_340_695_955_409_294_093_82,
    0.033_162_873_519_936_287_485_11,
    0.027_677_925_684_998_339_148_79,
    0.023_746_163_656_297_495_971_33,
    0.020_790_672_103_765_093_111_52,
    0.018_488_450_532_673_185_230_78,
    0.016_644_691_189_821_192_163_19,
    0.015_134_973_221_917_378_873_51,
    0.013_876_128_823_070_747_998_75,
    0.012_810_465_242_920_226_924_25,
    0.011_896_709_945_891_770_095_06,
    0.011_104_559_758_206_917_326_63,
    0.010_411_265_261_972_096_497_48,
    0.009_799_416_126_158_803_298_39,
    0.009_255_462_182_712_732_917_729,
    0.008_768_700_134_139_385_462_955,
    0.008_330_563_433_362_871_256_469,
    0.007_934_114_564_314_020_547_25,
    0.007_573_675_487_951_840_794_972,
    0.007_244_554_301_320_383_179_546,
    0.006_942_840_107_209_529_865_664,
    0.006_665_247_032_707_682_442_356,
    0.006_408_994_188_004_207_068_44,
    0.006_171_712_263_039_457_647_535,
    0.005_951_370_112_758_847_735_624,
    0.005_746_216_513_010_115_682_026,
    0.005_554_733_551_962_801_371_039,
];

/// Error of Stirling's approximation to `ln n!`.
pub fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15.0 {
        let twice = n + n;
        if twice == twice.floor() {
            return STIRLERR_HALVES[twice as usize];
        }
        return ln_gamma(n + 1.0) - (n + 0.5) * n.ln() + n - LN_SQRT_2PI;
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/np) + np - x`, evaluated without cancellation near x = np.
pub fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        return s;
    }
    x * (x / np).ln() + np - x
}

/// `P(Bin(n, p) = x)` with relative accuracy near machine precision.
pub fn binomial_point(x: u64, n: u64, p: f64) -> f64 {
    if x > n {
        return 0.0;
    }
    let q = 1.0 - p;
    if p == 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    if q == 0.0 {
        return if x == n { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    let xf = x as f64;
    if x == 0 {
        if n == 0 {
            return 1.0;
        }
        let lc = if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
        return lc.exp();
    }
    if x == n {
        let lc = if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
        return lc.exp();
    }
    let lc =
        stirlerr(nf) - stirlerr(xf) - stirlerr(nf - xf) - bd0(xf, nf * p) - bd0(nf - xf, nf * q);
    let lf = (2.0 * PI).ln() + xf.ln() + (-xf / nf).ln_1p();
    (lc - 0.5 * lf).exp()
}

/// `P(Po(rate) = x)` with relative accuracy near machine precision.
pub fn poisson_point(x: u64, rate: f64) -> f64 {
    if rate == 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    if x == 0 {
        return (-rate).exp();
    }
    let xf = x as f64;
    (-stirlerr(xf) - bd0(xf, rate)).exp() / (2.0 * PI * xf).sqrt()
}

/// Binomial(n, p) probabilities for k = 0..=min(n, k_max).
///
/// Starts at the mode with [`binomial_point`] and walks outward with the
/// ratio recurrence, stopping once terms underflow.
pub fn binomial_row(n: u64, p: f64, k_max: u64) -> Vec<f64> {
    let top = n.min(k_max) as usize;
    let mut row = vec![0.0; top + 1];
    if p == 0.0 {
        row[0] = 1.0;
        return row;
    }
    if p == 1.0 {
        if n as usize <= top {
            row[n as usize] = 1.0;
        }
        return row;
    }
    let odds = p / (1.0 - p);
    let mode = ((((n + 1) as f64) * p).floor() as u64)
        .min(n)
        .min(top as u64) as usize;
    row[mode] = binomial_point(mode as u64, n, p);
    let nf = n as f64;
    let mut f = row[mode];
    for k in mode..top {
        f *= (nf - k as f64) / (k as f64 + 1.0) * odds;
        if f < f64::MIN_POSITIVE {
            break;
        }
        row[k + 1] = f;
    }
    let mut f = row[mode];
    for k in (1..=mode).rev() {
        f *= k as f64 / (nf - k as f64 + 1.0) / odds;
        if f < f64::MIN_POSITIVE {
            break;
        }
        row[k - 1] = f;
    }
    row
}

/// `ln Γ(x + d) − ln Γ(x)` for `x > 0`, `x + d > 0`, accurate for large `x`.
pub fn ln_gamma_ratio(x: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    if x < 20.0 || x + d < 20.0 {
        return ln_gamma(x + d) - ln_gamma(x);
    }
    let y = x + d;
    d * x.ln() + (y - 0.5) * (d / x).ln_1p() - d + stirling_tail(y) - stirling_tail(x)
}

fn stirling_tail(z: f64) -> f64 {
    let r = 1.0 / (z * z);
    (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r * (1.0 / 1680.0 - r / 1188.0)))) / z
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}
