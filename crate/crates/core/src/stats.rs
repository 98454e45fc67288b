//! Numeric kernels for the validation battery.

use std::fmt;

use serde::Serialize;

use crate::bits::BitStream;
use crate::error::{Error, Result};

/// A probability in `[0, 1]`; never NaN.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct PValue(f64);

impl PValue {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidArgument(format!(
                "p-value {value} outside [0, 1]"
            )));
        }
        Ok(Self(value))
    }

    /// Clamps rounding overshoot into `[0, 1]`.
    fn clamped(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let sum = LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let front = (-x + a * x.ln() - ln_gamma(a)).exp();
    if x < a + 1.0 {
        // series for P(a, x)
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        1.0 - sum * front
    } else {
        // modified Lentz continued fraction for Q(a, x)
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        front * h
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (-x).ln_1p();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Upper-tail probability of the chi-square distribution.
pub fn chi_square_p(stat: f64, df: u32) -> Result<PValue> {
    if stat.is_nan() || stat < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "chi-square statistic {stat} must be >= 0"
        )));
    }
    if df == 0 {
        return Err(Error::InvalidArgument(
            "chi-square needs at least 1 degree of freedom".into(),
        ));
    }
    Ok(PValue::clamped(gamma_q(df as f64 / 2.0, stat / 2.0)))
}

/// Exact `P[X >= k]` for `X ~ Binomial(trials, prob)`.
pub fn binomial_upper_p(trials: u64, prob: f64, k: u64) -> Result<PValue> {
    if k > trials || prob.is_nan() || !(0.0..=1.0).contains(&prob) {
        return Err(Error::InvalidArgument(format!(
            "binomial tail needs 0 <= k <= n and 0 <= p <= 1 (n={trials}, p={prob}, k={k})"
        )));
    }
    if k == 0 {
        return Ok(PValue(1.0));
    }
    if prob == 0.0 {
        return Ok(PValue(0.0));
    }
    if k == trials {
        return Ok(PValue::clamped(prob.powi(trials as i32)));
    }
    Ok(PValue::clamped(beta_inc(
        k as f64,
        (trials - k + 1) as f64,
        prob,
    )))
}

fn suffix_array(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    let mut sa: Vec<usize> = (0..n).collect();
    let mut rank: Vec<usize> = s.iter().map(|&b| b as usize).collect();
    let mut next = vec![0usize; n];
    let mut k = 1;
    loop {
        let key = |i: usize| (rank[i], if i + k < n { rank[i + k] + 1 } else { 0 });
        sa.sort_unstable_by_key(|&i| key(i));
        next[sa[0]] = 0;
        for w in 1..n {
            next[sa[w]] = next[sa[w - 1]] + (key(sa[w - 1]) < key(sa[w])) as usize;
        }
        std::mem::swap(&mut rank, &mut next);
        if rank[sa[n - 1]] == n - 1 || k >= n {
            return sa;
        }
        k *= 2;
    }
}

/// Kasai's longest-common-prefix array over adjacent suffixes.
fn lcp_array(s: &[u8], sa: &[usize]) -> Vec<usize> {
    let n = s.len();
    let mut rank = vec![0; n];
    for (i, &p) in sa.iter().enumerate() {
        rank[p] = i;
    }
    let mut lcp = vec![0; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] > 0 {
            let j = sa[rank[i] - 1];
            while i + h < n && j + h < n && s[i + h] == s[j + h] {
                h += 1;
            }
            lcp[rank[i]] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

/// Length of the longest substring occurring at two or more distinct start
/// positions (occurrences may overlap).
pub fn longest_repeated_substring(bits: &BitStream) -> Result<usize> {
    if bits.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "longest repeated substring needs at least 2 bits, got {}",
            bits.len()
        )));
    }
    let s: Vec<u8> = bits.iter().map(u8::from).collect();
    let sa = suffix_array(&s);
    Ok(lcp_array(&s, &sa).into_iter().max().unwrap_or(0))
}

/// Probability that a uniform `n`-bit string repeats some substring of
/// length `>= w`, counting `C(n - w + 1, 2)` candidate pairs that each match
/// with probability `2^-w`.
pub fn lrs_p_value(w: usize, n: usize) -> Result<PValue> {
    if w == 0 || w >= n {
        return Err(Error::InvalidArgument(format!(
            "LRS p-value needs 1 <= W < n (W={w}, n={n})"
        )));
    }
    let m = (n - w + 1) as f64;
    let pairs = m * (m - 1.0) / 2.0;
    let ln_miss = (-(2f64).powi(-(w as i32))).ln_1p();
    Ok(PValue::clamped(-(pairs * ln_miss).exp_m1()))
}

/// Median of a sample; the mean of the two central values for even sizes.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}
