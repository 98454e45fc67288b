use std::collections::HashSet;

use keyedgen::stats::{
    binomial_upper_p, chi_square_p, longest_repeated_substring, lrs_p_value, median,
};
use keyedgen::BitStream;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: &str = include_str!("data/chi2_grid.tsv");

#[test]
fn chi_square_matches_high_precision_grid() {
    let mut checked = 0;
    for line in GRID
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
    {
        let f: Vec<&str> = line.split('\t').collect();
        let df: u32 = f[0].parse().unwrap();
        let x: f64 = f[1].parse().unwrap();
        let q: f64 = f[2].parse().unwrap();
        let got = chi_square_p(x, df).unwrap().value();
        assert!((got - q).abs() <= 1e-10, "df={df} x={x}: {got} vs {q}");
        checked += 1;
    }
    assert_eq!(checked, 1000);
}

#[test]
fn chi_square_decreases_in_statistic() {
    for df in [1, 3, 10, 71] {
        let mut prev = 1.0;
        for i in 0..2000 {
            let p = chi_square_p(i as f64 * 0.05, df).unwrap().value();
            assert!(p <= prev + 1e-15, "df={df} at {i}");
            prev = p;
        }
    }
}

fn exact_upper_tail(n: u64, k: u64) -> f64 {
    // P(X >= k) for Bin(n, 1/2) as an exact rational.
    let mut c = BigUint::one();
    let mut sum = BigUint::zero();
    for i in 0..=n {
        if i >= k {
            sum += &c;
        }
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    let total = BigUint::one() << n;
    BigRational::new(sum.into(), total.into()).to_f64().unwrap()
}

fn log_space_upper_tail(n: u64, p: f64, k: u64) -> f64 {
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let terms: Vec<f64> = (k..=n)
        .map(|i| {
            ln_fact[n as usize] - ln_fact[i as usize] - ln_fact[(n - i) as usize]
                + i as f64 * p.ln()
                + (n - i) as f64 * (1.0 - p).ln()
        })
        .collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top.exp() * terms.iter().map(|t| (t - top).exp()).sum::<f64>()
}

#[test]
fn binomial_tail_matches_exact_sums() {
    for n in [1u64, 2, 5, 10, 31, 64, 100] {
        for k in 0..=n {
            let want = exact_upper_tail(n, k);
            let got = binomial_upper_p(n, 0.5, k).unwrap().value();
            assert!(
                (got - want).abs() <= 1e-12 * want.max(1e-300) + 1e-15,
                "n={n} k={k}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn binomial_tail_at_matrix_size() {
    for k in (450..=700).step_by(5) {
        let want = log_space_upper_tail(1000, 0.5, k);
        let got = binomial_upper_p(1000, 0.5, k).unwrap().value();
        assert!(
            ((got - want) / want).abs() <= 1e-9,
            "k={k}: {got} vs {want}"
        );
    }
    assert!(
        ((binomial_upper_p(1000, 0.5, 1000).unwrap().value() - 0.5f64.powi(1000))
            / 0.5f64.powi(1000))
        .abs()
            < 1e-9
    );
    assert_eq!(binomial_upper_p(1000, 0.5, 0).unwrap().value(), 1.0);
    for p in [0.1, 0.3, 0.7] {
        for k in [50u64, 120, 300, 650, 720] {
            let want = log_space_upper_tail(1000, p, k);
            if want < 1e-250 {
                continue;
            }
            let got = binomial_upper_p(1000, p, k).unwrap().value();
            assert!(((got - want) / want).abs() <= 1e-9, "p={p} k={k}");
        }
    }
}

fn brute_force_lrs(bits: &[bool]) -> usize {
    let n = bits.len();
    let mut best = 0;
    for i in 0..n {
        for j in i + 1..n {
            let mut l = 0;
            while j + l < n && bits[i + l] == bits[j + l] {
                l += 1;
            }
            best = best.max(l);
        }
    }
    best
}

#[test]
fn lrs_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1f5);
    for case in 0..500 {
        let n = rng.random_range(2..=200usize);
        // Biased sources give long repeats as well as short ones.
        let bias = rng.random_range(0.0..1.0f64);
        let bits: Vec<bool> = (0..n)
            .map(|_| rng.random_range(0.0..1.0f64) < bias)
            .collect();
        let stream: BitStream = bits.iter().copied().collect();
        assert_eq!(
            longest_repeated_substring(&stream).unwrap(),
            brute_force_lrs(&bits),
            "case {case}"
        );
    }
}

#[test]
fn lrs_p_value_is_non_increasing() {
    let mut prev = 1.0;
    for w in 1..=64 {
        let p = lrs_p_value(w, 1000).unwrap().value();
        assert!(p <= prev, "w={w}");
        prev = p;
    }
    let p28 = lrs_p_value(28, 1000).unwrap().value();
    let p29 = lrs_p_value(29, 1000).unwrap().value();
    assert!(p28 >= 0.001 && p29 < 0.001);
}

fn hashset_lrs(bits: &[bool]) -> usize {
    // Largest w such that some length-w window repeats.
    let repeats = |w: usize| {
        let mut seen = HashSet::new();
        bits.windows(w).any(|win| !seen.insert(win.to_vec()))
    };
    let (mut lo, mut hi) = (0, bits.len());
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if repeats(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

#[test]
fn lrs_of_random_rows_centres_near_twenty() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let lengths: Vec<f64> = (0..300)
        .map(|_| {
            let bits: Vec<bool> = (0..1000).map(|_| rng.random::<bool>()).collect();
            let fast = longest_repeated_substring(&bits.iter().copied().collect()).unwrap();
            assert_eq!(fast, hashset_lrs(&bits));
            fast as f64
        })
        .collect();
    let m = median(&lengths);
    assert!((18.0..=22.0).contains(&m), "median {m}");
}
