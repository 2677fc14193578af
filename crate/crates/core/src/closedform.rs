//! Exact closed forms for the class-5 walk counts on `K_n x K2`.
//!
//! `A_n = |S5(u0,v0)|` and `B_n = |S5(u0,v1)|` are sums of the per-`k`
//! terms `p_k` and `q_k`, each a product of binomials, falling factorials and
//! inner sums over `t`. Everything here is exact; floats appear only in
//! [`asymptotic_reference`].

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosedFormError {
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
}

const TABLE_SIZE: usize = 512;

fn table() -> &'static [BigUint] {
    static FACTORIALS: OnceLock<Vec<BigUint>> = OnceLock::new();
    FACTORIALS.get_or_init(|| {
        let mut f = Vec::with_capacity(TABLE_SIZE);
        f.push(BigUint::one());
        for i in 1..TABLE_SIZE {
            let next = &f[i - 1] * BigUint::from(i);
            f.push(next);
        }
        f
    })
}

pub fn factorial(n: usize) -> BigUint {
    let t = table();
    if n < t.len() {
        return t[n].clone();
    }
    (t.len()..=n).fold(t[t.len() - 1].clone(), |acc, i| acc * BigUint::from(i))
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `n! / (n - t)!`, zero when `t > n`.
pub fn falling_factorial(n: usize, t: usize) -> BigUint {
    if t > n {
        return BigUint::zero();
    }
    factorial(n) / factorial(n - t)
}

fn binomial_signed(n: isize, k: isize) -> BigUint {
    if n < 0 || k < 0 {
        BigUint::zero()
    } else {
        binomial(n as usize, k as usize)
    }
}

/// Direct evaluation of `a_{t,k}`; zero outside `0 <= t <= n-2k-2`.
pub fn a_term(n: usize, t: usize, k: usize) -> BigUint {
    match n.checked_sub(2 * k + 2) {
        Some(m) if t <= m => falling_factorial(m, t) * binomial(t + k, k),
        _ => BigUint::zero(),
    }
}

/// Direct evaluation of `b_{t,k}`; `C(t+k-1, k-1)` vanishes at `k = 0`.
pub fn b_term(n: usize, t: usize, k: usize) -> BigUint {
    match n.checked_sub(2 * k + 2) {
        Some(m) if t <= m => {
            falling_factorial(m, t)
                * binomial_signed((t + k) as isize - 1, k as isize - 1)
                * BigUint::from(t + k)
                * BigUint::from(t + k + 1)
        }
        _ => BigUint::zero(),
    }
}

/// Direct evaluation of `c_{t,k}`; zero outside `0 <= t <= n-2k-3`.
pub fn c_term(n: usize, t: usize, k: usize) -> BigUint {
    match n.checked_sub(2 * k + 3) {
        Some(m) if t <= m => falling_factorial(m, t) * binomial(t + k, k) * BigUint::from(t + k + 1),
        _ => BigUint::zero(),
    }
}

/// Inner sums and outer terms for one `n`, built by term-to-term recurrences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormTerms {
    pub n: usize,
    /// `Σ_t a_{t,k}` for `k = 0..=⌊(n-2)/2⌋`.
    pub sum_a: Vec<BigUint>,
    pub sum_b: Vec<BigUint>,
    /// `Σ_t c_{t,k}` for `k = 0..=⌊(n-3)/2⌋`.
    pub sum_c: Vec<BigUint>,
    /// `p_k` for `k = 0..=⌊(n-2)/2⌋`; `p_0 = 0` since every `b_{t,0}` is 0.
    pub p: Vec<BigUint>,
    /// `q_k` for `k = 0..=⌊(n-3)/2⌋`.
    pub q: Vec<BigUint>,
}

/// `Σ_{t=0}^{m} m!/(m-t)! · C(t+j, j) · g(t)` with `g` a small weight per `t`.
fn weighted_sum(m: usize, j: usize, g: impl Fn(usize) -> u128) -> BigUint {
    let mut falling = BigUint::one();
    let mut binom = BigUint::one();
    let mut sum = BigUint::zero();
    for t in 0..=m {
        if t > 0 {
            falling *= BigUint::from(m + 1 - t);
            binom = binom * BigUint::from(t + j) / BigUint::from(t);
        }
        sum += &falling * &binom * BigUint::from(g(t));
    }
    sum
}

impl ClosedFormTerms {
    pub fn new(n: usize) -> Result<Self, ClosedFormError> {
        if n < 3 {
            return Err(ClosedFormError::OutOfRange(format!("need n >= 3, got {n}")));
        }
        let kp = (n - 2) / 2;
        let kq = (n - 3) / 2;
        let mut sum_a = Vec::with_capacity(kp + 1);
        let mut sum_b = Vec::with_capacity(kp + 1);
        let mut p = Vec::with_capacity(kp + 1);
        for k in 0..=kp {
            let m = n - 2 * k - 2;
            let a = weighted_sum(m, k, |_| 1);
            let b = if k == 0 {
                BigUint::zero()
            } else {
                // C(t+k-1, k-1) (t+k)(t+k+1)
                weighted_sum(m, k - 1, |t| ((t + k) * (t + k + 1)) as u128)
            };
            p.push(factorial(2 * k) * binomial(n - 2, 2 * k) * &a * &b);
            sum_a.push(a);
            sum_b.push(b);
        }
        let mut sum_c = Vec::with_capacity(kq + 1);
        let mut q = Vec::with_capacity(kq + 1);
        for k in 0..=kq {
            let c = weighted_sum(n - 2 * k - 3, k, |t| (t + k + 1) as u128);
            q.push(factorial(2 * k + 1) * binomial(n - 2, 2 * k + 1) * &c * &c);
            sum_c.push(c);
        }
        Ok(ClosedFormTerms { n, sum_a, sum_b, sum_c, p, q })
    }

    pub fn a_total(&self) -> BigUint {
        self.p.iter().sum()
    }

    pub fn b_total(&self) -> BigUint {
        self.q.iter().sum()
    }
}

pub fn closed_form_a(n: usize) -> Result<BigUint, ClosedFormError> {
    Ok(ClosedFormTerms::new(n)?.a_total())
}

pub fn closed_form_b(n: usize) -> Result<BigUint, ClosedFormError> {
    Ok(ClosedFormTerms::new(n)?.b_total())
}

fn rational(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

fn rational_int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Certified bracket `lower <= e^x <= upper` for a small positive integer `x`,
/// from the exponential series truncated after `terms` terms plus a geometric
/// tail bound. With `terms = 40` and `x <= 2` the width is below `1e-30`.
pub fn certified_exp(x: u32, terms: usize) -> (BigRational, BigRational) {
    assert!(x >= 1 && terms as u64 > u64::from(x), "need 1 <= x < terms");
    let xr = rational_int(u64::from(x));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for j in 1..terms {
        term = term * &xr / rational_int(j as u64);
        sum += &term;
    }
    // Tail Σ_{j >= M} x^j/j! <= x^M/M! · 1/(1 - x/(M+1)).
    let m = terms as u64;
    let next = term * &xr / rational_int(m);
    let tail = next * rational_int(m + 1) / rational_int(m + 1 - u64::from(x));
    let upper = &sum + tail;
    (sum, upper)
}

/// `e^2` bracket used by every exact bound check.
pub fn e_squared_bracket() -> &'static (BigRational, BigRational) {
    static E2: OnceLock<(BigRational, BigRational)> = OnceLock::new();
    E2.get_or_init(|| certified_exp(2, 40))
}

pub fn e_bracket() -> &'static (BigRational, BigRational) {
    static E1: OnceLock<(BigRational, BigRational)> = OnceLock::new();
    E1.get_or_init(|| certified_exp(1, 40))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundVerdict {
    /// Certified: the value is at most the lower end of the bound's bracket.
    Holds,
    /// Certified: the value exceeds the upper end.
    Violated,
    /// The value falls inside the bracket.
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedRatio {
    pub ratio: BigRational,
    /// Bracket on `e^2 / divisor`.
    pub bound_lower: BigRational,
    pub bound_upper: BigRational,
    pub verdict: BoundVerdict,
}

impl BoundedRatio {
    fn new(ratio: BigRational, divisor: u64) -> Self {
        let (lo, hi) = e_squared_bracket();
        let d = rational_int(divisor);
        let (bound_lower, bound_upper) = (lo / &d, hi / &d);
        let verdict = if ratio <= bound_lower {
            BoundVerdict::Holds
        } else if ratio > bound_upper {
            BoundVerdict::Violated
        } else {
            BoundVerdict::Undecided
        };
        BoundedRatio { ratio, bound_lower, bound_upper, verdict }
    }

    pub fn holds(&self) -> bool {
        self.verdict == BoundVerdict::Holds
    }

    pub fn ratio_f64(&self) -> f64 {
        self.ratio.to_f64().unwrap_or(f64::NAN)
    }
}

/// `q_{k+1}/q_k` against `e^2/(k+1)^2`, for `0 <= k` and `2k <= n-5`.
pub fn q_ratio(n: usize, k: usize) -> Result<BoundedRatio, ClosedFormError> {
    if n < 5 || 2 * k > n - 5 {
        return Err(ClosedFormError::OutOfRange(format!("q ratio needs 0 <= k <= (n-5)/2, got n={n}, k={k}")));
    }
    let terms = ClosedFormTerms::new(n)?;
    Ok(q_ratio_from(&terms, k))
}

fn q_ratio_from(terms: &ClosedFormTerms, k: usize) -> BoundedRatio {
    let r = rational(&terms.q[k + 1]) / rational(&terms.q[k]);
    BoundedRatio::new(r, ((k + 1) * (k + 1)) as u64)
}

/// `p_{k+1}/p_k` against `e^2/(k(k+1))`, for `k >= 1` and `2k <= n-4`.
pub fn p_ratio(n: usize, k: usize) -> Result<BoundedRatio, ClosedFormError> {
    if n < 6 || k < 1 || 2 * k > n - 4 {
        return Err(ClosedFormError::OutOfRange(format!("p ratio needs 1 <= k <= (n-4)/2, got n={n}, k={k}")));
    }
    let terms = ClosedFormTerms::new(n)?;
    Ok(p_ratio_from(&terms, k))
}

fn p_ratio_from(terms: &ClosedFormTerms, k: usize) -> BoundedRatio {
    let r = rational(&terms.p[k + 1]) / rational(&terms.p[k]);
    BoundedRatio::new(r, (k * (k + 1)) as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermRatios {
    pub n: usize,
    pub k: usize,
    pub q_ratio: Option<BoundedRatio>,
    pub p_ratio: Option<BoundedRatio>,
}

/// Both ratios at `(n, k)`, each present when `k` is in its index range.
pub fn term_ratios(n: usize, k: usize) -> Result<TermRatios, ClosedFormError> {
    let terms = ClosedFormTerms::new(n)?;
    let q = (n >= 5 && 2 * k <= n - 5).then(|| q_ratio_from(&terms, k));
    let p = (n >= 6 && k >= 1 && 2 * k <= n - 4).then(|| p_ratio_from(&terms, k));
    if q.is_none() && p.is_none() {
        return Err(ClosedFormError::OutOfRange(format!("no ratio is defined at n={n}, k={k}")));
    }
    Ok(TermRatios { n, k, q_ratio: q, p_ratio: p })
}

/// Every `(n, k)` ratio for one `n`, reusing a single term table.
pub fn all_term_ratios(n: usize) -> Result<Vec<TermRatios>, ClosedFormError> {
    let terms = ClosedFormTerms::new(n)?;
    let mut out = Vec::new();
    for k in 0..=n / 2 {
        let q = (n >= 5 && 2 * k <= n - 5).then(|| q_ratio_from(&terms, k));
        let p = (n >= 6 && k >= 1 && 2 * k <= n - 4).then(|| p_ratio_from(&terms, k));
        if q.is_some() || p.is_some() {
            out.push(TermRatios { n, k, q_ratio: q, p_ratio: p });
        }
    }
    Ok(out)
}

/// Partial sum of a positive series until the next term drops below `1e-18`.
fn series(term: impl Fn(u32) -> f64) -> f64 {
    let mut sum = 0.0;
    for m in 0.. {
        let t = term(m);
        sum += t;
        if term(m + 1) < 1e-18 {
            break;
        }
    }
    sum
}

fn factorial_f64(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReference {
    pub n: usize,
    pub e_squared: f64,
    /// `Σ 1/((m!)^2 (m+1))`.
    pub series_a: f64,
    /// `Σ 1/(m!)^2`.
    pub series_b: f64,
    /// Reference values; these overflow to infinity for large `n`, the
    /// `log10` fields do not.
    pub a_ref: f64,
    pub b_ref: f64,
    pub a_ref_log10: f64,
    pub b_ref_log10: f64,
    pub a_ratio: f64,
    pub b_ratio: f64,
}

/// `A_n` and `B_n` against `e^2 Σ 1/((m!)^2 (m+1)) (n-3) ((n-2)!)^2` and
/// `e^2 Σ 1/(m!)^2 (n-2) ((n-2)!)^2`.
pub fn asymptotic_reference(n: usize) -> Result<AsymptoticReference, ClosedFormError> {
    if n < 4 {
        return Err(ClosedFormError::OutOfRange(format!("need n >= 4, got {n}")));
    }
    let e_squared = series(|m| 2f64.powi(m as i32) / factorial_f64(m));
    let series_a = series(|m| 1.0 / (factorial_f64(m).powi(2) * f64::from(m + 1)));
    let series_b = series(|m| 1.0 / factorial_f64(m).powi(2));

    let terms = ClosedFormTerms::new(n)?;
    let f2 = rational(&(factorial(n - 2) * factorial(n - 2)));
    let scale_a = f2.clone() * rational_int((n - 3) as u64);
    let scale_b = f2.clone() * rational_int((n - 2) as u64);
    let a_scaled = (rational(&terms.a_total()) / &scale_a).to_f64().unwrap_or(f64::NAN);
    let b_scaled = (rational(&terms.b_total()) / &scale_b).to_f64().unwrap_or(f64::NAN);

    let log_f2: f64 = 2.0 * (1..=n - 2).map(|i| (i as f64).log10()).sum::<f64>();
    let a_ref_log10 = (e_squared * series_a).log10() + ((n - 3) as f64).log10() + log_f2;
    let b_ref_log10 = (e_squared * series_b).log10() + ((n - 2) as f64).log10() + log_f2;
    Ok(AsymptoticReference {
        n,
        e_squared,
        series_a,
        series_b,
        a_ref: 10f64.powf(a_ref_log10),
        b_ref: 10f64.powf(b_ref_log10),
        a_ref_log10,
        b_ref_log10,
        a_ratio: a_scaled / (e_squared * series_a),
        b_ratio: b_scaled / (e_squared * series_b),
    })
}
