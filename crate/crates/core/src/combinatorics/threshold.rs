//! The sequence `a_p = p^n / (p! 2^p)`, its peak `M_n`, log-domain
//! approximations of `B_{n,k}` and the concentration windows around them.

use std::cmp::Ordering;
use std::f64::consts::LN_2;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::numbers::stirling2;

use super::logreal::{log_sum_exp, LogReal};
use crate::error::{domain, Error, Result};

/// Below this size the peak predicate is decided in exact integer arithmetic.
pub const DEFAULT_EXACT_CUTOFF: u64 = 10_000;

/// Log-domain decisions closer than this to the boundary are re-done exactly.
const LOG_MARGIN: f64 = 1e-9;

pub(crate) fn ln_factorial(p: u64) -> f64 {
    if p < 2 {
        0.0
    } else {
        libm::lgamma(p as f64 + 1.0)
    }
}

/// `ln(p^n / (p! 2^p))`.
pub fn a_term(n: u64, p: u64) -> LogReal {
    if p == 0 {
        return LogReal::ZERO;
    }
    LogReal::from_ln(n as f64 * (p as f64).ln() - ln_factorial(p) - p as f64 * LN_2)
}

/// `ln sum_{p=1}^{k} p^n / (p! 2^p)`. Upper bound of `B_{n,k}`, and within a
/// factor 2 of it.
pub fn b_approx(n: u64, k: u64) -> LogReal {
    let logs: Vec<f64> = (1..=k).map(|p| a_term(n, p).ln()).collect();
    log_sum_exp(&logs)
}

/// `ln(a_{p+1} / a_p) = (n-1) ln(1 + 1/p) - ln p - ln 2`.
fn log_step(n: u64, p: u64) -> f64 {
    let pf = p as f64;
    (n as f64 - 1.0) * (1.0 / pf).ln_1p() - pf.ln() - LN_2
}

/// Exact comparison of `a_{p+1}` with `a_p`, i.e. `(p+1)^{n-1}` with `2 p^n`.
pub fn step_cmp_exact(n: u64, p: u64) -> Ordering {
    let lhs = BigUint::from(p + 1).pow((n - 1) as u32);
    let rhs = BigUint::from(p).pow(n as u32) << 1usize;
    lhs.cmp(&rhs)
}

fn step_cmp(n: u64, p: u64, exact_cutoff: u64) -> Ordering {
    if n <= exact_cutoff {
        return step_cmp_exact(n, p);
    }
    let g = log_step(n, p);
    if g.abs() < LOG_MARGIN {
        step_cmp_exact(n, p)
    } else if g > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Peak index `M_n` of `p -> a_p`: the smallest `p` with `a_{p+1} <= a_p`
/// (or `n` if there is none).
pub fn m_threshold(n: u64) -> u64 {
    m_threshold_with(n, DEFAULT_EXACT_CUTOFF)
}

/// [`m_threshold`] with an explicit exactness cutoff.
pub fn m_threshold_with(n: u64, exact_cutoff: u64) -> u64 {
    if n <= 1 {
        return 1;
    }
    // log-concavity makes the predicate monotone in p
    let (mut lo, mut hi) = (1u64, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if step_cmp(n, mid, exact_cutoff) != Ordering::Greater {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Real root `x_n` of `((x+1)/x)^n / (2(x+1)) = 1`. Diagnostic only;
/// `a_{p+1} > a_p` exactly for `p < x_n`, so `M_n = ceil(x_n)`.
pub fn threshold_root(n: u64) -> f64 {
    let nf = n as f64;
    let phi = |x: f64| nf * (1.0 / x).ln_1p() - LN_2 - x.ln_1p();
    let (mut lo, mut hi) = (1e-12, nf.max(1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Outcome of a unimodality scan of `p -> a_p` over `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unimodality {
    pub peak: u64,
    /// Single strict rise followed by a single strict fall, no ties.
    pub strict: bool,
}

fn scan(n: u64, cmp: impl Fn(u64) -> Ordering) -> Unimodality {
    let mut peak = 1;
    let mut falling = false;
    let mut strict = true;
    for p in 1..n {
        match cmp(p) {
            Ordering::Greater => {
                if falling {
                    strict = false;
                }
                peak = p + 1;
            }
            Ordering::Less => falling = true,
            Ordering::Equal => {
                strict = false;
                falling = true;
            }
        }
    }
    Unimodality { peak, strict }
}

/// Unimodality of `a_p` decided in exact integer arithmetic.
pub fn unimodality_exact(n: u64) -> Unimodality {
    scan(n, |p| step_cmp_exact(n, p))
}

/// Unimodality of `a_p` from log-domain steps (exact fallback near ties).
pub fn unimodality_log(n: u64) -> Unimodality {
    scan(n, |p| step_cmp(n, p, 0))
}

/// Concentration window parameters `(delta, eta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowParams {
    pub delta: u64,
    pub eta: u64,
}

/// Fraction of `sum_{p<=k} a_p` carried by the window `[k-delta, k]` when
/// `k <= M_n`, or `[M_n-delta, min(M_n+eta, k)]` otherwise.
pub fn window_mass(n: u64, k: u64, w: WindowParams) -> Result<f64> {
    if n == 0 || k == 0 {
        return domain("window_mass needs n, k >= 1");
    }
    let k = k.min(n);
    if w.delta >= k {
        return domain(format!("delta ({}) must be below k ({k})", w.delta));
    }
    let m = m_threshold(n);
    let (lo, hi) = if k <= m {
        (k - w.delta, k)
    } else {
        (m.saturating_sub(w.delta).max(1), (m + w.eta).min(k))
    };
    if lo > hi || lo == 0 {
        return domain(format!("empty window [{lo}, {hi}]"));
    }
    let window = LogReal::sum((lo..=hi).map(|p| a_term(n, p)));
    let total = b_approx(n, k);
    Ok((window / total).to_f64())
}

/// `ln {n p}` from the truncated inclusion-exclusion series
/// `{n p} = p^n/p! * sum_j (-1)^j C(p,j) (1 - j/p)^n`.
///
/// Fails when cancellation in the alternating sum would cost more than
/// `1e-9` relative precision (only happens far to the right of the peak).
pub fn ln_stirling2_approx(n: u64, p: u64) -> Result<f64> {
    if p == 0 || p > n {
        return Ok(f64::NEG_INFINITY);
    }
    if p == 1 || p == n {
        return Ok(0.0);
    }
    let nf = n as f64;
    let pf = p as f64;
    let mut sum = 1.0f64;
    let mut max_term = 1.0f64;
    let mut ln_binom = 0.0f64;
    let mut prev = 1.0f64;
    for j in 1..p {
        let jf = j as f64;
        ln_binom += (pf - jf + 1.0).ln() - jf.ln();
        let ln_t = ln_binom + nf * (-jf / pf).ln_1p();
        if ln_t > 690.0 {
            return Err(Error::Domain(format!(
                "inclusion-exclusion overflow for S({n},{p})"
            )));
        }
        let t = ln_t.exp();
        max_term = max_term.max(t);
        sum += if j % 2 == 1 { -t } else { t };
        if t < prev && t < 1e-18 * sum.abs() {
            break;
        }
        prev = t;
    }
    if sum <= 0.0 || max_term * 1e-16 * (p as f64).sqrt() > 1e-9 * sum {
        return Err(Error::Domain(format!(
            "inclusion-exclusion cancellation too severe for S({n},{p})"
        )));
    }
    Ok(nf * pf.ln() - ln_factorial(p) + sum.ln())
}

/// Largest `n` for which [`b_log`] falls back to exact Stirling numbers
/// where the alternating series is unusable.
const EXACT_STIRLING_FALLBACK: u64 = 4000;

pub(crate) fn ln_biguint(x: &BigUint) -> f64 {
    let shift = x.bits().saturating_sub(60);
    (x >> shift).to_f64().unwrap_or(0.0).ln() + shift as f64 * LN_2
}

/// `(lo, ln w_lo..=ln w_hi)` with `w_p = S(n,p) 2^{-p}` over the window
/// where `a_p` is within `e^{-45}` of its maximum on `1..=k`.
pub(crate) fn ln_block_weights(n: u64, k: u64) -> Result<(u64, Vec<f64>)> {
    let kk = k.min(n);
    let peak = kk.min(m_threshold(n));
    let top = a_term(n, peak).ln();
    let floor = top - 45.0;
    let mut lo = peak;
    while lo > 1 && a_term(n, lo - 1).ln() >= floor {
        lo -= 1;
    }
    let mut hi = peak;
    while hi < kk && a_term(n, hi + 1).ln() >= floor {
        hi += 1;
    }
    let mut logs = Vec::with_capacity((hi - lo + 1) as usize);
    for p in lo..=hi {
        let ln_s = match ln_stirling2_approx(n, p) {
            Ok(v) => v,
            Err(_) if n <= EXACT_STIRLING_FALLBACK => ln_biguint(&stirling2(n, p)),
            Err(e) => return Err(e),
        };
        logs.push(ln_s - p as f64 * LN_2);
    }
    Ok((lo, logs))
}

/// Log-domain `B_{n,k}`, summing `S(n,p) 2^{-p}` over the window where
/// `a_p` is within `e^{-45}` of its maximum on `1..=k`.
pub fn b_log(n: u64, k: u64) -> Result<LogReal> {
    if k == 0 {
        return domain("variable budget k must be at least 1");
    }
    if n == 0 {
        return Ok(LogReal::ZERO);
    }
    Ok(log_sum_exp(&ln_block_weights(n, k)?.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::numbers::{a_term_exact, b_exact};

    #[test]
    fn a_term_values() {
        assert!((a_term(4, 2).ln() - 2f64.ln()).abs() < 1e-12);
        for n in [1u64, 5, 1000] {
            assert!((a_term(n, 1).ln() + LN_2).abs() < 1e-12);
        }
        let want = (1_048_576f64 / 384.0).ln();
        assert!((a_term(10, 4).ln() - want).abs() < 1e-12);
    }

    #[test]
    fn a_term_relative_error_against_exact() {
        for n in [50u64, 300, 2000] {
            for p in [1u64, 7, n / 5, n / 2, n] {
                let exact = a_term_exact(n, p);
                // compare logs through the big rational's numerator/denominator bit lengths
                let ln_exact = ln_big_ratio(&exact);
                let rel = (a_term(n, p).ln() - ln_exact).abs();
                assert!(rel < 1e-10, "n={n} p={p} err={rel}");
            }
        }
    }

    fn ln_big_ratio(r: &num_rational::BigRational) -> f64 {
        fn ln_big(x: &num_bigint::BigInt) -> f64 {
            let bits = x.bits();
            let shift = bits.saturating_sub(60);
            let top = (x >> shift).to_f64().unwrap();
            top.ln() + shift as f64 * LN_2
        }
        ln_big(r.numer()) - ln_big(r.denom())
    }

    #[test]
    fn b_approx_values() {
        assert!((b_approx(2, 2).to_f64() - 1.0).abs() < 1e-12);
        assert!((b_approx(1, 1).to_f64() - 0.5).abs() < 1e-12);
        let exact = ln_big_ratio(&b_exact(300, 100).unwrap());
        let approx = b_approx(300, 100).ln();
        assert!(approx >= exact - 1e-12 && approx <= exact + LN_2 + 1e-12);
    }

    #[test]
    fn threshold_values() {
        assert_eq!(m_threshold(4), 2);
        assert_eq!(m_threshold(10), 4);
        assert_eq!(m_threshold(2), 1);
        assert_eq!(m_threshold(1), 1);
    }

    #[test]
    fn threshold_log_and_exact_agree() {
        for n in (2..3000).step_by(37) {
            assert_eq!(m_threshold_with(n, 0), m_threshold_with(n, u64::MAX), "n={n}");
        }
    }

    #[test]
    fn threshold_matches_root_floor() {
        for n in [10u64, 100, 1000, 5000] {
            assert_eq!(m_threshold(n), threshold_root(n).ceil() as u64, "n={n}");
        }
    }

    #[test]
    fn unimodal_small() {
        // a_1 = a_2 at n = 2
        assert_eq!(unimodality_exact(2), Unimodality { peak: 1, strict: false });
        for n in 3..=60 {
            let u = unimodality_exact(n);
            assert!(u.strict, "n={n}");
            assert_eq!(u.peak, m_threshold(n));
        }
    }

    #[test]
    fn window_examples() {
        let w = window_mass(10, 2, WindowParams { delta: 1, eta: 1 }).unwrap();
        assert!(w >= 0.9);
        let w = window_mass(10, 10, WindowParams { delta: 2, eta: 2 }).unwrap();
        assert!(w >= 0.9);
        let w = window_mass(10, 10, WindowParams { delta: 3, eta: 6 }).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
        assert!(window_mass(10, 3, WindowParams { delta: 3, eta: 0 }).is_err());
    }

    #[test]
    fn stirling_approx_matches_exact() {
        for (n, p) in [(10u64, 3u64), (50, 10), (200, 40), (300, 100), (12, 11)] {
            let exact = stirling2(n, p);
            let bits = exact.bits();
            let shift = bits.saturating_sub(60);
            let ln_exact = (&exact >> shift).to_f64().unwrap().ln() + shift as f64 * LN_2;
            let got = ln_stirling2_approx(n, p).unwrap();
            assert!((got - ln_exact).abs() < 1e-9, "S({n},{p}) {got} vs {ln_exact}");
        }
    }
}
