use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::logreal::LogReal;
use super::numbers::{scaled_b_from_row, StirlingRows};
use super::schedule::Schedule;
use super::threshold::{b_log, DEFAULT_EXACT_CUTOFF};
use crate::error::{domain, Result};

/// Exact big-rational work is used while `n <= exact_n` and
/// `n * k <= exact_work`; log-domain arithmetic otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cutoffs {
    pub exact_n: u64,
    pub exact_work: u64,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Cutoffs {
            exact_n: DEFAULT_EXACT_CUTOFF,
            exact_work: 2_000_000,
        }
    }
}

impl Cutoffs {
    pub fn exact(&self, n: u64, k: u64) -> bool {
        n <= self.exact_n && n.saturating_mul(k.min(n)) <= self.exact_work
    }
}

/// `rat_n`, either exact or log-domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Ratio {
    Exact(BigRational),
    Approx(LogReal),
}

impl Ratio {
    pub fn to_f64(&self) -> f64 {
        match self {
            Ratio::Exact(r) => rational_to_f64(r),
            Ratio::Approx(l) => l.to_f64(),
        }
    }
}

/// `f64` value of a big rational that may overflow a direct conversion.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let (n, d) = (r.numer(), r.denom());
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let sn = (nb - 64).max(0) as usize;
    let sd = (db - 64).max(0) as usize;
    let nf = (n >> sn).to_f64().unwrap_or(f64::NAN);
    let df = (d >> sd).to_f64().unwrap_or(f64::NAN);
    nf / df * 2f64.powi(sn as i32 - sd as i32)
}

/// `rat_n = B_{n-1,k} / B_{n,k}` exactly.
pub fn rat_exact(n: u64, k: u64) -> Result<BigRational> {
    if n < 2 {
        return domain("rat_n needs n >= 2");
    }
    if k == 0 {
        return domain("variable budget k must be at least 1");
    }
    let kk = k.min(n);
    let mut rows = StirlingRows::new(kk as usize);
    rows.seek(n - 1);
    let prev = scaled_b_from_row(rows.row(), kk);
    rows.advance();
    let cur = scaled_b_from_row(rows.row(), kk);
    if cur == BigUint::zero() {
        return domain("B_{n,k} vanished");
    }
    Ok(BigRational::new(prev.into(), cur.into()))
}

/// `rat_n` in log-domain.
pub fn rat_log(n: u64, k: u64) -> Result<LogReal> {
    if n < 2 {
        return domain("rat_n needs n >= 2");
    }
    Ok(b_log(n - 1, k)? / b_log(n, k)?)
}

/// `rat_n` for the budget `k_n` of `sched`.
pub fn rat(n: u64, sched: &Schedule, cutoffs: Cutoffs) -> Result<Ratio> {
    let k = sched.k(n);
    if cutoffs.exact(n, k) {
        rat_exact(n, k).map(Ratio::Exact)
    } else {
        rat_log(n, k).map(Ratio::Approx)
    }
}

/// `rat_n` for an explicit budget.
pub fn rat_for_k(n: u64, k: u64, cutoffs: Cutoffs) -> Result<Ratio> {
    if cutoffs.exact(n, k) {
        rat_exact(n, k).map(Ratio::Exact)
    } else {
        rat_log(n, k).map(Ratio::Approx)
    }
}

/// Convenience: `rat_n` as `f64` with default cutoffs.
pub fn rat_f64(n: u64, k: u64) -> Result<f64> {
    rat_for_k(n, k, Cutoffs::default()).map(|r| r.to_f64())
}


#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn small_values() {
        assert_eq!(rat_exact(2, 2).unwrap(), BigRational::new(2.into(), 3.into()));
        assert_eq!(rat_exact(2, 1).unwrap(), BigRational::one());
        assert!(rat_exact(1, 1).is_err());
    }

    #[test]
    fn identity_regime_at_100() {
        let r = rat(100, &Schedule::Identity, Cutoffs::default()).unwrap().to_f64();
        let scaled = r * 100.0 / 100f64.ln();
        assert!((0.3..=3.0).contains(&scaled), "{scaled}");
    }

    #[test]
    fn exact_and_log_agree() {
        for n in [2u64, 3, 10, 57, 150, 300] {
            for k in [1u64, 2, (n as f64).sqrt() as u64, n / 2, n] {
                let k = k.max(1);
                let e = rational_to_f64(&rat_exact(n, k).unwrap());
                let l = rat_log(n, k).unwrap().to_f64();
                assert!(((e - l) / e).abs() < 1e-6, "n={n} k={k}: {e} vs {l}");
            }
        }
    }
}
