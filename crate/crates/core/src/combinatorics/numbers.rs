//! Exact big-integer counting: Catalan numbers, Stirling numbers of the
//! second kind, class counts and the labelling weight `B_{n,k}`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{domain, Result};

/// Number of plane binary trees with `n` leaves (the `(n-1)`-th Catalan
/// number). Returns 0 for `n = 0`.
pub fn catalan(n: u64) -> BigUint {
    if n == 0 {
        return BigUint::zero();
    }
    let mut c = BigUint::one();
    for j in 1..n {
        c = c * BigUint::from(2 * (2 * j - 1)) / BigUint::from(j + 1);
    }
    c
}

/// Rows of the Stirling triangle `S(m, q)`, produced one at a time.
///
/// Only columns `0..=cap` are kept, so memory is `O(cap)` big integers.
#[derive(Debug, Clone)]
pub struct StirlingRows {
    m: u64,
    cap: usize,
    row: Vec<BigUint>,
}

impl StirlingRows {
    pub fn new(cap: usize) -> Self {
        StirlingRows {
            m: 0,
            cap,
            row: vec![BigUint::one()],
        }
    }

    /// Index `m` of the current row.
    pub fn index(&self) -> u64 {
        self.m
    }

    /// `S(m, q)` for `q` in `0..=min(m, cap)`.
    pub fn row(&self) -> &[BigUint] {
        &self.row
    }

    pub fn advance(&mut self) {
        let next_len = ((self.m + 1).min(self.cap as u64) as usize) + 1;
        let mut next = vec![BigUint::zero(); next_len];
        for q in 1..next_len {
            let mut v = BigUint::zero();
            if q < self.row.len() {
                v += &self.row[q] * BigUint::from(q as u64);
            }
            if q - 1 < self.row.len() {
                v += &self.row[q - 1];
            }
            next[q] = v;
        }
        self.m += 1;
        self.row = next;
    }

    /// Advance until the current row is `n`.
    pub fn seek(&mut self, n: u64) {
        assert!(n >= self.m, "StirlingRows only moves forward");
        while self.m < n {
            self.advance();
        }
    }

    /// `S(m, q)` of the current row, zero when out of range.
    pub fn get(&self, q: usize) -> BigUint {
        self.row.get(q).cloned().unwrap_or_default()
    }
}

/// Stirling number of the second kind `{n p}`; zero when `p > n`.
pub fn stirling2(n: u64, p: u64) -> BigUint {
    if p > n {
        return BigUint::zero();
    }
    let mut rows = StirlingRows::new(p as usize);
    rows.seek(n);
    rows.get(p as usize)
}

/// `T_n = C_n * sum_{p=1}^{k} {n p} 2^{2n-1-p}`: the number of equivalence
/// classes of size-`n` trees over at most `k` variables.
pub fn count_classes(n: u64, k: u64) -> Result<BigUint> {
    if n == 0 {
        return domain("size n must be at least 1");
    }
    if k == 0 {
        return domain("variable budget k must be at least 1");
    }
    let kk = k.min(n);
    let mut rows = StirlingRows::new(kk as usize);
    rows.seek(n);
    let mut sum = BigUint::zero();
    for p in 1..=kk {
        sum += rows.get(p as usize) << ((2 * n - 1 - p) as usize);
    }
    Ok(catalan(n) * sum)
}

/// `sum_{p=1}^{k} S(n, p) * 2^{k-p}` from a row, i.e. `2^k * B_{n,k}`.
pub(crate) fn scaled_b_from_row(row: &[BigUint], k: u64) -> BigUint {
    let mut acc = BigUint::zero();
    for p in 1..row.len().min(k as usize + 1) {
        acc += &row[p] << ((k - p as u64) as usize);
    }
    acc
}

/// `B_{n,k} = sum_{p=1}^{k} {n p} 2^{-p}`, exact. `B_{0,k} = 0`.
pub fn b_exact(n: u64, k: u64) -> Result<BigRational> {
    if k == 0 {
        return domain("variable budget k must be at least 1");
    }
    let kk = k.min(n.max(1));
    let mut rows = StirlingRows::new(kk as usize);
    rows.seek(n);
    let num = scaled_b_from_row(rows.row(), kk);
    Ok(BigRational::new(num.into(), (BigUint::one() << kk as usize).into()))
}

/// Checks `p^n/p! - (p-1)^n/(p-1)! <= {n p} <= p^n/p!` exactly for every
/// `p` in `1..=n`.
pub fn verify_bonferroni(n: u64) -> bool {
    if n == 0 {
        return true;
    }
    let mut rows = StirlingRows::new(n as usize);
    rows.seek(n);
    bonferroni_row_holds(n, rows.row())
}

/// Runs the Bonferroni check for every `n` in `1..=max_n`, sharing one pass
/// over the Stirling triangle. Returns the sizes that fail.
pub fn bonferroni_failures_upto(max_n: u64) -> Vec<u64> {
    let mut rows = StirlingRows::new(max_n as usize);
    let mut failures = Vec::new();
    for n in 1..=max_n {
        rows.advance();
        if !bonferroni_row_holds(n, rows.row()) {
            failures.push(n);
        }
    }
    failures
}

fn bonferroni_row_holds(n: u64, row: &[BigUint]) -> bool {
    // Multiply through by p!: p^n - p (p-1)^n <= p! S(n,p) <= p^n.
    let mut fact = BigUint::one();
    for p in 1..=n {
        fact *= BigUint::from(p);
        let s = row.get(p as usize).cloned().unwrap_or_default();
        let scaled = &fact * s;
        let upper = BigUint::from(p).pow(n as u32);
        let sub = BigUint::from(p) * BigUint::from(p - 1).pow(n as u32);
        if scaled > upper {
            return false;
        }
        if sub <= upper && scaled < &upper - &sub {
            return false;
        }
    }
    true
}

/// Exact `p^n / (p! 2^p)`.
pub fn a_term_exact(n: u64, p: u64) -> BigRational {
    let mut fact = BigUint::one();
    for i in 2..=p {
        fact *= BigUint::from(i);
    }
    BigRational::new(
        BigUint::from(p).pow(n as u32).into(),
        (fact << p as usize).into(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(1), big(1));
        assert_eq!(catalan(2), big(1));
        assert_eq!(catalan(4), big(5));
        // recurrence C_n = sum C_i C_{n-i}
        for n in 2..30u64 {
            let s: BigUint = (1..n).map(|i| catalan(i) * catalan(n - i)).sum();
            assert_eq!(catalan(n), s);
        }
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(1, 1), big(1));
        assert_eq!(stirling2(3, 2), big(3));
        assert_eq!(stirling2(4, 2), big(7));
        assert_eq!(stirling2(2, 5), big(0));
        assert_eq!(stirling2(0, 0), big(1));
        // row sums are Bell numbers
        let bell: BigUint = (0..=10).map(|p| stirling2(10, p)).sum();
        assert_eq!(bell, big(115_975));
    }

    #[test]
    fn class_counts() {
        assert_eq!(count_classes(1, 1).unwrap(), big(1));
        assert_eq!(count_classes(2, 2).unwrap(), big(6));
        assert_eq!(count_classes(3, 3).unwrap(), big(88));
        assert!(count_classes(3, 0).is_err());
        assert_eq!(count_classes(3, 7).unwrap(), count_classes(3, 3).unwrap());
    }

    #[test]
    fn b_values() {
        assert_eq!(b_exact(1, 1).unwrap(), rat(1, 2));
        assert_eq!(b_exact(2, 2).unwrap(), rat(3, 4));
        assert_eq!(b_exact(3, 2).unwrap(), rat(5, 4));
        assert_eq!(b_exact(0, 3).unwrap(), rat(0, 1));
    }

    #[test]
    fn bonferroni_small() {
        assert!(verify_bonferroni(1));
        assert!(verify_bonferroni(10));
        assert!(bonferroni_failures_upto(60).is_empty());
    }

    #[test]
    fn a_term_exact_values() {
        assert_eq!(a_term_exact(4, 2), rat(2, 1));
        assert_eq!(a_term_exact(4, 3), rat(81, 48));
        assert_eq!(a_term_exact(10, 4), rat(1_048_576, 384));
    }
}
