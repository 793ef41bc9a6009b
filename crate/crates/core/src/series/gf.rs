//! Generating functions of tree structures and of structures with pointed
//! S-pattern leaves.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::trunc::TruncSeries;
use crate::combinatorics::b_exact;
use crate::error::{domain, Result};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `I(z) = (1 - sqrt(1 - 8z)) / 4`, the structures counted by leaves with
/// both connectives.
pub fn tree_structure_gf(order: usize) -> Result<TruncSeries> {
    if order == 0 {
        return domain("order must be at least 1");
    }
    let root = TruncSeries::from_ints(&[1, -8], order).power(&q(1, 2))?;
    Ok(TruncSeries::one(order).sub(&root)?.scale(&q(1, 4)))
}

/// `u(z) = 1 - 4(z + I(z)^2) = 1 - 2z - 2I(z)`.
pub fn u_series(order: usize) -> Result<TruncSeries> {
    let i = tree_structure_gf(order)?;
    let lin = TruncSeries::from_ints(&[1, -2], order);
    lin.sub(&i.scale(&q(2, 1)))
}

/// `(prefactor, z power, u exponent)` of the `marks`-pointed series
/// `prefactor * z^marks * u^exponent`.
fn marked_shape(marks: u32) -> Result<(i64, BigRational)> {
    match marks {
        2 => Ok((1, q(-3, 2))),
        3 => Ok((2, q(-5, 2))),
        4 => Ok((5, q(-7, 2))),
        _ => domain(format!("marks must be 2, 3 or 4 (got {marks})")),
    }
}

/// Structures with `marks` distinct pointed S-pattern leaves.
pub fn marked_gf(order: usize, marks: u32) -> Result<TruncSeries> {
    let (pref, exp) = marked_shape(marks)?;
    if order < marks as usize {
        return domain(format!("order must be at least {marks}"));
    }
    let u = u_series(order)?;
    Ok(u.power(&exp)?.shift(marks as usize).scale(&q(pref, 1)))
}

/// Upper bound `DC` and the two overcount corrections `DC3`, `DC4` for the
/// number of simple tautologies of size `n` over at most `k` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DcCounts {
    pub dc: BigRational,
    pub dc3: BigRational,
    pub dc4: BigRational,
}

impl DcCounts {
    pub fn lower(&self) -> BigRational {
        &self.dc - &self.dc3 - &self.dc4
    }
}

fn b_or_zero(n: u64, k: u64) -> Result<BigRational> {
    if n == 0 {
        Ok(BigRational::zero())
    } else {
        b_exact(n, k)
    }
}

fn pow2(e: u64) -> BigRational {
    BigRational::from_integer(BigInt::one() << e as usize)
}

pub fn dc_counts(n: u64, k: u64) -> Result<DcCounts> {
    if n < 2 {
        return domain("dc_counts needs n >= 2");
    }
    if k == 0 || k > n {
        return domain(format!("need 1 <= k <= n (got k={k}, n={n})"));
    }
    let order = n as usize;
    let wide = order.max(4);
    let i2 = marked_gf(wide, 2)?;
    let i3 = marked_gf(wide, 3)?;
    let i4 = marked_gf(wide, 4)?;
    let b1 = b_or_zero(n - 1, k)?;
    let b2 = b_or_zero(n - 2, k)?;
    let dc = pow2(n - 1) * i2.coeff(order) * b1;
    let base = pow2(n - 2) * b2;
    let dc3 = q(3, 1) * &base * i3.coeff(order);
    let dc4 = q(6, 1) * &base * i4.coeff(order);
    Ok(DcCounts { dc, dc3, dc4 })
}

/// `n(x, y) = (1 - y - sqrt((1-y)^2 - 4x)) / 2`.
pub fn n_pattern_value(x: f64, y: f64) -> f64 {
    0.5 * (1.0 - y - ((1.0 - y).powi(2) - 4.0 * x).sqrt())
}

/// `s(x, y) = (1 - sqrt(1 - 4(x + y^2))) / 2`.
pub fn s_pattern_value(x: f64, y: f64) -> f64 {
    0.5 * (1.0 - (1.0 - 4.0 * (x + y * y)).sqrt())
}

/// Checks `n = x + n^2 + y n` and `s = x + s^2 + y^2` at every point.
pub fn pattern_gf_check(points: &[(f64, f64)]) -> Result<bool> {
    const TOL: f64 = 1e-12;
    for &(x, y) in points {
        let disc = (1.0 - y).powi(2) - 4.0 * x;
        if x < 0.0 || y < 0.0 || disc < -TOL || 1.0 - 4.0 * (x + y * y) < -TOL {
            return domain(format!("({x}, {y}) lies outside the analyticity domain"));
        }
        let disc = disc.max(0.0);
        let n = 0.5 * (1.0 - y - disc.sqrt());
        if (n - (x + n * n + y * n)).abs() > TOL {
            return Ok(false);
        }
        let s = 0.5 * (1.0 - (1.0 - 4.0 * (x + y * y)).max(0.0).sqrt());
        if (s - (x + s * s + y * y)).abs() > TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::catalan;

    /// S-leaf counts of every structure of size `n` (connectives included).
    fn s_leaf_counts(n: usize, memo: &mut Vec<Option<Vec<u64>>>) -> Vec<u64> {
        if let Some(v) = &memo[n] {
            return v.clone();
        }
        let out = if n == 1 {
            vec![1]
        } else {
            let mut out = Vec::new();
            for i in 1..n {
                let l = s_leaf_counts(i, memo);
                let r = s_leaf_counts(n - i, memo);
                for a in &l {
                    for b in &r {
                        out.push(a + b); // or-root
                        out.push(0); // and-root: both sides are placeholders
                    }
                }
            }
            out
        };
        memo[n] = Some(out.clone());
        out
    }

    fn binom(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn structure_coefficients() {
        let i = tree_structure_gf(60).unwrap();
        assert_eq!(i.coeff(0), &BigRational::zero());
        assert_eq!(i.coeff(1), &q(1, 1));
        assert_eq!(i.coeff(3), &q(8, 1));
        assert_eq!(i.coeff(4), &q(40, 1));
        for n in 1..=60u64 {
            let want = BigRational::from_integer(BigInt::from(catalan(n)) << (n - 1) as usize);
            assert_eq!(i.coeff(n as usize), &want);
        }
        let lhs = i.sub(&TruncSeries::var(60)).unwrap();
        let rhs = i.mul(&i).unwrap().scale(&q(2, 1));
        assert_eq!(lhs, rhs);
        assert_eq!(i.mul(&i).unwrap().with_order(4).coeff(2), &q(1, 1));
    }

    #[test]
    fn pointed_series_match_enumeration() {
        let mut memo = vec![None; 8];
        for marks in 2..=4u32 {
            let g = marked_gf(7, marks).unwrap();
            for n in 1..=7usize {
                let brute: u64 = s_leaf_counts(n, &mut memo)
                    .iter()
                    .map(|&c| binom(c, marks as u64))
                    .sum();
                assert_eq!(g.coeff(n), &q(brute as i64, 1), "marks={marks} n={n}");
            }
        }
        assert_eq!(marked_gf(4, 2).unwrap().coeff(2), &q(1, 1));
        assert!(marked_gf(3, 5).is_err());
    }

    #[test]
    fn dc_small() {
        let d = dc_counts(2, 2).unwrap();
        assert_eq!(d.dc, q(1, 1));
        assert_eq!(d.dc3, BigRational::zero());
        assert_eq!(d.dc4, BigRational::zero());
        assert!(dc_counts(1, 1).is_err());
        assert!(dc_counts(3, 4).is_err());
    }

    #[test]
    fn analytic_checks() {
        assert!(pattern_gf_check(&[(0.0, 0.0), (0.125, 0.25), (0.1, 0.2)]).unwrap());
        assert_eq!(n_pattern_value(0.0, 0.0), 0.0);
        assert!(pattern_gf_check(&[(1.0, 0.0)]).is_err());
        assert!(pattern_gf_check(&[(-0.1, 0.0)]).is_err());
    }
}
