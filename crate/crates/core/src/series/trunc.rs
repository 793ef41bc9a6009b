use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// A power series `sum_{i<=order} c_i z^i` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<BigRational>,
}

/// Binary operations supported by [`TruncSeries::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

impl TruncSeries {
    /// Pads with zeros or truncates `coeffs` to `order + 1` terms.
    pub fn new(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        TruncSeries { coeffs }
    }

    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        let coeffs = coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect();
        TruncSeries::new(coeffs, order)
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        TruncSeries::new(vec![BigRational::one()], order)
    }

    /// The series `z`.
    pub fn var(order: usize) -> Self {
        TruncSeries::new(vec![BigRational::zero(), BigRational::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Same series at a different truncation order.
    pub fn with_order(&self, order: usize) -> Self {
        TruncSeries::new(self.coeffs.clone(), order)
    }

    pub fn arith(&self, other: &TruncSeries, op: SeriesOp) -> Result<TruncSeries> {
        if self.order() != other.order() {
            return domain(format!(
                "series orders differ ({} vs {})",
                self.order(),
                other.order()
            ));
        }
        Ok(match op {
            SeriesOp::Add => self.zip(other, |a, b| a + b),
            SeriesOp::Sub => self.zip(other, |a, b| a - b),
            SeriesOp::Mul => self.mul_trunc(other),
        })
    }

    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.arith(other, SeriesOp::Add)
    }

    pub fn sub(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.arith(other, SeriesOp::Sub)
    }

    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.arith(other, SeriesOp::Mul)
    }

    pub fn scale(&self, c: &BigRational) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplies by `z^s`, dropping terms past the order.
    pub fn shift(&self, s: usize) -> TruncSeries {
        let order = self.order();
        let mut coeffs = vec![BigRational::zero(); s.min(order + 1)];
        coeffs.extend(self.coeffs.iter().take((order + 1).saturating_sub(s)).cloned());
        TruncSeries::new(coeffs, order)
    }

    fn zip(&self, other: &TruncSeries, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn mul_trunc(&self, other: &TruncSeries) -> TruncSeries {
        let order = self.order();
        // common denominators keep the inner loop in integers
        let (an, ad) = integerize(&self.coeffs);
        let (bn, bd) = integerize(&other.coeffs);
        let denom = BigInt::from(ad * bd);
        let coeffs = (0..=order)
            .map(|n| {
                let mut acc = BigInt::zero();
                for i in 0..=n {
                    if an[i].is_zero() || bn[n - i].is_zero() {
                        continue;
                    }
                    acc += &an[i] * &bn[n - i];
                }
                BigRational::new(acc, denom.clone())
            })
            .collect();
        TruncSeries { coeffs }
    }

    /// Multiplicative inverse by Newton iteration `b <- b (2 - a b)`.
    pub fn inverse(&self) -> Result<TruncSeries> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return domain("series with zero constant term has no inverse");
        }
        let order = self.order();
        let mut b = TruncSeries::new(vec![c0.recip()], 0);
        let mut prec = 0;
        while prec < order {
            prec = (2 * prec + 1).min(order);
            let a = self.with_order(prec);
            let b_ext = b.with_order(prec);
            let ab = a.mul_trunc(&b_ext);
            let two_minus = TruncSeries::one(prec).scale(&BigRational::from_integer(2.into()));
            let corr = two_minus.zip(&ab, |x, y| x - y);
            b = b_ext.mul_trunc(&corr);
        }
        Ok(b.with_order(order))
    }

    /// Integer power by repeated squaring. Negative powers go through
    /// [`TruncSeries::inverse`].
    pub fn powi(&self, e: i64) -> Result<TruncSeries> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = TruncSeries::one(self.order());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_trunc(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_trunc(&sq);
            }
        }
        Ok(acc)
    }

    /// `self^exponent` for a rational exponent.
    ///
    /// For `exponent = p/q` the `q`-th root of `self^p` is found by Newton
    /// iteration `y <- ((q-1) y + A y^{1-q}) / q`, doubling the precision
    /// each round. The constant term must have an exact rational power.
    pub fn power(&self, exponent: &BigRational) -> Result<TruncSeries> {
        let c0 = self.coeff(0).clone();
        if exponent.is_integer() {
            let e = exponent
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Capacity("series exponent too large".into()))?;
            if e < 0 && c0.is_zero() {
                return domain("negative power of a series with zero constant term");
            }
            return self.powi(e);
        }
        if c0.is_zero() {
            if exponent.is_negative() {
                return domain("negative power of a series with zero constant term");
            }
            return domain("fractional power of a series with zero constant term");
        }
        let p = exponent
            .numer()
            .to_i64()
            .ok_or_else(|| Error::Capacity("series exponent too large".into()))?;
        let q = exponent
            .denom()
            .to_u32()
            .ok_or_else(|| Error::Capacity("series exponent too large".into()))?;
        let y0 = rational_root(&c0.pow(p as i32), q).ok_or_else(|| {
            Error::Domain(format!("constant term {c0} has no exact rational power {exponent}"))
        })?;

        let order = self.order();
        let target = self.powi(p)?;
        let qf = BigRational::from_integer(q.into());
        let mut y = TruncSeries::new(vec![y0], 0);
        let mut prec = 0;
        while prec < order {
            prec = (2 * prec + 1).min(order);
            let a = target.with_order(prec);
            let y_ext = y.with_order(prec);
            let y_pow = y_ext.powi(1 - q as i64)?;
            let lhs = y_ext.scale(&BigRational::from_integer((q - 1).into()));
            let rhs = a.mul_trunc(&y_pow);
            y = lhs.zip(&rhs, |x, z| x + z).scale(&qf.recip());
        }
        Ok(y.with_order(order))
    }
}

fn integerize(coeffs: &[BigRational]) -> (Vec<BigInt>, BigUint) {
    let mut lcm = BigInt::one();
    for c in coeffs {
        if !c.denom().is_one() {
            lcm = lcm.lcm(c.denom());
        }
    }
    let nums = coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    (nums, lcm.magnitude().clone())
}

/// Exact rational `q`-th root of a positive rational, when it exists.
fn rational_root(x: &BigRational, q: u32) -> Option<BigRational> {
    if !x.is_positive() {
        return None;
    }
    let n = x.numer().magnitude().nth_root(q);
    let d = x.denom().magnitude().nth_root(q);
    let candidate = BigRational::new(BigInt::from(n), BigInt::from(d));
    (candidate.pow(q as i32) == *x).then_some(candidate)
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Binomial series `(1 + c z)^r` via `C(r, i) c^i`.
    fn binomial_series(c: i64, r: &BigRational, order: usize) -> Vec<BigRational> {
        let mut out = vec![BigRational::one()];
        let mut term = BigRational::one();
        for i in 1..=order {
            let i_r = BigRational::from_integer((i as i64).into());
            term = term * (r - (&i_r - BigRational::one())) / &i_r * BigRational::from_integer(c.into());
            out.push(term.clone());
        }
        out
    }

    #[test]
    fn products() {
        let a = TruncSeries::from_ints(&[1, 1], 2);
        let b = TruncSeries::from_ints(&[1, -1], 2);
        assert_eq!(a.mul(&b).unwrap(), TruncSeries::from_ints(&[1, 0, -1], 2));
        let z = TruncSeries::var(1);
        assert_eq!(z.mul(&z).unwrap(), TruncSeries::zero(1));
        assert!(a.add(&TruncSeries::one(3)).is_err());
    }

    #[test]
    fn square_root_matches_binomial_series() {
        let a = TruncSeries::from_ints(&[1, -8], 3);
        let s = a.power(&q(1, 2)).unwrap();
        assert_eq!(s, TruncSeries::from_ints(&[1, -4, -8, -32], 3));
        assert_eq!(s.coeffs(), &binomial_series(-8, &q(1, 2), 3)[..]);
        let long = TruncSeries::from_ints(&[1, -8], 40).power(&q(1, 2)).unwrap();
        assert_eq!(long.coeffs(), &binomial_series(-8, &q(1, 2), 40)[..]);
    }

    #[test]
    fn negative_half_powers() {
        let a = TruncSeries::from_ints(&[1, -4], 2);
        let s = a.power(&q(-3, 2)).unwrap();
        assert_eq!(s, TruncSeries::from_ints(&[1, 6, 30], 2));
        let long = TruncSeries::from_ints(&[1, -4], 30).power(&q(-5, 2)).unwrap();
        assert_eq!(long.coeffs(), &binomial_series(-4, &q(-5, 2), 30)[..]);
    }

    #[test]
    fn identity_power_and_errors() {
        let a = TruncSeries::from_ints(&[3, 1, 4, 1, 5], 4);
        assert_eq!(a.power(&BigRational::one()).unwrap(), a);
        let z = TruncSeries::var(3);
        assert!(z.power(&q(-1, 2)).is_err());
        assert!(z.power(&q(-1, 1)).is_err());
        assert!(TruncSeries::from_ints(&[2, 1], 3).power(&q(1, 2)).is_err());
        let four = TruncSeries::from_ints(&[4, 4, 1], 3).power(&q(1, 2)).unwrap();
        assert_eq!(four, TruncSeries::from_ints(&[2, 1], 3));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = TruncSeries::from_ints(&[2, -3, 0, 7, 1], 8);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), TruncSeries::one(8));
    }

    fn small_series() -> impl Strategy<Value = TruncSeries> {
        prop::collection::vec((-5i64..=5, 1i64..=4), 1..6).prop_map(|v| {
            let mut c: Vec<BigRational> = v.into_iter().map(|(n, d)| q(n, d)).collect();
            c[0] = BigRational::one();
            TruncSeries::new(c, 7)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn power_roundtrip(a in small_series(), which in 0usize..2) {
            let r = [q(1, 2), q(-3, 2)][which].clone();
            let back = a.power(&r).unwrap().power(&r.recip()).unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn power_multiplies_back(a in small_series()) {
            let s = a.power(&q(1, 3)).unwrap();
            prop_assert_eq!(s.powi(3).unwrap(), a);
        }
    }
}
