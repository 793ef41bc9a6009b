use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

/// A non-negative real stored as its natural logarithm.
///
/// Used for quantities such as `p^n / (p! 2^p)` that overflow `f64` long
/// before the sizes of interest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogReal {
    log_value: f64,
    is_zero: bool,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        log_value: f64::NEG_INFINITY,
        is_zero: true,
    };
    pub const ONE: LogReal = LogReal {
        log_value: 0.0,
        is_zero: false,
    };

    pub fn from_ln(log_value: f64) -> Self {
        if log_value == f64::NEG_INFINITY {
            LogReal::ZERO
        } else {
            LogReal {
                log_value,
                is_zero: false,
            }
        }
    }

    /// Panics on negative or NaN input.
    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0, "LogReal holds non-negative values, got {x}");
        if x == 0.0 {
            LogReal::ZERO
        } else {
            LogReal::from_ln(x.ln())
        }
    }

    /// Natural log; `-inf` for zero.
    pub fn ln(self) -> f64 {
        if self.is_zero {
            f64::NEG_INFINITY
        } else {
            self.log_value
        }
    }

    pub fn is_zero(self) -> bool {
        self.is_zero
    }

    pub fn to_f64(self) -> f64 {
        if self.is_zero {
            0.0
        } else {
            self.log_value.exp()
        }
    }

    /// Stable log-sum-exp over an iterator.
    pub fn sum<I: IntoIterator<Item = LogReal>>(items: I) -> LogReal {
        let items: Vec<f64> = items
            .into_iter()
            .filter(|x| !x.is_zero)
            .map(|x| x.log_value)
            .collect();
        log_sum_exp(&items)
    }

    pub fn powi(self, e: i32) -> LogReal {
        if self.is_zero {
            if e == 0 {
                LogReal::ONE
            } else {
                LogReal::ZERO
            }
        } else {
            LogReal::from_ln(self.log_value * e as f64)
        }
    }
}

pub(crate) fn log_sum_exp(logs: &[f64]) -> LogReal {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogReal::ZERO;
    }
    let s: f64 = logs.iter().map(|&l| (l - max).exp()).sum();
    LogReal::from_ln(max + s.ln())
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, rhs: LogReal) -> LogReal {
        if self.is_zero {
            return rhs;
        }
        if rhs.is_zero {
            return self;
        }
        let (hi, lo) = if self.log_value >= rhs.log_value {
            (self.log_value, rhs.log_value)
        } else {
            (rhs.log_value, self.log_value)
        };
        LogReal::from_ln(hi + (lo - hi).exp().ln_1p())
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        if self.is_zero || rhs.is_zero {
            LogReal::ZERO
        } else {
            LogReal::from_ln(self.log_value + rhs.log_value)
        }
    }
}

impl Div for LogReal {
    type Output = LogReal;
    /// Panics when dividing by zero.
    fn div(self, rhs: LogReal) -> LogReal {
        assert!(!rhs.is_zero, "LogReal division by zero");
        if self.is_zero {
            LogReal::ZERO
        } else {
            LogReal::from_ln(self.log_value - rhs.log_value)
        }
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero, other.is_zero) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            _ => self.log_value.partial_cmp(&other.log_value),
        }
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            write!(f, "0")
        } else {
            write!(f, "exp({})", self.log_value)
        }
    }
}
