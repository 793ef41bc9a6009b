use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::threshold::m_threshold;
use crate::error::{Error, Result};

/// The variable budget `n -> k_n`.
///
/// Every family is clamped to `1 <= k_n <= n`.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Identity,
    Sqrt,
    Power(f64),
    NOverLn,
    Threshold,
    /// `k_1, k_2, ...`; sizes past the end reuse the last entry.
    Explicit(Vec<u64>),
}

impl Schedule {
    pub fn k(&self, n: u64) -> u64 {
        let raw = match self {
            Schedule::Identity => n,
            Schedule::Sqrt => isqrt(n),
            Schedule::Power(alpha) => (n as f64).powf(*alpha).floor() as u64,
            Schedule::NOverLn => {
                if n < 2 {
                    1
                } else {
                    (n as f64 / (n as f64).ln()).floor() as u64
                }
            }
            Schedule::Threshold => m_threshold(n),
            Schedule::Explicit(table) => {
                if table.is_empty() {
                    1
                } else {
                    table[((n as usize).max(1) - 1).min(table.len() - 1)]
                }
            }
        };
        raw.clamp(1, n.max(1))
    }

    /// Reads an explicit table: one integer per line, blank lines and
    /// `#` comments ignored.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Schedule> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let mut table = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: u64 = line
                .parse()
                .map_err(|_| Error::Parse(format!("schedule file line {}: `{line}`", i + 1)))?;
            table.push(v);
        }
        if table.is_empty() {
            return Err(Error::Parse("schedule file is empty".into()));
        }
        Ok(Schedule::Explicit(table))
    }

    /// Checks the schedule over `1..=max_n` and reports violations of
    /// monotonicity and growth. Warnings do not make the schedule unusable.
    pub fn check(&self, max_n: u64) -> Vec<String> {
        let mut warnings = Vec::new();
        let mut prev = 0;
        for n in 1..=max_n {
            let k = self.k(n);
            if k < prev {
                warnings.push(format!("k_n decreases at n={n} ({prev} -> {k})"));
                break;
            }
            prev = k;
        }
        if max_n >= 4 && self.k(max_n) <= self.k((max_n / 4).max(1)) {
            warnings.push(format!(
                "k_n does not grow over [{}, {max_n}] (degenerate schedule)",
                (max_n / 4).max(1)
            ));
        }
        warnings
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Schedule> {
        let s = s.trim();
        match s {
            "identity" => return Ok(Schedule::Identity),
            "sqrt" => return Ok(Schedule::Sqrt),
            "n_over_ln" => return Ok(Schedule::NOverLn),
            "threshold" => return Ok(Schedule::Threshold),
            _ => {}
        }
        if let Some(a) = s.strip_prefix("power:") {
            let alpha: f64 = a
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::Domain(format!("power exponent must lie in (0, 1], got {alpha}")));
            }
            return Ok(Schedule::Power(alpha));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Schedule::from_file(path);
        }
        Err(Error::Unknown {
            kind: "schedule",
            name: s.to_string(),
        })
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Identity => write!(f, "identity"),
            Schedule::Sqrt => write!(f, "sqrt"),
            Schedule::Power(a) => write!(f, "power:{a}"),
            Schedule::NOverLn => write!(f, "n_over_ln"),
            Schedule::Threshold => write!(f, "threshold"),
            Schedule::Explicit(t) => write!(f, "explicit[{}]", t.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        assert_eq!(Schedule::Identity.k(7), 7);
        assert_eq!(Schedule::Sqrt.k(1000), 31);
        assert_eq!(Schedule::Sqrt.k(1), 1);
        assert_eq!(Schedule::Power(0.5).k(100), 10);
        assert_eq!(Schedule::NOverLn.k(2), 2);
        assert_eq!(Schedule::Threshold.k(10), 4);
        assert_eq!(Schedule::Explicit(vec![1, 1, 5]).k(2), 1);
        assert_eq!(Schedule::Explicit(vec![1, 1, 5]).k(10), 5);
        assert_eq!(Schedule::Explicit(vec![9]).k(3), 3);
    }

    #[test]
    fn parsing() {
        assert_eq!("sqrt".parse::<Schedule>().unwrap(), Schedule::Sqrt);
        assert_eq!("power:0.5".parse::<Schedule>().unwrap(), Schedule::Power(0.5));
        assert!("power:2".parse::<Schedule>().is_err());
        assert!("bogus".parse::<Schedule>().is_err());
    }

    #[test]
    fn file_schedule() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        use std::io::Write;
        writeln!(f, "1\n2\n# c\n2\n3").unwrap();
        let s: Schedule = format!("file:{}", f.path().display()).parse().unwrap();
        assert_eq!(s.k(4), 3);
    }

    #[test]
    fn degenerate_schedule_is_flagged() {
        assert!(Schedule::Identity.check(100).is_empty());
        assert!(Schedule::Sqrt.check(1000).is_empty());
        assert!(!Schedule::Explicit(vec![3]).check(100).is_empty());
        assert!(!Schedule::Explicit(vec![1, 2, 3, 1]).check(10).is_empty());
    }
}
