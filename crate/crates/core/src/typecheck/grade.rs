use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::numerics::{eps_value, parse_decimal, RoundingConfig};

/// A backward error bound `coeff * eps`, with `coeff` an exact nonnegative
/// rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grade(BigRational);

impl Grade {
    pub fn zero() -> Self {
        Grade(BigRational::zero())
    }

    pub fn eps() -> Self {
        Grade(BigRational::one())
    }

    pub fn half_eps() -> Self {
        Grade(BigRational::new(1.into(), 2.into()))
    }

    /// `n/d * eps`.
    pub fn ratio(n: i64, d: i64) -> Self {
        Grade::from_coeff(BigRational::new(n.into(), d.into())).expect("negative grade")
    }

    /// `None` for a negative coefficient.
    pub fn from_coeff(q: BigRational) -> Option<Self> {
        if q.is_negative() {
            None
        } else {
            Some(Grade(q))
        }
    }

    pub fn coeff(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, o: &Grade) -> Grade {
        Grade(&self.0 + &o.0)
    }

    /// `self - o`, if that is still a grade.
    pub fn checked_sub(&self, o: &Grade) -> Option<Grade> {
        Grade::from_coeff(&self.0 - &o.0)
    }

    /// Multiplies by a nonnegative integer.
    pub fn scale(&self, k: u64) -> Grade {
        Grade(&self.0 * BigRational::from_integer(BigInt::from(k)))
    }

    /// The bound as a real number under `cfg`.
    pub fn to_real(&self, cfg: &RoundingConfig) -> BigRational {
        &self.0 * eps_value(cfg)
    }

    /// Parses `0`, `eps`, `2 eps`, `3/2 eps`, `1.5eps` or a plain real such
    /// as `1.67e-16`. Plain reals are divided by `eps` under `cfg`.
    pub fn parse(text: &str, cfg: &RoundingConfig) -> Option<Grade> {
        let s = text.trim();
        let (coeff, scaled) = match s.strip_suffix("eps").or_else(|| s.strip_suffix('ε')) {
            Some(head) => {
                let head = head.trim().trim_end_matches('*').trim();
                if head.is_empty() {
                    (BigRational::one(), true)
                } else {
                    (parse_ratio(head)?, true)
                }
            }
            None => (parse_ratio(s)?, false),
        };
        let coeff = if scaled { coeff } else { coeff / eps_value(cfg) };
        Grade::from_coeff(coeff)
    }
}

fn parse_ratio(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n = parse_decimal(n.trim())?;
            let d = parse_decimal(d.trim())?;
            if d.is_zero() {
                None
            } else {
                Some(n / d)
            }
        }
        None => parse_decimal(s),
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = &self.0;
        if q.is_zero() {
            f.write_str("0")
        } else if q.is_one() {
            f.write_str("eps")
        } else if q.is_integer() {
            write!(f, "{} eps", q.numer())
        } else {
            write!(f, "{}/{} eps", q.numer(), q.denom())
        }
    }
}

impl Serialize for Grade {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        assert_eq!(Grade::zero().to_string(), "0");
        assert_eq!(Grade::eps().to_string(), "eps");
        assert_eq!(Grade::ratio(4, 2).to_string(), "2 eps");
        assert_eq!(Grade::ratio(3, 2).to_string(), "3/2 eps");
    }

    #[test]
    fn parse_forms() {
        let cfg = RoundingConfig::default();
        for (s, g) in [
            ("0", Grade::zero()),
            ("eps", Grade::eps()),
            ("2 eps", Grade::ratio(2, 1)),
            ("3/2 eps", Grade::ratio(3, 2)),
            ("1.5eps", Grade::ratio(3, 2)),
            ("5/2*eps", Grade::ratio(5, 2)),
        ] {
            assert_eq!(Grade::parse(s, &cfg), Some(g), "{s}");
        }
        assert_eq!(Grade::parse("-1 eps", &cfg), None);
        assert_eq!(Grade::parse("1/0 eps", &cfg), None);
        // a plain real is measured in units of eps
        let e = eps_value(&cfg);
        let g = Grade::parse("2e-16", &cfg).unwrap();
        assert_eq!(g.coeff() * e, parse_decimal("2e-16").unwrap());
    }
}
