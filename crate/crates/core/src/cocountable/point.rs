use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of `[0, 1]`, held as an exact rational so that set membership
/// never depends on float rounding.
///
/// Labels parse from terminating decimals (`"0.25"`) or fractions
/// (`"1/3"`). Reserved tail points are `p_n = 1/(n+2)` for `n >= 1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(BigRational);

impl Point {
    pub fn parse(label: &str) -> Result<Self> {
        let bad = || Error::InvalidPoint(label.to_string());
        let s = label.trim();
        let r = if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = parse_digits(num).ok_or_else(bad)?;
            let den: BigInt = parse_digits(den).ok_or_else(bad)?;
            if den.is_zero() {
                return Err(bad());
            }
            BigRational::new(num, den)
        } else {
            let (int, frac) = s.split_once('.').unwrap_or((s, ""));
            if int.is_empty() && frac.is_empty() {
                return Err(bad());
            }
            let int: BigInt = if int.is_empty() {
                BigInt::zero()
            } else {
                parse_digits(int).ok_or_else(bad)?
            };
            let frac_val: BigInt = if frac.is_empty() {
                BigInt::zero()
            } else {
                parse_digits(frac).ok_or_else(bad)?
            };
            let scale = num_traits::pow(BigInt::from(10u8), frac.len());
            BigRational::new(int * &scale + frac_val, scale)
        };
        if r.is_negative() || r > BigRational::one() {
            return Err(bad());
        }
        Ok(Self(r))
    }

    /// Reserved tail point `p_n = 1/(n+2)`.
    pub fn reserved(n: usize) -> Self {
        assert!(n >= 1, "tail indices start at 1");
        Self(BigRational::new(BigInt::one(), BigInt::from(n + 2)))
    }

    /// `Some(n)` when this is the reserved point `p_n`.
    pub fn reserved_index(&self) -> Option<usize> {
        if self.0.numer().is_one() {
            let d = self.0.denom().to_usize()?;
            (d >= 3).then(|| d - 2)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Canonical label: a terminating decimal when one exists, else `a/b`.
    pub fn label(&self) -> String {
        let num = self.0.numer();
        let den = self.0.denom();
        let mut d = den.clone();
        let (mut twos, mut fives) = (0usize, 0usize);
        let two = BigInt::from(2u8);
        let five = BigInt::from(5u8);
        while (&d % &two).is_zero() {
            d /= &two;
            twos += 1;
        }
        while (&d % &five).is_zero() {
            d /= &five;
            fives += 1;
        }
        if !d.is_one() {
            return format!("{num}/{den}");
        }
        let k = twos.max(fives);
        let scaled = num * num_traits::pow(BigInt::from(10u8), k) / den;
        if k == 0 {
            return scaled.to_string();
        }
        let digits = format!("{:0>width$}", scaled.to_string(), width = k + 1);
        let (int, frac) = digits.split_at(digits.len() - k);
        format!("{int}.{frac}")
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for Point {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({})", self.label())
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Point::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_and_fraction_labels_agree() {
        assert_eq!(Point::parse("0.25").unwrap(), Point::parse("1/4").unwrap());
        assert_eq!(Point::parse("0.250").unwrap(), Point::parse(".25").unwrap());
        assert_eq!(Point::parse("1").unwrap().label(), "1");
        assert_eq!(Point::parse("0").unwrap().label(), "0");
        assert_eq!(Point::parse("0.050").unwrap().label(), "0.05");
        assert_eq!(Point::parse("2/6").unwrap().label(), "1/3");
    }

    #[test]
    fn rejects_out_of_range_and_garbage() {
        for bad in ["1.5", "-0.1", "abc", "", ".", "1/0", "0.5e3", "3/2"] {
            assert!(Point::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn reserved_grid() {
        assert_eq!(Point::reserved(2), Point::parse("0.25").unwrap());
        assert_eq!(Point::reserved(1).label(), "1/3");
        assert_eq!(Point::parse("0.2").unwrap().reserved_index(), Some(3));
        assert_eq!(Point::parse("0.5").unwrap().reserved_index(), None);
        assert_eq!(Point::parse("1").unwrap().reserved_index(), None);
        assert_eq!(Point::parse("0.3").unwrap().reserved_index(), None);
    }

    #[test]
    fn label_round_trips() {
        for l in ["0.125", "1/7", "0.333", "0.999", "3/11"] {
            let p = Point::parse(l).unwrap();
            assert_eq!(Point::parse(&p.label()).unwrap(), p);
        }
    }
}
