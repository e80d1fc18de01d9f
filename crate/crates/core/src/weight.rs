//! Exact nonnegative edge weights.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A nonnegative rational edge weight.
///
/// Serialized as a JSON integer when the denominator is 1 and as a `"p/q"`
/// string otherwise. Decimal JSON numbers are parsed exactly from their
/// textual form.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(Ratio<u64>);

impl Weight {
    pub const ZERO: Weight = Weight(Ratio::new_raw(0, 1));
    pub const ONE: Weight = Weight(Ratio::new_raw(1, 1));

    pub fn new(numer: u64, denom: u64) -> Result<Self, Error> {
        if denom == 0 {
            return Err(Error::Parse("weight with zero denominator".into()));
        }
        Ok(Weight(Ratio::new(numer, denom)))
    }

    pub fn integer(v: u64) -> Self {
        Weight(Ratio::from_integer(v))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    pub fn as_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl std::ops::Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl std::iter::Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, |a, b| a + b)
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid weight `{s}`"));
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse::<u64>().map_err(|_| bad())?;
            let q = q.trim().parse::<u64>().map_err(|_| bad())?;
            return Weight::new(p, q);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let int = if int.is_empty() { 0 } else { int.parse::<u64>().map_err(|_| bad())? };
            let denom = 10u64.pow(frac.len() as u32);
            let frac = frac.parse::<u64>().map_err(|_| bad())?;
            let numer = int
                .checked_mul(denom)
                .and_then(|v| v.checked_add(frac))
                .ok_or_else(bad)?;
            return Weight::new(numer, denom);
        }
        s.parse::<u64>().map(Weight::integer).map_err(|_| bad())
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.denom() == 1 {
            serializer.serialize_u64(self.numer())
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}

struct WeightVisitor;

impl<'de> Visitor<'de> for WeightVisitor {
    type Value = Weight;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a nonnegative number or a \"p/q\" string")
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Weight, E> {
        Ok(Weight::integer(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Weight, E> {
        u64::try_from(v)
            .map(Weight::integer)
            .map_err(|_| E::custom("negative weight"))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Weight, E> {
        if !(v.is_finite() && v >= 0.0) {
            return Err(E::custom("weight must be finite and nonnegative"));
        }
        // Shortest round-tripping decimal form, parsed exactly.
        format!("{v:?}").parse().map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Weight, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(WeightVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_decimals_and_fractions() {
        assert_eq!("7".parse::<Weight>().unwrap(), Weight::integer(7));
        assert_eq!("1.5".parse::<Weight>().unwrap(), Weight::new(3, 2).unwrap());
        assert_eq!("6/4".parse::<Weight>().unwrap(), Weight::new(3, 2).unwrap());
        assert!("1/0".parse::<Weight>().is_err());
        assert!("-3".parse::<Weight>().is_err());
    }

    #[test]
    fn json_forms() {
        let w: Weight = serde_json::from_str("0.1").unwrap();
        assert_eq!(w, Weight::new(1, 10).unwrap());
        assert_eq!(serde_json::to_string(&w).unwrap(), "\"1/10\"");
        let w: Weight = serde_json::from_str("12").unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), "12");
    }

    #[test]
    fn ordering_is_exact() {
        let a = Weight::new(1, 3).unwrap();
        let b = Weight::new(333_333, 1_000_000).unwrap();
        assert!(b < a);
    }
}
