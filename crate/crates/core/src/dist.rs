//! Exact non-negative rational distances.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A non-negative exact rational distance.
///
/// All comparisons and arithmetic are exact. Values are always kept in
/// lowest terms, so two equal distances have identical representations.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Dist(BigRational);

impl Dist {
    pub fn zero() -> Self {
        Dist(BigRational::zero())
    }

    pub fn from_int(value: u64) -> Self {
        Dist(BigRational::from_integer(BigInt::from(value)))
    }

    /// `numer / denom`. Fails on a zero denominator.
    pub fn ratio(numer: u64, denom: u64) -> Result<Self, Error> {
        if denom == 0 {
            return Err(Error::Parse(format!("zero denominator in {numer}/{denom}")));
        }
        Ok(Dist(BigRational::new(BigInt::from(numer), BigInt::from(denom))))
    }

    /// Wraps a rational, rejecting negative values.
    pub fn from_rational(value: BigRational) -> Result<Self, Error> {
        if value.is_negative() {
            return Err(Error::NegativeDistance(value.to_string()));
        }
        Ok(Dist(value))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The value as a machine integer, if it is one and fits.
    pub fn to_u64(&self) -> Option<u64> {
        if self.0.is_integer() {
            self.0.numer().to_u64()
        } else {
            None
        }
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        // Non-negative, so truncating division is flooring division.
        self.0.numer().div_floor(self.0.denom())
    }

    /// Least integer `r` with `r > self`, i.e. `floor(self) + 1`.
    ///
    /// This is the strict-threshold rule used by r-chains: an edge of
    /// length `q` is usable at scale `r` iff `q < r`.
    pub fn strict_ceiling(&self) -> Dist {
        Dist(BigRational::from_integer(self.floor() + BigInt::one()))
    }

    /// Half of the value.
    pub fn half(&self) -> Dist {
        Dist(&self.0 / BigRational::from_integer(BigInt::from(2)))
    }
}

impl From<u64> for Dist {
    fn from(value: u64) -> Self {
        Dist::from_int(value)
    }
}

impl Add for &Dist {
    type Output = Dist;
    fn add(self, rhs: &Dist) -> Dist {
        Dist(&self.0 + &rhs.0)
    }
}

impl Add for Dist {
    type Output = Dist;
    fn add(self, rhs: Dist) -> Dist {
        Dist(self.0 + rhs.0)
    }
}

impl Mul for &Dist {
    type Output = Dist;
    fn mul(self, rhs: &Dist) -> Dist {
        Dist(&self.0 * &rhs.0)
    }
}

/// Saturating difference: `max(self - rhs, 0)`.
impl Sub for &Dist {
    type Output = Dist;
    fn sub(self, rhs: &Dist) -> Dist {
        if rhs >= self {
            Dist::zero()
        } else {
            Dist(&self.0 - &rhs.0)
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_natural(token: &str, whole: &str) -> Result<BigInt, Error> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!(
            "malformed distance token {whole:?}: expected an integer or p/q"
        )));
    }
    BigInt::parse_bytes(token.as_bytes(), 10)
        .ok_or_else(|| Error::Parse(format!("malformed distance token {whole:?}")))
}

/// Accepts `"7"` and `"3/2"`. Decimal points, exponents, signs and
/// whitespace inside the token are rejected.
impl FromStr for Dist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let token = s.trim();
        if token.starts_with('-') {
            return Err(Error::NegativeDistance(token.to_string()));
        }
        match token.split_once('/') {
            None => Ok(Dist(BigRational::from_integer(parse_natural(token, s)?))),
            Some((p, q)) => {
                let numer = parse_natural(p, s)?;
                let denom = parse_natural(q, s)?;
                if denom.sign() == Sign::NoSign {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(Dist(BigRational::new(numer, denom)))
            }
        }
    }
}

/// Integers that fit in `u64` are written as JSON numbers, everything
/// else as a `"p/q"` string.
impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.to_u64() {
            Some(v) => serializer.serialize_u64(v),
            None => serializer.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json::Value::deserialize(deserializer)?;
        match value {
            serde_json::Value::String(s) => s.parse().map_err(D::Error::custom),
            serde_json::Value::Number(n) => match n.as_u64() {
                Some(v) => Ok(Dist::from_int(v)),
                None => Err(D::Error::custom(format!(
                    "distance {n} is not a non-negative integer; write rationals as \"p/q\""
                ))),
            },
            other => Err(D::Error::custom(format!("expected a distance, found {other}"))),
        }
    }
}
