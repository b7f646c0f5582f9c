//! Exact scalars: rationals, Gaussian rationals and the extended value `+∞`.
//!
//! Every quantity in the crate is an exact rational. Magnitudes of complex
//! values are only ever compared through their squared moduli, so no square
//! roots (and no rounding) appear anywhere.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;

/// Arbitrary-precision rational, always stored reduced with a positive denominator.
pub type ExactScalar = num_rational::BigRational;

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_scalar(text: &str) -> Result<ExactScalar, ModelError> {
    let trimmed = text.trim();
    let malformed = || ModelError::MalformedRational(text.to_string());
    if trimmed.is_empty() {
        return Err(malformed());
    }
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| malformed())?;
    let den = BigInt::from_str(den).map_err(|_| malformed())?;
    if den.is_zero() {
        return Err(malformed());
    }
    Ok(ExactScalar::new(num, den))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_scalar(value: &ExactScalar) -> String {
    value.to_string()
}

pub fn int(n: i64) -> ExactScalar {
    ExactScalar::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> ExactScalar {
    ExactScalar::new(BigInt::from(num), BigInt::from(den))
}

/// `2^{-k}`.
pub fn pow2_neg(k: u64) -> ExactScalar {
    ExactScalar::new(BigInt::one(), BigInt::one() << k)
}

/// serde adapter serializing an [`ExactScalar`] as its `"p/q"` string.
pub mod as_text {
    use super::*;

    pub fn serialize<S: Serializer>(value: &ExactScalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactScalar, D::Error> {
        let text = String::deserialize(d)?;
        parse_scalar(&text).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for `Vec<ExactScalar>`.
pub mod vec_as_text {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[ExactScalar], s: S) -> Result<S::Ok, S::Error> {
        let texts: Vec<String> = values.iter().map(format_scalar).collect();
        texts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ExactScalar>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_scalar(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// serde adapter for `Vec<(ExactScalar, ExactScalar)>` (serialize only).
pub mod pairs_as_text {
    use super::*;

    pub fn serialize<S: Serializer>(
        values: &[(ExactScalar, ExactScalar)],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let texts: Vec<[String; 2]> = values
            .iter()
            .map(|(a, b)| [format_scalar(a), format_scalar(b)])
            .collect();
        texts.serialize(s)
    }
}

/// A complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: ExactScalar,
    pub im: ExactScalar,
}

impl GaussianRational {
    pub fn new(re: ExactScalar, im: ExactScalar) -> Self {
        Self { re, im }
    }

    pub fn real(re: ExactScalar) -> Self {
        Self {
            re,
            im: ExactScalar::zero(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(int(re), int(im))
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `re² + im²`.
    pub fn norm_sqr(&self) -> ExactScalar {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `|self - other|²`.
    pub fn dist_sqr(&self, other: &Self) -> ExactScalar {
        (self - other).norm_sqr()
    }

    /// `["re", "im"]` text pair used by the observable schema.
    pub fn to_text_pair(&self) -> [String; 2] {
        [format_scalar(&self.re), format_scalar(&self.im)]
    }

    pub fn from_text_pair(pair: &[String]) -> Result<Self, ModelError> {
        match pair {
            [re, im] => Ok(Self::new(parse_scalar(re)?, parse_scalar(im)?)),
            [re] => Ok(Self::real(parse_scalar(re)?)),
            _ => Err(ModelError::MalformedRational(pair.join(","))),
        }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_text_pair().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pair = Vec::<String>::deserialize(d)?;
        Self::from_text_pair(&pair).map_err(serde::de::Error::custom)
    }
}

/// A rational or the distinguished `+∞`, ordered above every rational.
///
/// Only comparisons are defined; there is deliberately no arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended {
    Finite(ExactScalar),
    Infinity,
}

impl Extended {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn finite(&self) -> Option<&ExactScalar> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinity => None,
        }
    }

    /// `self > t` for a rational `t`.
    pub fn exceeds(&self, t: &ExactScalar) -> bool {
        match self {
            Extended::Finite(v) => v > t,
            Extended::Infinity => true,
        }
    }

    /// Minimum over an iterator; `+∞` when empty.
    pub fn min_of<I: IntoIterator<Item = ExactScalar>>(values: I) -> Self {
        values
            .into_iter()
            .min()
            .map_or(Extended::Infinity, Extended::Finite)
    }
}

impl From<ExactScalar> for Extended {
    fn from(v: ExactScalar) -> Self {
        Extended::Finite(v)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Extended {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" => Ok(Extended::Infinity),
            other => parse_scalar(other).map(Extended::Finite),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
