//! Dual-mode probability arithmetic.
//!
//! Every quantity in this crate is a [`Scalar`]: either an exact rational
//! (arbitrary-precision numerator and denominator) or an `f64`. Exact mode is
//! the default everywhere; it is what makes results such as tail masses and
//! grid classifications reproducible bit for bit. Arithmetic between two
//! exact scalars stays exact; as soon as a float operand is involved the
//! result demotes to float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative tolerance under which two float-mode values count as tied.
pub const FLOAT_TIE_TOLERANCE: f64 = 1e-12;

/// An exact rational or a double-precision float.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    /// Exact rational from an integer numerator and denominator.
    pub fn exact(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        Scalar::Exact(r)
    }

    /// Float-mode scalar. The value must be finite.
    pub fn from_f64(value: f64) -> Self {
        debug_assert!(value.is_finite());
        Scalar::Float(value)
    }

    /// The exact rational equal to a finite `f64` (every finite float is a
    /// dyadic rational).
    pub fn exact_from_f64(value: f64) -> Option<Self> {
        BigRational::from_float(value).map(Scalar::Exact)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(f) => *f,
        }
    }

    /// The exact rational value, converting float-mode values through their
    /// dyadic representation.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Scalar::Exact(r) => r.clone(),
            Scalar::Float(f) => BigRational::from_float(*f)
                .unwrap_or_else(|| panic!("non-finite float {f} has no rational value")),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(f) => *f == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(f) => *f < 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(f) => Scalar::Float(f.abs()),
        }
    }

    /// Nonnegative integer power, with the convention `x^0 = 1`.
    pub fn pow(&self, exp: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                if exp == 0 {
                    Scalar::one()
                } else {
                    Scalar::Exact(r.pow(exp as i32))
                }
            }
            Scalar::Float(f) => Scalar::Float(f.powi(exp as i32)),
        }
    }

    /// `self <= other`, treating float-mode values within a relative
    /// [`FLOAT_TIE_TOLERANCE`] as tied. Exact pairs compare exactly.
    pub fn le_or_tied(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a <= b,
            _ => {
                let a = self.to_f64();
                let b = other.to_f64();
                a <= b || (a - b).abs() <= FLOAT_TIE_TOLERANCE * a.abs().max(b.abs())
            }
        }
    }

    /// `|self - other| <= tolerance`.
    pub fn within(&self, other: &Scalar, tolerance: &Scalar) -> bool {
        let diff = (self - other).abs();
        diff <= *tolerance
    }

    /// Exact decimal expansion, when the reduced denominator divides a power
    /// of ten. Integers render without a decimal point.
    pub fn decimal_string(&self) -> Option<String> {
        let Scalar::Exact(r) = self else {
            return None;
        };
        let num = r.numer();
        let den = r.denom();
        let mut twos = 0u32;
        let mut fives = 0u32;
        let mut rest = den.clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        while (&rest % &two).is_zero() {
            rest /= &two;
            twos += 1;
        }
        while (&rest % &five).is_zero() {
            rest /= &five;
            fives += 1;
        }
        if !rest.is_one() {
            return None;
        }
        let digits = twos.max(fives);
        if digits == 0 {
            return Some(num.to_string());
        }
        let scaled = (num * BigInt::from(10u32).pow(digits) / den).abs();
        let mut body = scaled.to_string();
        let width = digits as usize + 1;
        if body.len() < width {
            body = format!("{:0>width$}", body);
        }
        let split = body.len() - digits as usize;
        let mut out = String::new();
        if num.is_negative() {
            out.push('-');
        }
        out.push_str(&body[..split]);
        let frac = body[split..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        Some(out)
    }

    /// `"num/den"` for exact values (integers render bare), `None` for floats.
    pub fn fraction_string(&self) -> Option<String> {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    Some(r.numer().to_string())
                } else {
                    Some(format!("{}/{}", r.numer(), r.denom()))
                }
            }
            Scalar::Float(_) => None,
        }
    }

    /// Rounded two-decimal presentation, a display view only.
    pub fn two_decimals(&self) -> String {
        format!("{:.2}", self.to_f64())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => match self.decimal_string() {
                Some(d) => write!(f, "{d}"),
                None => write!(f, "{}/{}", r.numer(), r.denom()),
            },
            Scalar::Float(v) => write!(f, "{v}"),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }

        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    fn from_bigint(value: &BigInt) -> Self {
        match value.to_i64() {
            Some(v) => IntRepr::Small(v),
            None => IntRepr::Big(value.to_string()),
        }
    }

    fn to_bigint(&self) -> std::result::Result<BigInt, String> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(*v)),
            IntRepr::Big(s) => BigInt::from_str(s).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RatioRepr {
    num: IntRepr,
    den: IntRepr,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Ratio(RatioRepr),
    Decimal(String),
}

// Exact values serialize as `{"num": n, "den": d}` (components beyond the
// i64 range become decimal strings); float values serialize as decimal
// strings so the JSON layer never re-rounds them.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => RatioRepr {
                num: IntRepr::from_bigint(r.numer()),
                den: IntRepr::from_bigint(r.denom()),
            }
            .serialize(serializer),
            Scalar::Float(f) => serializer.serialize_str(&format!("{f}")),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match ScalarRepr::deserialize(deserializer)? {
            ScalarRepr::Ratio(r) => {
                let num = r.num.to_bigint().map_err(D::Error::custom)?;
                let den = r.den.to_bigint().map_err(D::Error::custom)?;
                if den.is_zero() {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(Scalar::Exact(BigRational::new(num, den)))
            }
            ScalarRepr::Decimal(s) => {
                let f: f64 = s.parse().map_err(D::Error::custom)?;
                if !f.is_finite() {
                    return Err(D::Error::custom("non-finite float"));
                }
                Ok(Scalar::Float(f))
            }
        }
    }
}

/// Parses `"3/5"`, `"0.6"`, or `"2"` into an exact scalar.
pub fn parse_exact(input: &str) -> Result<Scalar> {
    let s = input.trim();
    let invalid = |message: &str| Error::ParseNumber {
        input: input.to_string(),
        message: message.to_string(),
    };
    if s.is_empty() {
        return Err(invalid("empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| invalid("bad numerator"))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| invalid("bad denominator"))?;
        if den.is_zero() {
            return Err(invalid("zero denominator"));
        }
        return Ok(Scalar::Exact(BigRational::new(num, den)));
    }
    let (body, negative) = match s.strip_prefix('-') {
        Some(rest) => (rest, true),
        None => (s, false),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(invalid("no digits"));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(invalid("expected digits, a decimal point, or num/den"));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|_| invalid("bad digits"))?;
    if negative {
        num = -num;
    }
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(Scalar::Exact(BigRational::new(num, den)))
}

/// A probability: a [`Scalar`] constrained to `[0, 1]`.
#[derive(Clone, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Prob(Scalar);

impl Prob {
    pub fn new(value: Scalar) -> Result<Self> {
        let ok = match &value {
            Scalar::Exact(r) => !r.is_negative() && *r <= BigRational::one(),
            Scalar::Float(f) => f.is_finite() && (0.0..=1.0).contains(f),
        };
        if ok {
            Ok(Prob(value))
        } else {
            Err(Error::ProbabilityOutOfRange {
                value: value.to_string(),
            })
        }
    }

    /// Exact probability `num/den`.
    pub fn exact(num: i64, den: i64) -> Result<Self> {
        Prob::new(Scalar::exact(num, den))
    }

    /// Float-mode probability.
    pub fn from_f64(value: f64) -> Result<Self> {
        Prob::new(Scalar::from_f64(value))
    }

    pub fn zero() -> Self {
        Prob(Scalar::zero())
    }

    pub fn one() -> Self {
        Prob(Scalar::one())
    }

    pub fn half() -> Self {
        Prob(Scalar::exact(1, 2))
    }

    /// Parses an exact probability from `"1/2"` or `"0.5"` form.
    pub fn parse(input: &str) -> Result<Self> {
        Prob::new(parse_exact(input)?)
    }

    pub fn value(&self) -> &Scalar {
        &self.0
    }

    pub fn into_scalar(self) -> Scalar {
        self.0
    }

    pub fn is_exact(&self) -> bool {
        self.0.is_exact()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// `1 - p`, staying in the same mode.
    pub fn complement(&self) -> Prob {
        Prob(&Scalar::one() - &self.0)
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The default equality tolerance: exactly zero in rational mode, `1e-12`
/// in float mode.
pub fn default_tolerance(exact: bool) -> Scalar {
    if exact {
        Scalar::zero()
    } else {
        Scalar::from_f64(1e-12)
    }
}

/// A closed interval with `lo <= hi`. Endpoints may exceed 1 (humanness
/// ratios do), so this is an interval of scalars, not probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: Scalar,
    hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvertedBounds {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(value: Scalar) -> Self {
        Interval {
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    /// Smallest interval containing both operands.
    pub fn hull(&self, other: &Interval) -> Interval {
        let lo = if self.lo <= other.lo {
            self.lo.clone()
        } else {
            other.lo.clone()
        };
        let hi = if self.hi >= other.hi {
            self.hi.clone()
        } else {
            other.hi.clone()
        };
        Interval { lo, hi }
    }

    /// Maps `[a, b]` to `[1-b, 1-a]`.
    pub fn complement(&self) -> Interval {
        Interval {
            lo: &Scalar::one() - &self.hi,
            hi: &Scalar::one() - &self.lo,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Scalar::exact(1, 2);
        let b = Scalar::exact(1, 3);
        let sum = &a + &b;
        assert!(sum.is_exact());
        assert_eq!(sum, Scalar::exact(5, 6));
    }

    #[test]
    fn float_contaminates() {
        let a = Scalar::exact(1, 2);
        let b = Scalar::from_f64(0.25);
        assert!(!(&a + &b).is_exact());
        assert_eq!((&a + &b).to_f64(), 0.75);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(
            Scalar::exact(11, 512).decimal_string().unwrap(),
            "0.021484375"
        );
        assert_eq!(Scalar::exact(51, 50).decimal_string().unwrap(), "1.02");
        assert_eq!(Scalar::exact(1, 2).decimal_string().unwrap(), "0.5");
        assert_eq!(Scalar::exact(3, 1).decimal_string().unwrap(), "3");
        assert_eq!(Scalar::exact(0, 1).decimal_string().unwrap(), "0");
        assert_eq!(Scalar::exact(1, 3).decimal_string(), None);
        assert_eq!(Scalar::exact(-1, 4).decimal_string().unwrap(), "-0.25");
    }

    #[test]
    fn display_prefers_decimal() {
        assert_eq!(Scalar::exact(11, 512).to_string(), "0.021484375");
        assert_eq!(Scalar::exact(1, 3).to_string(), "1/3");
        assert_eq!(Scalar::from_f64(0.5).to_string(), "0.5");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_exact("1/2").unwrap(), Scalar::exact(1, 2));
        assert_eq!(parse_exact("0.5").unwrap(), Scalar::exact(1, 2));
        assert_eq!(parse_exact("0.021484375").unwrap(), Scalar::exact(11, 512));
        assert_eq!(parse_exact("1").unwrap(), Scalar::one());
        assert_eq!(parse_exact("10/30").unwrap(), Scalar::exact(1, 3));
        assert!(parse_exact("1/0").is_err());
        assert!(parse_exact("abc").is_err());
        assert!(parse_exact("1e-3").is_err());
    }

    #[test]
    fn prob_range_checked() {
        assert!(Prob::exact(1, 2).is_ok());
        assert!(Prob::exact(3, 2).is_err());
        assert!(Prob::exact(-1, 2).is_err());
        assert!(Prob::from_f64(1.0000001).is_err());
    }

    #[test]
    fn complement_closure() {
        let p = Prob::exact(3, 10).unwrap();
        assert_eq!(p.value() + p.complement().value(), Scalar::one());
        let q = Prob::from_f64(0.3).unwrap();
        assert!((q.to_f64() + q.complement().to_f64() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn tie_comparison() {
        assert!(Scalar::exact(1, 2).le_or_tied(&Scalar::exact(1, 2)));
        assert!(!Scalar::exact(2, 3).le_or_tied(&Scalar::exact(1, 2)));
        let a = Scalar::from_f64(0.1 + 0.2);
        let b = Scalar::from_f64(0.3);
        assert!(a.le_or_tied(&b));
        assert!(b.le_or_tied(&a));
    }

    #[test]
    fn scalar_serde_roundtrip() {
        let exact = Scalar::exact(11, 512);
        let json = serde_json::to_string(&exact).unwrap();
        assert_eq!(json, r#"{"num":11,"den":512}"#);
        assert_eq!(serde_json::from_str::<Scalar>(&json).unwrap(), exact);

        let float = Scalar::from_f64(0.009765625);
        let json = serde_json::to_string(&float).unwrap();
        assert_eq!(json, r#""0.009765625""#);
        assert_eq!(serde_json::from_str::<Scalar>(&json).unwrap(), float);
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(Scalar::exact(1, 2), Scalar::exact(1, 4)).is_err());
        let iv = Interval::new(Scalar::zero(), Scalar::exact(22, 25)).unwrap();
        assert_eq!(iv.to_string(), "[0, 0.88]");
    }

    #[test]
    fn interval_complement_involution() {
        let iv = Interval::new(Scalar::exact(14, 25), Scalar::one()).unwrap();
        assert_eq!(iv.complement().to_string(), "[0, 0.44]");
        assert_eq!(iv.complement().complement(), iv);
    }
}
