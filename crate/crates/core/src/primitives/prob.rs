use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arithmetic mode of a value or a whole dataset.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    /// Float wins: any float operand degrades the result.
    pub fn combine(self, other: Mode) -> Mode {
        if self == Mode::Float || other == Mode::Float {
            Mode::Float
        } else {
            Mode::Exact
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

/// Numeric carrier for probabilities and model weights.
///
/// Exact values are reduced rationals. Arithmetic between an exact and a float
/// operand produces a float.
#[derive(Clone, Debug, PartialEq)]
pub enum Prob {
    Exact(BigRational),
    Float(f64),
}

impl Prob {
    pub fn zero(mode: Mode) -> Prob {
        match mode {
            Mode::Exact => Prob::Exact(BigRational::zero()),
            Mode::Float => Prob::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Prob {
        match mode {
            Mode::Exact => Prob::Exact(BigRational::one()),
            Mode::Float => Prob::Float(1.0),
        }
    }

    pub fn ratio(num: i64, den: i64) -> Prob {
        Prob::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(v: i64) -> Prob {
        Prob::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn float(v: f64) -> Prob {
        Prob::Float(v)
    }

    pub fn mode(&self) -> Mode {
        match self {
            Prob::Exact(_) => Mode::Exact,
            Prob::Float(_) => Mode::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Prob::Float(v) => *v,
        }
    }

    pub fn to_mode(&self, mode: Mode) -> Prob {
        match (self, mode) {
            (Prob::Exact(r), Mode::Float) => Prob::Float(r.to_f64().unwrap_or(f64::NAN)),
            (Prob::Float(v), Mode::Exact) => {
                Prob::Exact(BigRational::from_float(*v).unwrap_or_else(BigRational::zero))
            }
            _ => self.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Prob::Exact(r) => Some(r),
            Prob::Float(_) => None,
        }
    }

    /// Structural zero: exactly 0 in either mode.
    pub fn is_exact_zero(&self) -> bool {
        match self {
            Prob::Exact(r) => r.is_zero(),
            Prob::Float(v) => *v == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Prob::Exact(r) => r.is_negative(),
            Prob::Float(v) => *v < 0.0,
        }
    }

    /// Total order on values; mixed modes compare through `f64`.
    pub fn cmp_value(&self, other: &Prob) -> Ordering {
        match (self, other) {
            (Prob::Exact(a), Prob::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, exp: i32) -> Prob {
        match self {
            Prob::Exact(r) => Prob::Exact(r.pow(exp)),
            Prob::Float(v) => Prob::Float(v.powi(exp)),
        }
    }

    pub fn powf(&self, exp: f64) -> Prob {
        Prob::Float(self.to_f64().powf(exp))
    }

    pub fn parse(s: &str) -> Result<Prob> {
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n
                .trim()
                .parse()
                .map_err(|_| Error::ProbLiteral(s.to_string()))?;
            let d: BigInt = d
                .trim()
                .parse()
                .map_err(|_| Error::ProbLiteral(s.to_string()))?;
            if d.is_zero() {
                return Err(Error::ProbLiteral(s.to_string()));
            }
            return Ok(Prob::Exact(BigRational::new(n, d)));
        }
        if is_integer_literal(t) {
            let n: BigInt = t.parse().map_err(|_| Error::ProbLiteral(s.to_string()))?;
            return Ok(Prob::Exact(BigRational::from_integer(n)));
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Prob::Float(v)),
            _ => Err(Error::ProbLiteral(s.to_string())),
        }
    }
}

/// Literal kind as seen by the document parser: integers carry no mode.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LiteralKind {
    Integer,
    Rational,
    Decimal,
}

pub fn literal_kind(s: &str) -> LiteralKind {
    let t = s.trim();
    if t.contains('/') {
        LiteralKind::Rational
    } else if is_integer_literal(t) {
        LiteralKind::Integer
    } else {
        LiteralKind::Decimal
    }
}

fn is_integer_literal(t: &str) -> bool {
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Exact(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Prob::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            // Debug keeps a decimal point or exponent, so floats never read back as exact.
            Prob::Float(v) => write!(f, "{v:?}"),
        }
    }
}

impl FromStr for Prob {
    type Err = Error;

    fn from_str(s: &str) -> Result<Prob> {
        Prob::parse(s)
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Prob, D::Error> {
        let s = String::deserialize(deserializer)?;
        Prob::parse(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Prob> for &Prob {
            type Output = Prob;
            fn $method(self, rhs: &Prob) -> Prob {
                match (self, rhs) {
                    (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(a $op b),
                    _ => Prob::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait<Prob> for Prob {
            type Output = Prob;
            fn $method(self, rhs: Prob) -> Prob {
                match (self, rhs) {
                    (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(a $op b),
                    (a, b) => Prob::Float(a.to_f64() $op b.to_f64()),
                }
            }
        }
        impl $trait<&Prob> for Prob {
            type Output = Prob;
            fn $method(self, rhs: &Prob) -> Prob {
                (&self) $op rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for Prob {
    type Output = Prob;
    fn neg(self) -> Prob {
        match self {
            Prob::Exact(r) => Prob::Exact(-r),
            Prob::Float(v) => Prob::Float(-v),
        }
    }
}

impl Sum for Prob {
    /// Sums an iterator; an empty sum is an exact zero.
    fn sum<I: Iterator<Item = Prob>>(iter: I) -> Prob {
        iter.fold(Prob::zero(Mode::Exact), |acc, p| acc + p)
    }
}

impl<'a> Sum<&'a Prob> for Prob {
    fn sum<I: Iterator<Item = &'a Prob>>(iter: I) -> Prob {
        iter.fold(Prob::zero(Mode::Exact), |acc, p| acc + p)
    }
}

/// Float-mode comparison knobs. Exact values ignore all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative tolerance for equalities.
    pub eps_eq: f64,
    /// Values at or below this count as zero.
    pub eps_zero: f64,
    /// Allowed deviation of a menu's total from one.
    pub eps_sum: f64,
    /// Support threshold for the positivity axioms; falls back to `eps_zero`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_support: Option<f64>,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eps_eq: 1e-9,
            eps_zero: 1e-12,
            eps_sum: 1e-9,
            eps_support: None,
        }
    }
}

impl ToleranceConfig {
    pub fn with_eps_eq(mut self, eps: f64) -> Self {
        self.eps_eq = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eps_eq, self.eps_zero, self.eps_sum];
        if all.iter().chain(self.eps_support.iter()).any(|e| e.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
            return Err(Error::InvalidParams(
                "tolerances must be strictly positive".into(),
            ));
        }
        Ok(())
    }

    pub fn is_zero(&self, p: &Prob) -> bool {
        match p {
            Prob::Exact(r) => r.is_zero(),
            Prob::Float(v) => v.abs() <= self.eps_zero,
        }
    }

    pub fn is_positive(&self, p: &Prob) -> bool {
        !self.is_zero(p)
    }

    /// Positivity test used by the support axioms.
    pub fn is_supported(&self, p: &Prob) -> bool {
        match p {
            Prob::Exact(r) => !r.is_zero(),
            Prob::Float(v) => v.abs() > self.eps_support.unwrap_or(self.eps_zero),
        }
    }

    pub fn eq(&self, a: &Prob, b: &Prob) -> bool {
        match (a, b) {
            (Prob::Exact(x), Prob::Exact(y)) => x == y,
            _ => {
                let (x, y) = (a.to_f64(), b.to_f64());
                let diff = (x - y).abs();
                diff <= self.eps_zero || diff <= self.eps_eq * x.abs().max(y.abs())
            }
        }
    }

    pub fn sum_is_one(&self, total: &Prob) -> bool {
        match total {
            Prob::Exact(r) => r.is_one(),
            Prob::Float(v) => (v - 1.0).abs() <= self.eps_sum,
        }
    }
}
