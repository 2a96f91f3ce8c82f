//! Exact rational scalars, including the unit-interval scalars used by the
//! graded connectives.
//!
//! Everything in the kernel is computed over arbitrary-precision rationals;
//! no floating point is used anywhere.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// General-purpose exact rational (affine coefficients, determinants, ...).
pub type Rat = BigRational;

/// Build a rational from an integer pair, mostly for tests and literals.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `p/q`, `p` or `-p/q` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, RationalError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| RationalError::Malformed(s.to_string()))?;
    let den = BigInt::from_str(den).map_err(|_| RationalError::Malformed(s.to_string()))?;
    if den.is_zero() {
        return Err(RationalError::ZeroDenominator(s.to_string()));
    }
    Ok(Rat::new(num, den))
}

/// Format a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalError {
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in rational literal `{0}`")]
    ZeroDenominator(String),
    #[error("scalar {0} lies outside [0,1]")]
    OutOfUnitInterval(String),
}

/// An exact rational in the closed unit interval.
///
/// `Ratio` keeps the fraction reduced with a positive denominator, so the
/// gcd invariant holds by construction; the range invariant is enforced at
/// every constructor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational01(Rat);

impl Rational01 {
    pub fn new(value: Rat) -> Result<Self, RationalError> {
        if value.is_negative() || value > Rat::one() {
            return Err(RationalError::OutOfUnitInterval(format_rat(&value)));
        }
        Ok(Rational01(value))
    }

    /// Clamp an arbitrary rational into [0,1].
    pub fn clamped(value: Rat) -> Self {
        if value.is_negative() {
            Rational01(Rat::zero())
        } else if value > Rat::one() {
            Rational01(Rat::one())
        } else {
            Rational01(value)
        }
    }

    pub fn zero() -> Self {
        Rational01(Rat::zero())
    }

    pub fn one() -> Self {
        Rational01(Rat::one())
    }

    /// `p/q` with `0 <= p/q <= 1`; panics otherwise. Test/literal helper.
    pub fn from_ints(num: i64, den: i64) -> Self {
        Self::new(rat(num, den)).expect("literal outside [0,1]")
    }

    pub fn parse(s: &str) -> Result<Self, RationalError> {
        Self::new(parse_rat(s)?)
    }

    pub fn as_rat(&self) -> &Rat {
        &self.0
    }

    pub fn into_rat(self) -> Rat {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `x* = 1 - x`.
    pub fn complement(&self) -> Self {
        Rational01(Rat::one() - &self.0)
    }

    /// `x (+) y = min(1, x + y)`.
    pub fn oplus(&self, other: &Self) -> Self {
        Rational01::clamped(&self.0 + &other.0)
    }

    /// `x (.) y = max(0, x + y - 1)`.
    pub fn otimes(&self, other: &Self) -> Self {
        Rational01::clamped(&self.0 + &other.0 - Rat::one())
    }

    /// Lukasiewicz implication `min(1, 1 - x + y)`.
    pub fn imp(&self, other: &Self) -> Self {
        Rational01::clamped(Rat::one() - &self.0 + &other.0)
    }

    /// `nabla_alpha(x) = 1 - alpha * (1 - x)`.
    pub fn nabla(&self, alpha: &Self) -> Self {
        Rational01(Rat::one() - &alpha.0 * (Rat::one() - &self.0))
    }

    /// `delta_alpha(x) = alpha * x`.
    pub fn delta(&self, alpha: &Self) -> Self {
        Rational01(&alpha.0 * &self.0)
    }

    /// Pointwise minimum by reference (`Ord::min` consumes its operands).
    pub fn min_of(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Pointwise maximum by reference.
    pub fn max_of(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

impl fmt::Display for Rational01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rat(&self.0))
    }
}

impl Serialize for Rational01 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational01 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Rational01::parse(&s).map_err(D::Error::custom)
    }
}

/// 2^-n as an exact rational.
pub fn pow2_inv(n: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_interval_enforced() {
        assert!(Rational01::new(rat(3, 2)).is_err());
        assert!(Rational01::new(rat(-1, 2)).is_err());
        assert!(Rational01::new(rat(1, 1)).is_ok());
        assert!(Rational01::new(rat(0, 5)).is_ok());
    }

    #[test]
    fn mv_operations() {
        let a = Rational01::from_ints(3, 4);
        let b = Rational01::from_ints(1, 2);
        assert_eq!(a.oplus(&b), Rational01::one());
        assert_eq!(a.otimes(&b), Rational01::from_ints(1, 4));
        assert_eq!(a.imp(&b), Rational01::from_ints(3, 4));
        assert_eq!(b.imp(&a), Rational01::one());
        assert_eq!(a.complement(), Rational01::from_ints(1, 4));
        let half = Rational01::from_ints(1, 2);
        assert_eq!(b.nabla(&half), Rational01::from_ints(3, 4));
        assert_eq!(b.delta(&half), Rational01::from_ints(1, 4));
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(Rational01::parse("2/4").unwrap(), Rational01::from_ints(1, 2));
        assert_eq!(Rational01::parse("1").unwrap(), Rational01::one());
        assert_eq!(Rational01::parse("7/8").unwrap().to_string(), "7/8");
        assert_eq!(Rational01::one().to_string(), "1");
        assert!(Rational01::parse("5/4").is_err());
        assert!(Rational01::parse("1/0").is_err());
    }
}
