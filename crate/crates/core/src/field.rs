//! Coefficient fields for the rational-function layer.
//!
//! Everything above [`crate::poly`] is generic over a [`Coefficient`] field.
//! The engine itself runs over the Gaussian rationals ℚ(i); the real rationals
//! are provided as a second instantiation (no imaginary unit).

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact field of coefficients with an involutive conjugation.
pub trait Coefficient:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + num_traits::Num
    + std::ops::Neg<Output = Self>
{
    /// Field conjugation; the identity on real fields.
    fn conj(&self) -> Self;

    fn from_integer(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// The imaginary unit, if the field contains one.
    fn imaginary_unit() -> Option<Self>;

    /// True when `conj(self) == self`.
    fn is_real(&self) -> bool {
        self.conj() == *self
    }
}

pub type Rational = BigRational;

/// ℚ(i), the coefficient field of the engine.
pub type GaussianRational = Complex<BigRational>;

impl Coefficient for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_integer(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn imaginary_unit() -> Option<Self> {
        None
    }
}

impl Coefficient for GaussianRational {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn from_integer(n: i64) -> Self {
        Complex::new(<BigRational as Coefficient>::from_integer(n), BigRational::zero())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(<BigRational as Coefficient>::from_ratio(num, den), BigRational::zero())
    }

    fn imaginary_unit() -> Option<Self> {
        Some(Complex::new(BigRational::zero(), BigRational::one()))
    }
}

/// Formats a rational as `"p/q"` (or `"p"` when integral).
pub fn rational_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => BigInt::from_str(text).ok().map(BigRational::from_integer),
    }
}

/// Coefficient types that can be written as a `(real, imaginary)` pair of
/// exact rationals; used by the JSON codec.
pub trait RationalParts: Coefficient {
    fn parts(&self) -> (BigRational, BigRational);
    fn from_parts(re: BigRational, im: BigRational) -> Option<Self>;
}

impl RationalParts for BigRational {
    fn parts(&self) -> (BigRational, BigRational) {
        (self.clone(), BigRational::zero())
    }

    fn from_parts(re: BigRational, im: BigRational) -> Option<Self> {
        im.is_zero().then_some(re)
    }
}

impl RationalParts for GaussianRational {
    fn parts(&self) -> (BigRational, BigRational) {
        (self.re.clone(), self.im.clone())
    }

    fn from_parts(re: BigRational, im: BigRational) -> Option<Self> {
        Some(Complex::new(re, im))
    }
}

/// Human-readable rendering of a single coefficient.
pub fn coefficient_to_string<C: RationalParts>(c: &C) -> String {
    let (re, im) = c.parts();
    match (re.is_zero(), im.is_zero()) {
        (_, true) => rational_to_string(&re),
        (true, false) => {
            if im.is_one() {
                "i".to_string()
            } else if (-im.clone()).is_one() {
                "-i".to_string()
            } else {
                format!("{}i", rational_to_string(&im))
            }
        }
        (false, false) => {
            let sign = if im.is_negative() { "-" } else { "+" };
            format!("({}{}{}i)", rational_to_string(&re), sign, rational_to_string(&im.abs()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let r = parse_rational("-6/4").unwrap();
        assert_eq!(rational_to_string(&r), "-3/2");
        assert_eq!(parse_rational(" 7 ").unwrap(), BigRational::from_integer(7.into()));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn gaussian_conjugation() {
        let i = GaussianRational::imaginary_unit().unwrap();
        assert_eq!(i.conj(), -i.clone());
        assert!(!i.is_real());
        assert!(GaussianRational::from_ratio(3, 5).is_real());
        assert!(BigRational::imaginary_unit().is_none());
    }

    #[test]
    fn coefficient_rendering() {
        let i = GaussianRational::imaginary_unit().unwrap();
        assert_eq!(coefficient_to_string(&i), "i");
        let z = GaussianRational::from_ratio(1, 2) - i;
        assert_eq!(coefficient_to_string(&z), "(1/2-1i)");
    }
}
