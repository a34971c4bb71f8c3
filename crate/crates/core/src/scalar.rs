//! Exact rational functions in `s = q^{1/2}`.
//!
//! A [`RatFunc`] is stored as `s^shift * num(s) / den(s)` where neither `num`
//! nor `den` is divisible by `s`, `gcd(num, den) = 1` and `den` is monic. With
//! that normalization two values are equal iff their fields are equal, so the
//! derived `PartialEq` is mathematical equality.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

use crate::field::{coefficient_to_string, Coefficient, RationalParts};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("coefficient field has no imaginary unit")]
    NoImaginaryUnit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc<C> {
    shift: i64,
    num: Poly<C>,
    den: Poly<C>,
}

/// The four field operations, as selected by `field_arithmetic`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl<C: Coefficient> RatFunc<C> {
    pub fn zero() -> Self {
        RatFunc { shift: 0, num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { shift: 0, num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        RatFunc::constant(C::from_integer(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        RatFunc::constant(C::from_ratio(num, den))
    }

    /// `s^n`, i.e. `q^{n/2}`.
    pub fn s_pow(n: i64) -> Self {
        RatFunc { shift: n, num: Poly::one(), den: Poly::one() }
    }

    /// `q^n = s^{2n}`.
    pub fn q_pow(n: i64) -> Self {
        RatFunc::s_pow(2 * n)
    }

    pub fn s() -> Self {
        RatFunc::s_pow(1)
    }

    pub fn q() -> Self {
        RatFunc::q_pow(1)
    }

    /// The imaginary unit, when the coefficient field has one.
    pub fn imaginary_unit() -> Result<Self, ScalarError> {
        C::imaginary_unit().map(RatFunc::constant).ok_or(ScalarError::NoImaginaryUnit)
    }

    /// Builds `s^shift * num / den` and normalizes it.
    pub fn from_parts(shift: i64, num: Poly<C>, den: Poly<C>) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(RatFunc::normalized(shift, num, den))
    }

    /// Laurent polynomial `sum_k coeffs[k] s^{low + k}`.
    pub fn laurent(low: i64, coeffs: Vec<C>) -> Self {
        RatFunc::normalized(low, Poly::from_coeffs(coeffs), Poly::one())
    }

    fn normalized(shift: i64, num: Poly<C>, den: Poly<C>) -> Self {
        RatFunc::normalize_with(shift, num, den, true)
    }

    /// As [`RatFunc::normalized`] for a numerator and denominator known to be coprime.
    fn normalized_coprime(shift: i64, num: Poly<C>, den: Poly<C>) -> Self {
        RatFunc::normalize_with(shift, num, den, false)
    }

    fn normalize_with(mut shift: i64, num: Poly<C>, den: Poly<C>, reduce: bool) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let (ln, ld) = (num.low_order(), den.low_order());
        let mut num = num.shift_down(ln);
        let mut den = den.shift_down(ld);
        shift += ln as i64 - ld as i64;
        if reduce && den.degree() != Some(0) {
            let g = num.gcd(&den);
            if !g.is_one() {
                num = num.exact_div(&g);
                den = den.exact_div(&g);
            }
        }
        let lc = den.leading().cloned().expect("nonzero denominator");
        if !lc.is_one() {
            let inv = C::one() / lc;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFunc { shift, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num.is_one() && self.den.is_one()
    }

    /// True when the value is a Laurent polynomial in `s`.
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn numerator(&self) -> &Poly<C> {
        &self.num
    }

    pub fn denominator(&self) -> &Poly<C> {
        &self.den
    }

    /// The constant coefficient when the value is a constant.
    pub fn as_constant(&self) -> Option<C> {
        if self.is_zero() {
            return Some(C::zero());
        }
        (self.shift == 0 && self.num.degree() == Some(0) && self.den.is_one())
            .then(|| self.num.coeffs()[0].clone())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { shift: self.shift, num: self.num.scale(c), den: self.den.clone() }
    }

    /// Multiplies by `s^n`.
    pub fn mul_s_pow(&self, n: i64) -> Self {
        if self.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { shift: self.shift + n, num: self.num.clone(), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(RatFunc::normalized(-self.shift, self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn field_arithmetic(&self, rhs: &Self, op: FieldOp) -> Result<Self, ScalarError> {
        match op {
            FieldOp::Add => Ok(self + rhs),
            FieldOp::Sub => Ok(self - rhs),
            FieldOp::Mul => Ok(self * rhs),
            FieldOp::Div => self.checked_div(rhs),
        }
    }

    pub fn pow(&self, n: i64) -> Result<Self, ScalarError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Applies the field conjugation to the coefficients; `s` is real.
    pub fn conjugate(&self) -> Self {
        if self.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { shift: self.shift, num: self.num.map_coeffs(C::conj), den: self.den.map_coeffs(C::conj) }
    }

    pub fn is_real(&self) -> bool {
        self.conjugate() == *self
    }

    /// The q-integer `[n] = (q^n - q^{-n}) / (q - q^{-1})`, a Laurent
    /// polynomial `q^{n-1} + q^{n-3} + ... + q^{1-n}` for `n > 0`.
    pub fn q_integer(n: i64) -> Self {
        if n == 0 {
            return RatFunc::zero();
        }
        let m = n.unsigned_abs() as usize;
        // exponents of s: 2(m-1), 2(m-3), ..., -2(m-1)
        let low = -2 * (m as i64 - 1);
        let mut coeffs = vec![C::zero(); 4 * (m - 1) + 1];
        for k in 0..m {
            coeffs[4 * k] = C::one();
        }
        let v = RatFunc::laurent(low, coeffs);
        if n < 0 {
            -&v
        } else {
            v
        }
    }

    /// Evaluates at a value of `s`; `None` at a pole (or `s = 0` with a negative shift).
    pub fn eval_at(&self, s: &C) -> Option<C> {
        if self.is_zero() {
            return Some(C::zero());
        }
        let d = self.den.eval(s);
        if d.is_zero() {
            return None;
        }
        let n = self.num.eval(s) / d;
        let mut p = C::one();
        let base = if self.shift < 0 {
            if s.is_zero() {
                return None;
            }
            C::one() / s.clone()
        } else {
            s.clone()
        };
        for _ in 0..self.shift.unsigned_abs() {
            p = p * base.clone();
        }
        Some(n * p)
    }
}

impl<C: Coefficient> Default for RatFunc<C> {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl<C: Coefficient> Add for &RatFunc<C> {
    type Output = RatFunc<C>;

    fn add(self, rhs: &RatFunc<C>) -> RatFunc<C> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let m = self.shift.min(rhs.shift);
        let a = self.num.shift_up((self.shift - m) as usize);
        let b = rhs.num.shift_up((rhs.shift - m) as usize);
        if self.den == rhs.den {
            RatFunc::normalized(m, &a + &b, self.den.clone())
        } else {
            RatFunc::normalized(m, &(&a * &rhs.den) + &(&b * &self.den), &self.den * &rhs.den)
        }
    }
}

impl<C: Coefficient> Sub for &RatFunc<C> {
    type Output = RatFunc<C>;

    fn sub(self, rhs: &RatFunc<C>) -> RatFunc<C> {
        self + &(-rhs)
    }
}

impl<C: Coefficient> Neg for &RatFunc<C> {
    type Output = RatFunc<C>;

    fn neg(self) -> RatFunc<C> {
        RatFunc { shift: self.shift, num: -&self.num, den: self.den.clone() }
    }
}

impl<C: Coefficient> Mul for &RatFunc<C> {
    type Output = RatFunc<C>;

    fn mul(self, rhs: &RatFunc<C>) -> RatFunc<C> {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        let shift = self.shift + rhs.shift;
        if self.den.is_one() && rhs.den.is_one() {
            // both constant terms are nonzero, so the product needs no renormalization
            return RatFunc { shift, num: &self.num * &rhs.num, den: Poly::one() };
        }
        // both factors are reduced, so cross-cancellation leaves a reduced product
        let cancel = |n: &Poly<C>, d: &Poly<C>| -> (Poly<C>, Poly<C>) {
            if d.degree() == Some(0) {
                return (n.clone(), d.clone());
            }
            let g = n.gcd(d);
            if g.is_one() {
                (n.clone(), d.clone())
            } else {
                (n.exact_div(&g), d.exact_div(&g))
            }
        };
        let (n1, d2) = cancel(&self.num, &rhs.den);
        let (n2, d1) = cancel(&rhs.num, &self.den);
        RatFunc::normalized_coprime(shift, &n1 * &n2, &d1 * &d2)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<C: Coefficient> $tr for RatFunc<C> {
            type Output = RatFunc<C>;
            fn $m(self, rhs: RatFunc<C>) -> RatFunc<C> {
                (&self).$m(&rhs)
            }
        }
        impl<C: Coefficient> $tr<&RatFunc<C>> for RatFunc<C> {
            type Output = RatFunc<C>;
            fn $m(self, rhs: &RatFunc<C>) -> RatFunc<C> {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Coefficient> Neg for RatFunc<C> {
    type Output = RatFunc<C>;

    fn neg(self) -> RatFunc<C> {
        -&self
    }
}

impl<C: Coefficient> AddAssign<&RatFunc<C>> for RatFunc<C> {
    fn add_assign(&mut self, rhs: &RatFunc<C>) {
        *self = &*self + rhs;
    }
}

impl<C: Coefficient> SubAssign<&RatFunc<C>> for RatFunc<C> {
    fn sub_assign(&mut self, rhs: &RatFunc<C>) {
        *self = &*self - rhs;
    }
}

impl<C: Coefficient> MulAssign<&RatFunc<C>> for RatFunc<C> {
    fn mul_assign(&mut self, rhs: &RatFunc<C>) {
        *self = &*self * rhs;
    }
}

fn fmt_laurent<C: RationalParts>(low: i64, p: &Poly<C>, var_q: bool) -> String {
    let mut parts = Vec::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let e = low + k as i64;
        let e = if var_q { e / 2 } else { e };
        let var = if var_q { "q" } else { "s" };
        let cs = coefficient_to_string(c);
        let mono = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        let term = match (cs.as_str(), mono.is_empty()) {
            (_, true) => cs,
            ("1", false) => mono,
            ("-1", false) => format!("-{mono}"),
            _ => format!("{cs}*{mono}"),
        };
        parts.push(term);
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = parts[0].clone();
    for t in &parts[1..] {
        match t.strip_prefix('-') {
            Some(rest) => {
                out.push_str(" - ");
                out.push_str(rest);
            }
            None => {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
    }
    out
}

impl<C: RationalParts> fmt::Display for RatFunc<C> {
    /// Renders in `q` when every exponent is even, otherwise in `s`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let even = |low: i64, p: &Poly<C>| {
            p.coeffs().iter().enumerate().all(|(k, c)| c.is_zero() || (low + k as i64) % 2 == 0)
        };
        let var_q = even(self.shift, &self.num) && even(0, &self.den);
        let num = fmt_laurent(self.shift, &self.num, var_q);
        if self.den.is_one() {
            write!(f, "{num}")
        } else {
            write!(f, "({num})/({})", fmt_laurent(0, &self.den, var_q))
        }
    }
}
