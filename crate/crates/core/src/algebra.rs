//! The ∗-algebra S³_q on generators `a, a∗, c, c∗`.
//!
//! Elements are kept in the normal form spanned by the words
//! `a^α c^j (c∗)^k` (α ≥ 0) and `(a∗)^{-α} c^j (c∗)^k` (α < 0). Products are
//! reduced with the q-commutation relations
//!
//! ```text
//! ac = q ca    c∗a∗ = q a∗c∗    ac∗ = q c∗a    ca∗ = q a∗c    cc∗ = c∗c
//! ```
//!
//! and the two inhomogeneous rules `a a∗ = 1 - q² cc∗`, `a∗ a = 1 - cc∗`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::Scalar;

/// A generator of S³_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AStar,
    C,
    CStar,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AStar, Letter::C, Letter::CStar];

    pub fn star(self) -> Letter {
        match self {
            Letter::A => Letter::AStar,
            Letter::AStar => Letter::A,
            Letter::C => Letter::CStar,
            Letter::CStar => Letter::C,
        }
    }

    pub fn monomial(self) -> Monomial {
        match self {
            Letter::A => Monomial::new(1, 0, 0),
            Letter::AStar => Monomial::new(-1, 0, 0),
            Letter::C => Monomial::new(0, 1, 0),
            Letter::CStar => Monomial::new(0, 0, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Letter::A => "a",
            Letter::AStar => "a*",
            Letter::C => "c",
            Letter::CStar => "c*",
        }
    }
}

/// Normal-form word `a^alpha c^j (c∗)^k`; negative `alpha` stands for `(a∗)^{-alpha}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub alpha: i32,
    pub j: u32,
    pub k: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { alpha: 0, j: 0, k: 0 };

    pub const fn new(alpha: i32, j: u32, k: u32) -> Self {
        Monomial { alpha, j, k }
    }

    /// Word length `|alpha| + j + k`.
    pub fn len(&self) -> u32 {
        self.alpha.unsigned_abs() + self.j + self.k
    }

    pub fn is_one(&self) -> bool {
        *self == Monomial::ONE
    }

    /// U(1) degree `n` with `α_z(m) = z̄^n m`: each `a`, `c` counts −1 and
    /// each `a∗`, `c∗` counts +1.
    pub fn u1_degree(&self) -> i64 {
        -(self.alpha as i64) - self.j as i64 + self.k as i64
    }

    /// Splits off the first letter of the canonical word, so that
    /// `self = first · rest` holds without any q-factor.
    pub fn split_first(&self) -> Option<(Letter, Monomial)> {
        if self.alpha > 0 {
            Some((Letter::A, Monomial::new(self.alpha - 1, self.j, self.k)))
        } else if self.alpha < 0 {
            Some((Letter::AStar, Monomial::new(self.alpha + 1, self.j, self.k)))
        } else if self.j > 0 {
            Some((Letter::C, Monomial::new(0, self.j - 1, self.k)))
        } else if self.k > 0 {
            Some((Letter::CStar, Monomial::new(0, 0, self.k - 1)))
        } else {
            None
        }
    }

    /// Letters of the canonical word, left to right.
    pub fn letters(&self) -> Vec<Letter> {
        let a = if self.alpha >= 0 { Letter::A } else { Letter::AStar };
        std::iter::repeat(a)
            .take(self.alpha.unsigned_abs() as usize)
            .chain(std::iter::repeat(Letter::C).take(self.j as usize))
            .chain(std::iter::repeat(Letter::CStar).take(self.k as usize))
            .collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        let pw = |name: &str, e: u32| if e == 1 { name.to_string() } else { format!("{name}^{e}") };
        if self.alpha > 0 {
            parts.push(pw("a", self.alpha as u32));
        } else if self.alpha < 0 {
            parts.push(pw("a*", self.alpha.unsigned_abs()));
        }
        if self.j > 0 {
            parts.push(pw("c", self.j));
        }
        if self.k > 0 {
            parts.push(pw("c*", self.k));
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// All normal monomials with `|alpha| + j + k <= max_len`, ordered
/// lexicographically on `(alpha, j, k)`.
pub fn enumerate_basis(max_len: u32) -> Vec<Monomial> {
    let l = max_len as i32;
    let mut out = Vec::new();
    for alpha in -l..=l {
        let rest = max_len - alpha.unsigned_abs();
        for j in 0..=rest {
            for k in 0..=(rest - j) {
                out.push(Monomial::new(alpha, j, k));
            }
        }
    }
    out
}

/// `a^{x} a^{y}` for opposite-sign exponents, as `Σ coeff · a^β (cc∗)^l`.
fn mixed_a_product(x: i32, y: i32) -> Vec<(i32, u32, Scalar)> {
    debug_assert!(x != 0 && y != 0 && x.signum() != y.signum());
    let (m, n) = (x.unsigned_abs(), y.unsigned_abs());
    let steps = m.min(n);
    // terms as (power of cc*, coefficient)
    let mut poly: Vec<Scalar> = vec![Scalar::one()];
    for step in 0..steps {
        // a^{m-step} (a∗)^{n-step} = a^{m-step-1} (1 - q² cc∗) (a∗)^{n-step-1}
        //   with cc∗ (a∗)^{r} = q^{2r} (a∗)^{r} cc∗; mirrored for (a∗)^x a^y.
        let r = (n - step - 1) as i64;
        let factor = if x > 0 { Scalar::q_pow(2 + 2 * r) } else { Scalar::q_pow(-2 * r) };
        let mut next = vec![Scalar::zero(); poly.len() + 1];
        for (l, c) in poly.iter().enumerate() {
            next[l] = &next[l] + c;
            next[l + 1] = &next[l + 1] - &(c * &factor);
        }
        poly = next;
    }
    let beta = x + y;
    poly.into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(l, c)| (beta, l as u32, c))
        .collect()
}

/// Product of two normal monomials, reduced to normal form.
pub fn monomial_product(m1: &Monomial, m2: &Monomial) -> Element {
    // move a^{α2} left across c^{j1} (c∗)^{k1}: each crossing gives q^{-α2}
    let crossing = -(m2.alpha as i64) * (m1.j + m1.k) as i64;
    let base = Scalar::q_pow(crossing);
    let (j, k) = (m1.j + m2.j, m1.k + m2.k);
    let mut out = Element::zero();
    if m1.alpha == 0 || m2.alpha == 0 || m1.alpha.signum() == m2.alpha.signum() {
        out.add_term(Monomial::new(m1.alpha + m2.alpha, j, k), base);
    } else {
        for (beta, l, c) in mixed_a_product(m1.alpha, m2.alpha) {
            out.add_term(Monomial::new(beta, j + l, k + l), &c * &base);
        }
    }
    out
}

/// Image of a monomial under the ∗-involution (coefficient-free part).
pub fn monomial_star(m: &Monomial) -> Element {
    // (a^α c^j c∗^k)∗ = c^k c∗^j (a^α)∗
    monomial_product(&Monomial::new(0, m.k, m.j), &Monomial::new(-m.alpha, 0, 0))
}

/// A finite linear combination of normal monomials with [`Scalar`] coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Element {
    terms: BTreeMap<Monomial, Scalar>,
}

/// Result of [`Element::u1_degree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum U1Degree {
    /// The zero element is homogeneous of every degree.
    Zero,
    Homogeneous(i64),
    Inhomogeneous,
}

impl Element {
    pub fn zero() -> Self {
        Element { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Element::from_scalar(Scalar::one())
    }

    pub fn from_scalar(c: Scalar) -> Self {
        Element::term(Monomial::ONE, c)
    }

    pub fn monomial(m: Monomial) -> Self {
        Element::term(m, Scalar::one())
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let mut e = Element::zero();
        e.add_term(m, c);
        e
    }

    pub fn generator(l: Letter) -> Self {
        Element::monomial(l.monomial())
    }

    pub fn a() -> Self {
        Element::generator(Letter::A)
    }

    pub fn a_star() -> Self {
        Element::generator(Letter::AStar)
    }

    pub fn c() -> Self {
        Element::generator(Letter::C)
    }

    pub fn c_star() -> Self {
        Element::generator(Letter::CStar)
    }

    /// Product of the letters of `word`, left to right.
    pub fn from_letters(word: &[Letter]) -> Self {
        word.iter().fold(Element::one(), |acc, l| &acc * &Element::generator(*l))
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += &c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The scalar value when the element is a multiple of 1.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Element::zero();
        }
        Element { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    /// Applies `f` to each monomial (with its coefficient) and sums the results.
    pub fn map_linear(&self, mut f: impl FnMut(&Monomial) -> Element) -> Element {
        let mut out = Element::zero();
        for (m, c) in &self.terms {
            out.add_scaled(&f(m), c);
        }
        out
    }

    /// `self += c · other`
    pub fn add_scaled(&mut self, other: &Element, c: &Scalar) {
        for (m, x) in &other.terms {
            self.add_term(*m, x * c);
        }
    }

    /// Antilinear antihomomorphic involution.
    pub fn star(&self) -> Element {
        let mut out = Element::zero();
        for (m, c) in &self.terms {
            out.add_scaled(&monomial_star(m), &c.conjugate());
        }
        out
    }

    /// Counit: `ε(a) = ε(a∗) = 1`, `ε(c) = ε(c∗) = 0`.
    pub fn counit(&self) -> Scalar {
        self.terms
            .iter()
            .filter(|(m, _)| m.j == 0 && m.k == 0)
            .fold(Scalar::zero(), |acc, (_, c)| &acc + c)
    }

    pub fn u1_degree(&self) -> U1Degree {
        let mut degrees = self.terms.keys().map(Monomial::u1_degree);
        match degrees.next() {
            None => U1Degree::Zero,
            Some(d) if degrees.all(|e| e == d) => U1Degree::Homogeneous(d),
            Some(_) => U1Degree::Inhomogeneous,
        }
    }

    /// True when every term has U(1) degree 0, i.e. the element lies in S²_q.
    pub fn is_degree_zero(&self) -> bool {
        matches!(self.u1_degree(), U1Degree::Zero | U1Degree::Homogeneous(0))
    }

    /// Maximal word length of the terms.
    pub fn max_len(&self) -> u32 {
        self.terms.keys().map(Monomial::len).max().unwrap_or(0)
    }

    pub fn pow(&self, n: u32) -> Element {
        (0..n).fold(Element::one(), |acc, _| &acc * self)
    }

    /// Applies [`Scalar::conjugate`] to every coefficient.
    pub fn conjugate_coefficients(&self) -> Element {
        Element { terms: self.terms.iter().map(|(m, c)| (*m, c.conjugate())).collect() }
    }
}

impl From<Scalar> for Element {
    fn from(c: Scalar) -> Self {
        Element::from_scalar(c)
    }
}

impl From<Monomial> for Element {
    fn from(m: Monomial) -> Self {
        Element::monomial(m)
    }
}

impl Add for &Element {
    type Output = Element;

    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Element {
    type Output = Element;

    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Neg for &Element {
    type Output = Element;

    fn neg(self) -> Element {
        Element { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Mul for &Element {
    type Output = Element;

    fn mul(self, rhs: &Element) -> Element {
        let mut out = Element::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_scaled(&monomial_product(m1, m2), &(c1 * c2));
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Element> for Element {
            type Output = Element;
            fn $m(self, rhs: &Element) -> Element {
                (&self).$m(rhs)
            }
        }
        impl $tr<Element> for &Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Element {
    type Output = Element;

    fn neg(self) -> Element {
        -&self
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    format!("({c})")
                } else if c.is_one() {
                    m.to_string()
                } else {
                    format!("({c}) {m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::q_pow(n)
    }

    fn cc() -> Element {
        &Element::c() * &Element::c_star()
    }

    #[test]
    fn c_times_a() {
        assert_eq!(&Element::c() * &Element::a(), Element::term(Monomial::new(1, 1, 0), q(-1)));
    }

    #[test]
    fn astar_times_a() {
        assert_eq!(&Element::a_star() * &Element::a(), &Element::one() - &cc());
    }

    #[test]
    fn astar_squared_a_squared() {
        // hand reduction: (1 - c∗c)(1 - q^{-2} c∗c)
        let lhs = &Element::a_star().pow(2) * &Element::a().pow(2);
        let t = cc();
        let rhs = &(&Element::one() - &t.scale(&(&Scalar::one() + &q(-2)))) + &(&t * &t).scale(&q(-2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn defining_relations_vanish() {
        let (a, ast, c, cst) = (Element::a(), Element::a_star(), Element::c(), Element::c_star());
        let rels = [
            &(&a * &c) - &(&c * &a).scale(&q(1)),
            &(&cst * &ast) - &(&ast * &cst).scale(&q(1)),
            &(&a * &cst) - &(&cst * &a).scale(&q(1)),
            &(&c * &ast) - &(&ast * &c).scale(&q(1)),
            &(&c * &cst) - &(&cst * &c),
            &(&(&ast * &a) + &(&cst * &c)) - &Element::one(),
            &(&(&a * &ast) + &(&c * &cst).scale(&q(2))) - &Element::one(),
        ];
        for (i, r) in rels.iter().enumerate() {
            assert!(r.is_zero(), "relation {i} leaves {r}");
        }
    }

    #[test]
    fn star_examples() {
        assert_eq!(Element::a().star(), Element::a_star());
        let ac = Element::monomial(Monomial::new(1, 1, 0));
        assert_eq!(ac.star(), Element::term(Monomial::new(-1, 0, 1), q(1)));
    }

    #[test]
    fn counit_examples() {
        assert_eq!((&Element::a_star() * &Element::a()).counit(), Scalar::one());
        assert!(Element::c().counit().is_zero());
        let x = &Element::one() - &cc().scale(&q(2));
        assert_eq!(x.counit(), Scalar::one());
    }

    #[test]
    fn u1_degrees() {
        assert_eq!(Element::a().u1_degree(), U1Degree::Homogeneous(-1));
        assert_eq!(cc().u1_degree(), U1Degree::Homogeneous(0));
        assert_eq!((&Element::a() + &Element::c_star()).u1_degree(), U1Degree::Inhomogeneous);
        assert_eq!(Element::zero().u1_degree(), U1Degree::Zero);
    }

    #[test]
    fn basis_enumeration() {
        assert_eq!(enumerate_basis(0), vec![Monomial::ONE]);
        let b1 = enumerate_basis(1);
        assert_eq!(b1.len(), 5);
        for l in Letter::ALL {
            assert!(b1.contains(&l.monomial()));
        }
        assert_eq!(enumerate_basis(2).len(), 14);
        let b4 = enumerate_basis(4);
        assert_eq!(b4.len(), 55);
        assert!(b4.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn canonical_word_reassembles() {
        for m in enumerate_basis(4) {
            assert_eq!(Element::from_letters(&m.letters()), Element::monomial(m));
            if let Some((l, rest)) = m.split_first() {
                assert_eq!(&Element::generator(l) * &Element::monomial(rest), Element::monomial(m));
            }
        }
    }
}
