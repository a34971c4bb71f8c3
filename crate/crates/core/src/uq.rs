//! U_q(su₂) acting on S³_q from the left and from the right.
//!
//! Elements of U_q are formal linear combinations of words in `E, F, K, K⁻¹`;
//! no normal form is imposed on words. Two elements are compared only
//! extensionally, through their action on a bounded monomial basis.
//!
//! A generator acts on a monomial `x·rest` (with `x` the first letter of the
//! canonical word) through the coproduct,
//! `g▷(x·rest) = Σ (g₍₁₎▷x)(g₍₂₎▷rest)` and likewise for `◁`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::algebra::{enumerate_basis, Element, Letter, Monomial};
use crate::json::element_to_json;
use crate::report::{CheckReport, Failure};
use crate::Scalar;

/// Which action is meant: `h ▷ f` or `f ◁ h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(format!("unknown side {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UqGen {
    E,
    F,
    K,
    KInv,
}

impl UqGen {
    pub fn name(self) -> &'static str {
        match self {
            UqGen::E => "E",
            UqGen::F => "F",
            UqGen::K => "K",
            UqGen::KInv => "K^-1",
        }
    }

    /// The ∗-structure of U_q: `E† = F`, `K† = K`.
    pub fn dagger(self) -> UqGen {
        match self {
            UqGen::E => UqGen::F,
            UqGen::F => UqGen::E,
            k => k,
        }
    }
}

pub type Word = Vec<UqGen>;

/// Finite linear combination of words in `E, F, K, K⁻¹`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct UqElement {
    terms: BTreeMap<Word, Scalar>,
}

impl UqElement {
    pub fn zero() -> Self {
        UqElement { terms: BTreeMap::new() }
    }

    /// The empty word.
    pub fn one() -> Self {
        UqElement::word(&[])
    }

    pub fn scalar(c: Scalar) -> Self {
        UqElement::term(Vec::new(), c)
    }

    pub fn gen(g: UqGen) -> Self {
        UqElement::word(&[g])
    }

    pub fn word(w: &[UqGen]) -> Self {
        UqElement::term(w.to_vec(), Scalar::one())
    }

    pub fn term(w: Word, c: Scalar) -> Self {
        let mut h = UqElement::zero();
        h.add_term(w, c);
        h
    }

    /// `K^n` as a word (`K⁻¹` repeated for negative `n`).
    pub fn k_pow(n: i64) -> Self {
        let g = if n >= 0 { UqGen::K } else { UqGen::KInv };
        UqElement::word(&vec![g; n.unsigned_abs() as usize])
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = UqElement::zero();
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x * c);
        }
        out
    }

    /// Applies `f` to every word and sums with the coefficients.
    fn map_words(&self, f: impl Fn(&[UqGen]) -> UqElement) -> UqElement {
        let mut out = UqElement::zero();
        for (w, c) in &self.terms {
            for (w2, c2) in f(w).terms {
                out.add_term(w2, &c2 * c);
            }
        }
        out
    }
}

impl Add for &UqElement {
    type Output = UqElement;

    fn add(self, rhs: &UqElement) -> UqElement {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &UqElement {
    type Output = UqElement;

    fn sub(self, rhs: &UqElement) -> UqElement {
        self + &(-rhs)
    }
}

impl Neg for &UqElement {
    type Output = UqElement;

    fn neg(self) -> UqElement {
        self.scale(&-Scalar::one())
    }
}

/// Word concatenation.
impl Mul for &UqElement {
    type Output = UqElement;

    fn mul(self, rhs: &UqElement) -> UqElement {
        let mut out = UqElement::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for UqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let word = if w.is_empty() { "1".to_string() } else { w.iter().map(|g| g.name()).collect::<Vec<_>>().join("") };
                if c.is_one() {
                    word
                } else {
                    format!("({c}) {word}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// One summand `left ⊗ right` of an element of U_q ⊗ U_q.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorPair {
    pub left: UqElement,
    pub right: UqElement,
}

fn gen_coproduct(g: UqGen) -> Vec<(UqGen, UqGen)> {
    match g {
        UqGen::E => vec![(UqGen::E, UqGen::K), (UqGen::KInv, UqGen::E)],
        UqGen::F => vec![(UqGen::F, UqGen::K), (UqGen::KInv, UqGen::F)],
        k => vec![(k, k)],
    }
}

/// Multiplicative extension of `Δ(E) = E⊗K + K⁻¹⊗E`, `Δ(F) = F⊗K + K⁻¹⊗F`,
/// `Δ(K^{±1}) = K^{±1}⊗K^{±1}`. Coefficients sit on the left factor.
pub fn coproduct(h: &UqElement) -> Vec<TensorPair> {
    let mut acc: BTreeMap<(Word, Word), Scalar> = BTreeMap::new();
    for (w, c) in h.terms() {
        let mut pairs: Vec<(Word, Word)> = vec![(Vec::new(), Vec::new())];
        for g in w {
            pairs = pairs
                .into_iter()
                .flat_map(|(l, r)| {
                    gen_coproduct(*g).into_iter().map(move |(gl, gr)| {
                        let (mut l, mut r) = (l.clone(), r.clone());
                        l.push(gl);
                        r.push(gr);
                        (l, r)
                    })
                })
                .collect();
        }
        for p in pairs {
            let slot = acc.entry(p).or_default();
            *slot += c;
        }
    }
    acc.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((l, r), c)| TensorPair { left: UqElement::term(l, c), right: UqElement::term(r, Scalar::one()) })
        .collect()
}

fn gen_antipode(g: UqGen, inverse: bool) -> UqElement {
    match (g, inverse) {
        (UqGen::K, _) => UqElement::gen(UqGen::KInv),
        (UqGen::KInv, _) => UqElement::gen(UqGen::K),
        (UqGen::E, false) => UqElement::gen(UqGen::E).scale(&-Scalar::q()),
        (UqGen::F, false) => UqElement::gen(UqGen::F).scale(&-Scalar::q_pow(-1)),
        (UqGen::E, true) => UqElement::gen(UqGen::E).scale(&-Scalar::q_pow(-1)),
        (UqGen::F, true) => UqElement::gen(UqGen::F).scale(&-Scalar::q()),
    }
}

fn antihomomorphic(h: &UqElement, inverse: bool) -> UqElement {
    h.map_words(|w| w.iter().rev().fold(UqElement::one(), |acc, g| &acc * &gen_antipode(*g, inverse)))
}

/// `S(K) = K⁻¹`, `S(E) = −qE`, `S(F) = −q⁻¹F`, extended antihomomorphically.
pub fn antipode(h: &UqElement) -> UqElement {
    antihomomorphic(h, false)
}

/// Inverse antipode: `S⁻¹(E) = −q⁻¹E`, `S⁻¹(F) = −qF`.
pub fn antipode_inv(h: &UqElement) -> UqElement {
    antihomomorphic(h, true)
}

/// `ε(K^{±1}) = 1`, `ε(E) = ε(F) = 0`.
pub fn counit_uq(h: &UqElement) -> Scalar {
    h.terms()
        .filter(|(w, _)| w.iter().all(|g| matches!(g, UqGen::K | UqGen::KInv)))
        .fold(Scalar::zero(), |acc, (_, c)| &acc + c)
}

/// Antilinear antihomomorphism with `E† = F`, `K† = K`.
pub fn dagger(h: &UqElement) -> UqElement {
    let mut out = UqElement::zero();
    for (w, c) in h.terms() {
        out.add_term(w.iter().rev().map(|g| g.dagger()).collect(), c.conjugate());
    }
    out
}

/// Exponent `e` with `K ▷ m = s^e m` (left) or `m ◁ K = s^e m` (right).
pub fn k_weight(m: &Monomial, side: Side) -> i64 {
    let (alpha, j, k) = (m.alpha as i64, m.j as i64, m.k as i64);
    match side {
        // a, c: -1; a∗, c∗: +1
        Side::Left => -alpha - j + k,
        // a, c∗: -1; a∗, c: +1
        Side::Right => -alpha + j - k,
    }
}

fn letter_action(g: UqGen, x: Letter, side: Side) -> Element {
    let term = |l: Letter, c: Scalar| Element::term(l.monomial(), c);
    match (side, g, x) {
        (Side::Left, UqGen::E, Letter::A) => term(Letter::CStar, -Scalar::q()),
        (Side::Left, UqGen::E, Letter::C) => Element::a_star(),
        (Side::Left, UqGen::F, Letter::AStar) => Element::c(),
        (Side::Left, UqGen::F, Letter::CStar) => term(Letter::A, -Scalar::q_pow(-1)),
        (Side::Right, UqGen::F, Letter::A) => Element::c(),
        (Side::Right, UqGen::F, Letter::CStar) => term(Letter::AStar, -Scalar::q_pow(-1)),
        (Side::Right, UqGen::E, Letter::AStar) => term(Letter::CStar, -Scalar::q()),
        (Side::Right, UqGen::E, Letter::C) => Element::a(),
        _ => Element::zero(),
    }
}

fn k_scalar(g: UqGen, m: &Monomial, side: Side) -> Scalar {
    let e = k_weight(m, side);
    Scalar::s_pow(if g == UqGen::K { e } else { -e })
}

thread_local! {
    static ACTION_CACHE: RefCell<HashMap<(UqGen, Side, Monomial), Element>> = RefCell::new(HashMap::new());
}

/// Action of a single generator on a normal monomial.
pub fn act_generator(g: UqGen, m: &Monomial, side: Side) -> Element {
    if matches!(g, UqGen::K | UqGen::KInv) {
        return Element::term(*m, k_scalar(g, m, side));
    }
    let key = (g, side, *m);
    if let Some(hit) = ACTION_CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let out = match m.split_first() {
        None => Element::zero(),
        Some((x, rest)) => {
            let xm = x.monomial();
            let rest_el = Element::monomial(rest);
            // Δ(g) = g⊗K + K⁻¹⊗g; on either side the first tensor factor meets x
            let first = &letter_action(g, x, side) * &rest_el.scale(&k_scalar(UqGen::K, &rest, side));
            let second =
                &Element::term(xm, k_scalar(UqGen::KInv, &xm, side)) * &act_generator(g, &rest, side);
            &first + &second
        }
    };
    ACTION_CACHE.with(|c| c.borrow_mut().insert(key, out.clone()));
    out
}

fn act_word(w: &[UqGen], f: &Element, side: Side) -> Element {
    let step = |acc: Element, g: &UqGen| acc.map_linear(|m| act_generator(*g, m, side));
    match side {
        // g₁…gₙ ▷ f = g₁ ▷ (… (gₙ ▷ f))
        Side::Left => w.iter().rev().fold(f.clone(), step),
        // f ◁ g₁…gₙ = (… (f ◁ g₁) …) ◁ gₙ
        Side::Right => w.iter().fold(f.clone(), step),
    }
}

/// `h ▷ f` or `f ◁ h`.
pub fn act(h: &UqElement, f: &Element, side: Side) -> Element {
    let mut out = Element::zero();
    for (w, c) in h.terms() {
        out.add_scaled(&act_word(w, f, side), c);
    }
    out
}

/// Dual pairing `⟨h, f⟩ = ε(h ▷ f)`.
pub fn pairing(h: &UqElement, f: &Element) -> Scalar {
    act(h, f, Side::Left).counit()
}

/// Checks compatibility of the action with the two ∗-structures:
/// `h ▷ f∗ = (S(h)† ▷ f)∗` and `f∗ ◁ h = (f ◁ S(h)†)∗`.
pub fn check_star_compatibility(h: &UqElement, f: &Element, side: Side) -> CheckReport {
    let mut report = CheckReport::new(format!("star compatibility ({})", side.name()));
    let twisted = dagger(&antipode(h));
    let lhs = act(h, &f.star(), side);
    let rhs = act(&twisted, f, side).star();
    report.record(lhs == rhs, || {
        Failure::new(format!("h = {h}, f = {f}"), element_to_json(&lhs), element_to_json(&rhs))
    });
    report
}

/// Compares two U_q elements as operators on all monomials of length `<= max_len`.
pub fn check_operator_identity(
    name: &str,
    lhs: &UqElement,
    rhs: &UqElement,
    max_len: u32,
    side: Side,
) -> CheckReport {
    let mut report = CheckReport::new(format!("{name} ({})", side.name()));
    for m in enumerate_basis(max_len) {
        let f = Element::monomial(m);
        let (l, r) = (act(lhs, &f, side), act(rhs, &f, side));
        report.record(l == r, || Failure::new(format!("{name} on {m}"), element_to_json(&l), element_to_json(&r)));
    }
    report
}

/// The defining relations `KE = qEK`, `KF = q⁻¹FK`,
/// `EF − FE = (K² − K⁻²)/(q − q⁻¹)` as operator identities.
pub fn check_uq_relations(max_len: u32, side: Side) -> CheckReport {
    let (e, f, k) = (UqElement::gen(UqGen::E), UqElement::gen(UqGen::F), UqElement::gen(UqGen::K));
    let q = Scalar::q();
    let inv_q_diff = (&q - &Scalar::q_pow(-1)).inv().expect("q - 1/q is nonzero");
    let cartan = (&UqElement::k_pow(2) - &UqElement::k_pow(-2)).scale(&inv_q_diff);
    let rels = [
        ("KE = qEK", &k * &e, (&e * &k).scale(&q)),
        ("KF = q^-1 FK", &k * &f, (&f * &k).scale(&Scalar::q_pow(-1))),
        ("[E,F] = (K^2-K^-2)/(q-q^-1)", &(&e * &f) - &(&f * &e), cartan),
        ("K K^-1 = 1", &k * &UqElement::gen(UqGen::KInv), UqElement::one()),
    ];
    let mut report = CheckReport::new(format!("U_q relations ({})", side.name()));
    for (name, l, r) in rels {
        report.absorb(check_operator_identity(name, &l, &r, max_len, side));
    }
    report
}
