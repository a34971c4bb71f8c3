//! The left covariant first-order calculus Ω¹(S³_q).
//!
//! Ω¹ is free as a left module on `ω₊, ω₋, ω_z`; forms are stored in left
//! coordinates `f₊ω₊ + f₋ω₋ + f_zω_z`. The right module structure is
//! `ω_± g = q^{n(g)} g ω_±`, `ω_z g = q^{2n(g)} g ω_z` for `g` of U(1) degree `n`,
//! i.e. `ω_a g = σ_a(g) ω_a` with σ acting from the left.

use std::ops::{Add, Neg, Sub};

use serde_json::{json, Value};

use crate::algebra::{enumerate_basis, Element, Letter};
use crate::derivations::{BasisField, Index};
use crate::json::{element_from_json, element_to_json, JsonError};
use crate::report::{CheckReport, Failure};
use crate::uq::Side;
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct OneForm {
    /// Left coordinates in the order `(ω₊, ω₋, ω_z)`.
    pub coords: [Element; 3],
}

impl OneForm {
    pub fn zero() -> Self {
        OneForm::default()
    }

    pub fn new(plus: Element, minus: Element, z: Element) -> Self {
        OneForm { coords: [plus, minus, z] }
    }

    /// The basis form `ω_a`.
    pub fn basis(a: Index) -> Self {
        let mut w = OneForm::zero();
        w.coords[a.pos()] = Element::one();
        w
    }

    pub fn coord(&self, a: Index) -> &Element {
        &self.coords[a.pos()]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Element::is_zero)
    }

    /// `f · ω`
    pub fn left_mul(&self, f: &Element) -> OneForm {
        OneForm { coords: self.coords.clone().map(|c| f * &c) }
    }

    pub fn scale(&self, c: &Scalar) -> OneForm {
        OneForm { coords: self.coords.clone().map(|x| x.scale(c)) }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "wp": element_to_json(&self.coords[0]),
            "wm": element_to_json(&self.coords[1]),
            "wz": element_to_json(&self.coords[2]),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, JsonError> {
        let get = |key: &str| match v.get(key) {
            None => Ok(Element::zero()),
            Some(e) => element_from_json(e, &format!("$.{key}")),
        };
        Ok(OneForm::new(get("wp")?, get("wm")?, get("wz")?))
    }
}

impl Add for &OneForm {
    type Output = OneForm;

    fn add(self, rhs: &OneForm) -> OneForm {
        OneForm { coords: std::array::from_fn(|i| &self.coords[i] + &rhs.coords[i]) }
    }
}

impl Sub for &OneForm {
    type Output = OneForm;

    fn sub(self, rhs: &OneForm) -> OneForm {
        OneForm { coords: std::array::from_fn(|i| &self.coords[i] - &rhs.coords[i]) }
    }
}

impl Neg for &OneForm {
    type Output = OneForm;

    fn neg(self) -> OneForm {
        OneForm { coords: self.coords.clone().map(|c| -c) }
    }
}

/// `df = (X₊▷f)ω₊ + (X₋▷f)ω₋ + (X_z▷f)ω_z`.
pub fn differential(f: &Element) -> OneForm {
    OneForm { coords: Index::ALL.map(|a| BasisField::plain(a).apply(f, Side::Left)) }
}

/// Power of q picked up by `ω_a` when moved past an element of U(1) degree `n`.
fn omega_weight(a: Index) -> i64 {
    match a {
        Index::Plus | Index::Minus => 1,
        Index::Z => 2,
    }
}

/// `ω · f`, rewritten into left coordinates.
pub fn form_right_mul(w: &OneForm, f: &Element) -> OneForm {
    OneForm {
        coords: Index::ALL.map(|a| {
            let moved = f.map_linear(|m| Element::term(*m, Scalar::q_pow(omega_weight(a) * m.u1_degree())));
            &w.coords[a.pos()] * &moved
        }),
    }
}

/// Antilinear anti-involution with `ω₊† = −ω₋`, `ω₋† = −ω₊`, `ω_z† = −ω_z`
/// and `(fωg)† = g∗ω†f∗`.
pub fn form_dagger(w: &OneForm) -> OneForm {
    let mut out = OneForm::zero();
    for a in Index::ALL {
        // (f ω_a)† = ω_a† f∗ = −ω_{a'} f∗
        let back = -&OneForm::basis(a.opposite());
        out = &out + &form_right_mul(&back, &w.coords[a.pos()].star());
    }
    out
}

/// `d` of a product of letters, expanded with the Leibniz rule on the
/// unreduced word: `d(x₁⋯xₙ) = Σ x₁⋯x_{i−1} · dx_i · x_{i+1}⋯xₙ`.
pub fn word_differential(word: &[Letter]) -> OneForm {
    let mut out = OneForm::zero();
    for i in 0..word.len() {
        let before = Element::from_letters(&word[..i]);
        let after = Element::from_letters(&word[i + 1..]);
        let dx = differential(&Element::generator(word[i]));
        out = &out + &form_right_mul(&dx.left_mul(&before), &after);
    }
    out
}

/// A defining relation of S³_q written as `Σ cᵢ · wordᵢ = 0` on unreduced words.
pub struct Relation {
    pub name: &'static str,
    pub terms: Vec<(Scalar, Vec<Letter>)>,
}

/// The defining relations as differences. The unital chain
/// `a∗a + c∗c = aa∗ + q²cc∗ = 1` contributes two of them.
pub fn defining_relations() -> Vec<Relation> {
    use Letter::{AStar, CStar, A, C};
    let one = Scalar::one;
    let q = || Scalar::q();
    let mq = || -Scalar::q();
    vec![
        Relation { name: "ac - q ca", terms: vec![(one(), vec![A, C]), (mq(), vec![C, A])] },
        Relation { name: "c*a* - q a*c*", terms: vec![(one(), vec![CStar, AStar]), (mq(), vec![AStar, CStar])] },
        Relation { name: "ac* - q c*a", terms: vec![(one(), vec![A, CStar]), (mq(), vec![CStar, A])] },
        Relation { name: "ca* - q a*c", terms: vec![(one(), vec![C, AStar]), (mq(), vec![AStar, C])] },
        Relation { name: "cc* - c*c", terms: vec![(one(), vec![C, CStar]), (-one(), vec![CStar, C])] },
        Relation {
            name: "a*a + c*c - 1",
            terms: vec![(one(), vec![AStar, A]), (one(), vec![CStar, C]), (-one(), vec![])],
        },
        Relation {
            name: "aa* + q^2 cc* - 1",
            terms: vec![(one(), vec![A, AStar]), (&q() * &q(), vec![C, CStar]), (-one(), vec![])],
        },
    ]
}

impl Relation {
    pub fn evaluate(&self) -> Element {
        let mut out = Element::zero();
        for (c, w) in &self.terms {
            out.add_scaled(&Element::from_letters(w), c);
        }
        out
    }

    pub fn differential(&self) -> OneForm {
        let mut out = OneForm::zero();
        for (c, w) in &self.terms {
            out = &out + &word_differential(w).scale(c);
        }
        out
    }
}

fn form_failure(case: String, lhs: &OneForm, rhs: &OneForm) -> Failure {
    Failure::new(case, lhs.to_json(), rhs.to_json())
}

/// `ω₊ = a dc − q c da`, `ω₋ = c∗ da∗ − q a∗ dc∗`, `ω_z = a∗ da + c∗ dc`.
pub fn check_reconstruction() -> CheckReport {
    let mut report = CheckReport::new("omega reconstruction");
    let d = |l: Letter| differential(&Element::generator(l));
    let g = Element::generator;
    let mq = -Scalar::q();
    let cases = [
        (Index::Plus, &d(Letter::C).left_mul(&g(Letter::A)) + &d(Letter::A).left_mul(&g(Letter::C)).scale(&mq)),
        (
            Index::Minus,
            &d(Letter::AStar).left_mul(&g(Letter::CStar)) + &d(Letter::CStar).left_mul(&g(Letter::AStar)).scale(&mq),
        ),
        (Index::Z, &d(Letter::A).left_mul(&g(Letter::AStar)) + &d(Letter::C).left_mul(&g(Letter::CStar))),
    ];
    for (a, lhs) in cases {
        let rhs = OneForm::basis(a);
        report.record(lhs == rhs, || form_failure(format!("omega{}", a.name()), &lhs, &rhs));
    }
    report
}

/// `d(fg) = f dg + (df) g` for monomial pairs of combined length `<= max_len`.
pub fn check_leibniz(max_len: u32) -> CheckReport {
    let mut report = CheckReport::new("d Leibniz");
    let basis = enumerate_basis(max_len);
    for m in &basis {
        let f = Element::monomial(*m);
        let df = differential(&f);
        for n in basis.iter().filter(|n| m.len() + n.len() <= max_len) {
            let g = Element::monomial(*n);
            let lhs = differential(&(&f * &g));
            let rhs = &differential(&g).left_mul(&f) + &form_right_mul(&df, &g);
            report.record(lhs == rhs, || form_failure(format!("d(({m})({n}))"), &lhs, &rhs));
        }
    }
    report
}

/// `d` annihilates every defining relation, expanded on unreduced words.
pub fn check_relations() -> CheckReport {
    let mut report = CheckReport::new("d of defining relations");
    for r in defining_relations() {
        let dr = r.differential();
        report.record(r.evaluate().is_zero() && dr.is_zero(), || {
            form_failure(format!("d({})", r.name), &dr, &OneForm::zero())
        });
    }
    report
}

/// `ω†† = ω` and `(fω)† = ω†f∗` on forms with monomial coordinates of length `<= max_len`.
pub fn check_dagger(max_len: u32) -> CheckReport {
    let mut report = CheckReport::new("form dagger");
    let basis = enumerate_basis(max_len);
    let i = Scalar::imaginary_unit().expect("Gaussian coefficients");
    for (idx, m) in basis.iter().enumerate() {
        let n = basis[(idx * 7 + 3) % basis.len()];
        let w = OneForm::new(
            Element::monomial(*m),
            Element::term(n, i.clone()),
            &Element::monomial(n) - &Element::term(*m, Scalar::q()),
        );
        let back = form_dagger(&form_dagger(&w));
        report.record(back == w, || form_failure(format!("dagger twice, case {idx}"), &back, &w));

        let f = Element::monomial(basis[(idx * 5 + 1) % basis.len()]);
        let lhs = form_dagger(&w.left_mul(&f));
        let rhs = form_right_mul(&form_dagger(&w), &f.star());
        report.record(lhs == rhs, || form_failure(format!("(f w)^dagger, case {idx}"), &lhs, &rhs));
    }
    report
}

/// `(ω·f)·g = ω·(fg)` for basis forms and monomials.
pub fn check_bimodule(max_len: u32) -> CheckReport {
    let mut report = CheckReport::new("bimodule associativity");
    let basis = enumerate_basis(max_len);
    for a in Index::ALL {
        let w = OneForm::basis(a);
        for m in &basis {
            let f = Element::monomial(*m);
            for n in basis.iter().filter(|n| m.len() + n.len() <= max_len) {
                let g = Element::monomial(*n);
                let lhs = form_right_mul(&form_right_mul(&w, &f), &g);
                let rhs = form_right_mul(&w, &(&f * &g));
                report.record(lhs == rhs, || form_failure(format!("omega{} ({m})({n})", a.name()), &lhs, &rhs));
            }
        }
    }
    report
}

/// Reconstruction, Leibniz, relations and dagger in one report.
pub fn check_form_identities(max_len: u32) -> CheckReport {
    let mut report = CheckReport::new(format!("calculus identities (max_len {max_len})"));
    report.absorb(check_reconstruction());
    report.absorb(check_leibniz(max_len));
    report.absorb(check_relations());
    report.absorb(check_dagger(max_len.min(2)));
    report
}
