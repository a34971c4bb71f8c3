//! Twisted derivations `X₊, X₋, X_z`, their ∗-conjugates and the twists σ.
//!
//! ```text
//! X₊ = q^{1/2} EK    X₋ = q^{-1/2} FK    X_z = (1 - K⁴)/(1 - q⁻²)
//! X₊∗ = -K⁻²X₋       X₋∗ = -K⁻²X₊        X_z∗ = -K⁻⁴X_z
//! σ₊ = σ₋ = K²,  σ_z = K⁴,  σ_a∗ = σ_a⁻¹
//! ```
//!
//! All of them are U_q elements, so they act on either side; products such
//! as `K⁻²X₋` are products in U_q, not compositions of maps.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{enumerate_basis, Element, Monomial};
use crate::json::element_to_json;
use crate::report::{CheckReport, Failure};
use crate::uq::{act, Side, UqElement, UqGen};
use crate::Scalar;

/// Index `a ∈ {+, −, z}` of a derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Index {
    Plus,
    Minus,
    Z,
}

impl Index {
    pub const ALL: [Index; 3] = [Index::Plus, Index::Minus, Index::Z];

    pub fn name(self) -> &'static str {
        match self {
            Index::Plus => "+",
            Index::Minus => "-",
            Index::Z => "z",
        }
    }

    /// Position in the ordered frame `(+, −, z)`.
    pub fn pos(self) -> usize {
        self as usize
    }

    /// The index with `X_a∗ = −σ_a∗ X_{opposite(a)}`.
    pub fn opposite(self) -> Index {
        match self {
            Index::Plus => Index::Minus,
            Index::Minus => Index::Plus,
            Index::Z => Index::Z,
        }
    }
}

/// The six basis fields, in the order `X₊, X₋, X_z, X₊∗, X₋∗, X_z∗`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisField {
    pub index: Index,
    pub starred: bool,
}

impl BasisField {
    pub const ALL: [BasisField; 6] = [
        BasisField::plain(Index::Plus),
        BasisField::plain(Index::Minus),
        BasisField::plain(Index::Z),
        BasisField::star_of(Index::Plus),
        BasisField::star_of(Index::Minus),
        BasisField::star_of(Index::Z),
    ];

    pub const fn plain(index: Index) -> Self {
        BasisField { index, starred: false }
    }

    pub const fn star_of(index: Index) -> Self {
        BasisField { index, starred: true }
    }

    pub fn pos(self) -> usize {
        self.index.pos() + if self.starred { 3 } else { 0 }
    }

    pub fn star(self) -> Self {
        BasisField { index: self.index, starred: !self.starred }
    }

    /// Realization as an element of U_q.
    pub fn operator(self) -> UqElement {
        let plain = match self.index {
            Index::Plus => UqElement::word(&[UqGen::E, UqGen::K]).scale(&Scalar::s()),
            Index::Minus => UqElement::word(&[UqGen::F, UqGen::K]).scale(&Scalar::s_pow(-1)),
            Index::Z => {
                let c = (&Scalar::one() - &Scalar::q_pow(-2)).inv().expect("1 - q^-2 is nonzero");
                (&UqElement::one() - &UqElement::k_pow(4)).scale(&c)
            }
        };
        if !self.starred {
            return plain;
        }
        let twist = SigmaMap::star_of(self.index).operator();
        let partner = BasisField::plain(self.index.opposite()).operator();
        -&(&twist * &partner)
    }

    pub fn apply(self, f: &Element, side: Side) -> Element {
        act(&self.operator(), f, side)
    }

    /// The twist appearing in the Leibniz rule of this field.
    pub fn sigma(self) -> SigmaMap {
        SigmaMap { index: self.index, starred: self.starred }
    }
}

impl fmt::Display for BasisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}{}", self.index.name(), if self.starred { "*" } else { "" })
    }
}

/// One of `σ₊, σ₋, σ_z` or their inverses `σ₊∗, σ₋∗, σ_z∗`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SigmaMap {
    pub index: Index,
    pub starred: bool,
}

impl SigmaMap {
    pub const fn plain(index: Index) -> Self {
        SigmaMap { index, starred: false }
    }

    pub const fn star_of(index: Index) -> Self {
        SigmaMap { index, starred: true }
    }

    /// Power `n` of `K` realizing the map.
    pub fn k_power(self) -> i64 {
        let n = if self.index == Index::Z { 4 } else { 2 };
        if self.starred {
            -n
        } else {
            n
        }
    }

    pub fn operator(self) -> UqElement {
        UqElement::k_pow(self.k_power())
    }
}

impl fmt::Display for SigmaMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma{}{}", self.index.name(), if self.starred { "*" } else { "" })
    }
}

/// Applies a twist. `K` acts diagonally on monomials, so this is a rescaling.
pub fn sigma_apply(sigma: SigmaMap, f: &Element, side: Side) -> Element {
    act(&sigma.operator(), f, side)
}

/// Constant linear combination of the six basis fields acting on one side.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub coeffs: [Scalar; 6],
    pub side: Side,
}

impl VectorField {
    pub fn zero(side: Side) -> Self {
        VectorField { coeffs: Default::default(), side }
    }

    pub fn basis(b: BasisField, side: Side) -> Self {
        let mut x = VectorField::zero(side);
        x.coeffs[b.pos()] = Scalar::one();
        x
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        VectorField { coeffs: self.coeffs.clone().map(|x| &x * c), side: self.side }
    }

    pub fn operator(&self) -> UqElement {
        let mut out = UqElement::zero();
        for (b, c) in BasisField::ALL.iter().zip(&self.coeffs) {
            if !c.is_zero() {
                out = &out + &b.operator().scale(c);
            }
        }
        out
    }
}

pub fn apply_field(x: &VectorField, f: &Element) -> Element {
    let mut out = Element::zero();
    for (b, c) in BasisField::ALL.iter().zip(&x.coeffs) {
        if !c.is_zero() {
            out.add_scaled(&b.apply(f, x.side), c);
        }
    }
    out
}

/// `(Σ λ_b X_b)∗ = Σ conj(λ_b) X_b∗`, with `X_b∗∗ = X_b`.
pub fn star_field(x: &VectorField) -> VectorField {
    let mut out = VectorField::zero(x.side);
    for b in BasisField::ALL {
        out.coeffs[b.star().pos()] = x.coeffs[b.pos()].conjugate();
    }
    out
}

fn residual_failure(case: String, lhs: &Element, rhs: &Element) -> Failure {
    Failure::new(case, element_to_json(lhs), element_to_json(rhs))
}

/// Checks `X_a(fg) = f X_a(g) + X_a(f) σ_a(g)` and
/// `X_a∗(fg) = σ_a∗(f) X_a∗(g) + X_a∗(f) g`.
pub fn check_twisted_leibniz(a: Index, f: &Element, g: &Element, side: Side) -> CheckReport {
    let mut report = CheckReport::new(format!("twisted Leibniz X{} ({})", a.name(), side.name()));
    let fg = f * g;

    let x = BasisField::plain(a);
    let lhs = x.apply(&fg, side);
    let rhs = &(f * &x.apply(g, side)) + &(&x.apply(f, side) * &sigma_apply(x.sigma(), g, side));
    report.record(lhs == rhs, || residual_failure(format!("{x} on ({f})({g})"), &lhs, &rhs));

    let xs = BasisField::star_of(a);
    let lhs = xs.apply(&fg, side);
    let rhs = &(&sigma_apply(xs.sigma(), f, side) * &xs.apply(g, side)) + &(&xs.apply(f, side) * g);
    report.record(lhs == rhs, || residual_failure(format!("{xs} on ({f})({g})"), &lhs, &rhs));
    report
}

/// Twisted Leibniz for all indices over all ordered pairs of monomials with
/// combined length `<= max_len`.
pub fn check_leibniz_sweep(max_len: u32, side: Side) -> CheckReport {
    let mut report = CheckReport::new(format!("twisted Leibniz sweep ({})", side.name()));
    let basis = enumerate_basis(max_len);
    for m in &basis {
        for n in basis.iter().filter(|n| m.len() + n.len() <= max_len) {
            for a in Index::ALL {
                report.absorb(check_twisted_leibniz(a, &Element::monomial(*m), &Element::monomial(*n), side));
            }
        }
    }
    report
}

/// The three commutation relations as identities in U_q, checked on every
/// monomial of length `<= max_len`:
/// `X₋X₊ − q²X₊X₋ = X_z`, `q²X_zX₋ − q⁻²X₋X_z = (1+q²)X₋`,
/// `q²X₊X_z − q⁻²X_zX₊ = (1+q²)X₊`.
pub fn check_commutation_relations(max_len: u32, side: Side) -> CheckReport {
    let xp = BasisField::plain(Index::Plus).operator();
    let xm = BasisField::plain(Index::Minus).operator();
    let xz = BasisField::plain(Index::Z).operator();
    let (q2, qm2) = (Scalar::q_pow(2), Scalar::q_pow(-2));
    let one_q2 = &Scalar::one() + &q2;
    let rels = [
        ("X-X+ - q^2 X+X- = Xz", &(&xm * &xp) - &(&xp * &xm).scale(&q2), xz.clone()),
        ("q^2 XzX- - q^-2 X-Xz = (1+q^2) X-", &(&xz * &xm).scale(&q2) - &(&xm * &xz).scale(&qm2), xm.scale(&one_q2)),
        ("q^2 X+Xz - q^-2 XzX+ = (1+q^2) X+", &(&xp * &xz).scale(&q2) - &(&xz * &xp).scale(&qm2), xp.scale(&one_q2)),
    ];
    let mut report = CheckReport::new(format!("commutation relations ({})", side.name()));
    for (name, lhs, rhs) in rels {
        report.absorb(crate::uq::check_operator_identity(name, &lhs, &rhs, max_len, side));
    }
    report
}

/// `X∗(f) = (X(f∗))∗` for every basis field and monomial of length `<= max_len`.
pub fn check_star_fields(max_len: u32, side: Side) -> CheckReport {
    let mut report = CheckReport::new(format!("starred fields ({})", side.name()));
    for m in enumerate_basis(max_len) {
        let f = Element::monomial(m);
        for b in BasisField::ALL {
            let lhs = b.star().apply(&f, side);
            let rhs = b.apply(&f.star(), side).star();
            report.record(lhs == rhs, || residual_failure(format!("{b}* on {m}"), &lhs, &rhs));
        }
    }
    report
}

/// σ_a are multiplicative and `σ_a∗ ∘ σ_a = id`.
pub fn check_sigma_laws(max_len: u32, side: Side) -> CheckReport {
    let mut report = CheckReport::new(format!("sigma laws ({})", side.name()));
    let basis = enumerate_basis(max_len);
    for a in Index::ALL {
        let (s, si) = (SigmaMap::plain(a), SigmaMap::star_of(a));
        for m in &basis {
            let f = Element::monomial(*m);
            let back = sigma_apply(si, &sigma_apply(s, &f, side), side);
            report.record(back == f, || residual_failure(format!("{si} o {s} on {m}"), &back, &f));
            for n in basis.iter().filter(|n| m.len() + n.len() <= max_len) {
                let g = Element::monomial(*n);
                let lhs = sigma_apply(s, &(&f * &g), side);
                let rhs = &sigma_apply(s, &f, side) * &sigma_apply(s, &g, side);
                report.record(lhs == rhs, || residual_failure(format!("{s} on ({m})({n})"), &lhs, &rhs));
            }
        }
    }
    report
}

/// Monomials fixed by `K` on the given side (e.g. `cc∗`) are killed by `X_z`.
pub fn check_k_invariant_kernel(max_len: u32, side: Side) -> CheckReport {
    let mut report = CheckReport::new(format!("X_z kills K-invariants ({})", side.name()));
    let xz = BasisField::plain(Index::Z);
    for m in enumerate_basis(max_len).into_iter().filter(|m| crate::uq::k_weight(m, side) == 0) {
        let out = xz.apply(&Element::monomial(m), side);
        report.record(out.is_zero(), || residual_failure(format!("Xz on {m}"), &out, &Element::zero()));
    }
    report
}

/// Convenience for tests and the harness.
pub fn monomial(alpha: i32, j: u32, k: u32) -> Element {
    Element::monomial(Monomial::new(alpha, j, k))
}
