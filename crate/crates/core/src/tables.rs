//! Closed-form action tables, the generator pairing table and engine-health
//! sweeps, each as a [`CheckReport`].

use rand::seq::SliceRandom;

use crate::algebra::{enumerate_basis, Element};
use crate::json::{element_to_json, scalar_to_json};
use crate::report::{CheckReport, Failure};
use crate::sample;
use crate::uq::{act, pairing, Side, UqElement, UqGen};
use crate::Scalar;

/// One row of a power table: `h ▷ x^n = want` (or `x^n ◁ h`). `K^{±1}` rows
/// carry both signs and count as a single row.
pub struct PowerRow {
    pub label: String,
    pub side: Side,
    pub is_k_row: bool,
    pub equalities: Vec<(UqElement, Element, Element)>,
}

fn s(n: i64) -> Scalar {
    Scalar::s_pow(n)
}

/// The closed-form rows for the power `n >= 1`: on each side four `K^{±1}`
/// rows and eight `E`, `F` rows.
pub fn power_rows(n: u32) -> Vec<PowerRow> {
    assert!(n >= 1, "power tables start at n = 1");
    let ni = n as i64;
    let (a, ast, c, cst) = (Element::a(), Element::a_star(), Element::c(), Element::c_star());
    let (e, f) = (UqElement::gen(UqGen::E), UqElement::gen(UqGen::F));
    let (k, ki) = (UqElement::gen(UqGen::K), UqElement::gen(UqGen::KInv));
    let qn = Scalar::q_integer(ni);
    let p = |x: &Element, m: u32| x.pow(m);
    // K^{±1} acting by s^{±w}
    let k_row = |side: Side, name: &str, x: &Element, w: i64| PowerRow {
        label: format!("K^±1 {name}^{n} ({})", side.name()),
        side,
        is_k_row: true,
        equalities: vec![
            (k.clone(), p(x, n), p(x, n).scale(&s(w))),
            (ki.clone(), p(x, n), p(x, n).scale(&s(-w))),
        ],
    };
    let row = |side: Side, g: &UqElement, gname: &str, name: &str, x: &Element, want: Element| PowerRow {
        label: format!("{gname} {name}^{n} ({})", side.name()),
        side,
        is_k_row: false,
        equalities: vec![(g.clone(), p(x, n), want)],
    };
    let (l, r) = (Side::Left, Side::Right);
    let z = Element::zero;
    vec![
        k_row(l, "a", &a, -ni),
        k_row(l, "c", &c, -ni),
        k_row(l, "a*", &ast, ni),
        k_row(l, "c*", &cst, ni),
        row(l, &e, "E", "a", &a, (&p(&a, n - 1) * &cst).scale(&-(&s(3 - ni) * &qn))),
        row(l, &e, "E", "c", &c, (&p(&c, n - 1) * &ast).scale(&(&s(1 - ni) * &qn))),
        row(l, &e, "E", "a*", &ast, z()),
        row(l, &e, "E", "c*", &cst, z()),
        row(l, &f, "F", "a", &a, z()),
        row(l, &f, "F", "c", &c, z()),
        row(l, &f, "F", "a*", &ast, (&c * &p(&ast, n - 1)).scale(&(&s(1 - ni) * &qn))),
        row(l, &f, "F", "c*", &cst, (&a * &p(&cst, n - 1)).scale(&-(&s(-1 - ni) * &qn))),
        k_row(r, "a", &a, -ni),
        k_row(r, "a*", &ast, ni),
        k_row(r, "c", &c, ni),
        k_row(r, "c*", &cst, -ni),
        row(r, &f, "F", "a", &a, (&c * &p(&a, n - 1)).scale(&(&s(ni - 1) * &qn))),
        row(r, &f, "F", "a*", &ast, z()),
        row(r, &f, "F", "c", &c, z()),
        row(r, &f, "F", "c*", &cst, (&ast * &p(&cst, n - 1)).scale(&-(&s(ni - 3) * &qn))),
        row(r, &e, "E", "a", &a, z()),
        // exponent (3-n)/2: a*◁E = -q c* at n = 1
        row(r, &e, "E", "a*", &ast, (&cst * &p(&ast, n - 1)).scale(&-(&s(3 - ni) * &qn))),
        row(r, &e, "E", "c", &c, (&p(&c, n - 1) * &a).scale(&(&s(ni - 1) * &qn))),
        row(r, &e, "E", "c*", &cst, z()),
    ]
}

/// Every power row for `n = 1..=max_n`, one case per row; the `E`, `F` rows
/// and the `K^{±1}` rows are reported separately.
pub fn check_power_tables(max_n: u32) -> [CheckReport; 2] {
    let mut ef = CheckReport::new("power tables, E and F rows");
    let mut k = CheckReport::new("power tables, K rows");
    for n in 1..=max_n {
        for row in power_rows(n) {
            let bad = row.equalities.iter().find_map(|(h, x, want)| {
                let got = act(h, x, row.side);
                (&got != want).then(|| (got, want.clone()))
            });
            let report = if row.is_k_row { &mut k } else { &mut ef };
            report.record(bad.is_none(), || {
                let (got, want) = bad.expect("failure has a witness");
                Failure::new(row.label.clone(), element_to_json(&got), element_to_json(&want))
            });
        }
    }
    [ef, k]
}

/// `⟨g, x⟩ = ε(g ▷ x)` for every generator `g` of U_q and every letter `x`.
pub fn pairing_table() -> Vec<(UqGen, Element, Scalar)> {
    let (a, ast, c, cst) = (Element::a(), Element::a_star(), Element::c(), Element::c_star());
    let zero = Scalar::zero;
    vec![
        (UqGen::K, a.clone(), s(-1)),
        (UqGen::KInv, a.clone(), s(1)),
        (UqGen::K, ast.clone(), s(1)),
        (UqGen::KInv, ast.clone(), s(-1)),
        (UqGen::E, c.clone(), Scalar::one()),
        (UqGen::F, cst.clone(), -Scalar::q_pow(-1)),
        (UqGen::K, c.clone(), zero()),
        (UqGen::K, cst.clone(), zero()),
        (UqGen::KInv, c.clone(), zero()),
        (UqGen::KInv, cst.clone(), zero()),
        (UqGen::E, a.clone(), zero()),
        (UqGen::E, ast.clone(), zero()),
        (UqGen::E, cst, zero()),
        (UqGen::F, a, zero()),
        (UqGen::F, ast, zero()),
        (UqGen::F, c, zero()),
    ]
}

pub fn check_pairing_table() -> CheckReport {
    let mut report = CheckReport::new("generator pairings");
    for (g, x, want) in pairing_table() {
        let got = pairing(&UqElement::gen(g), &x);
        report.record(got == want, || {
            Failure::new(format!("<{}, {x}>", g.name()), scalar_to_json(&got), scalar_to_json(&want))
        });
    }
    report
}

/// `(xy)z = x(yz)` on `count` seeded triples of monomials of length `<= max_len`.
pub fn check_associativity(seed: u64, count: usize, max_len: u32) -> CheckReport {
    let mut rng = sample::rng(seed);
    let basis = enumerate_basis(max_len);
    let mut report = CheckReport::new("associativity");
    for _ in 0..count {
        let mut pick = || Element::monomial(*basis.choose(&mut rng).expect("basis contains 1"));
        let (x, y, z) = (pick(), pick(), pick());
        let lhs = &(&x * &y) * &z;
        let rhs = &x * &(&y * &z);
        report.record(lhs == rhs, || {
            Failure::new(format!("({x})({y})({z})"), element_to_json(&lhs), element_to_json(&rhs))
        });
    }
    report
}

/// `(xy)∗ = y∗x∗` on all ordered pairs of monomials of length `<= max_len`.
pub fn check_star_antihomomorphism(max_len: u32) -> CheckReport {
    let basis: Vec<Element> = enumerate_basis(max_len).into_iter().map(Element::monomial).collect();
    let mut report = CheckReport::new("star antihomomorphism");
    for x in &basis {
        for y in &basis {
            let lhs = (x * y).star();
            let rhs = &y.star() * &x.star();
            report.record(lhs == rhs, || Failure::new(format!("({x})({y})"), element_to_json(&lhs), element_to_json(&rhs)));
        }
    }
    report
}

/// `[n+1] = (q + q⁻¹)[n] − [n−1]` and `[−n] = −[n]` for `|n| <= max_n`.
pub fn check_q_integer_recurrence(max_n: i64) -> CheckReport {
    let qi = Scalar::q_integer;
    let q_sum = &Scalar::q() + &Scalar::q_pow(-1);
    let mut report = CheckReport::new("q-integer recurrence");
    for n in -max_n..=max_n {
        let lhs = qi(n + 1);
        let rhs = &(&q_sum * &qi(n)) - &qi(n - 1);
        report.record(lhs == rhs, || Failure::new(format!("[{}]", n + 1), scalar_to_json(&lhs), scalar_to_json(&rhs)));
        let neg = -qi(n);
        report.record(qi(-n) == neg, || Failure::new(format!("[-{n}]"), scalar_to_json(&qi(-n)), scalar_to_json(&neg)));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_counts() {
        for n in 1..=5 {
            let rows = power_rows(n);
            assert_eq!(rows.iter().filter(|r| !r.is_k_row).count(), 16);
            assert_eq!(rows.iter().filter(|r| r.side == Side::Left).count(), 12);
        }
        let [ef, k] = check_power_tables(2);
        assert_eq!((ef.cases, k.cases), (32, 16));
    }

    #[test]
    fn small_engine_sweeps() {
        assert!(check_associativity(1, 50, 2).passed());
        assert!(check_star_antihomomorphism(2).passed());
        let r = check_q_integer_recurrence(5);
        assert!(r.passed());
        assert_eq!(r.cases, 22);
    }
}
