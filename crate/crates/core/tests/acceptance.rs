//! Acceptance run: one PASS/FAIL line per criterion, with oracles written out
//! here independently of the library tables.
//!
//! Criterion 8 contains two identities that fail under exact evaluation (see
//! the project notes on the right-field relation and the V-form of `d`). Its
//! line prints FAIL; the attainable parts are still enforced. The process
//! exits nonzero on any other failure, and on every failure when
//! `ACCEPTANCE_STRICT=1` is set.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qsphere_core::algebra::enumerate_basis;
use qsphere_core::calculus::{self, differential, OneForm};
use qsphere_core::connections::{
    check_metric_compatibility, check_torsion_free, check_torsion_free_christoffel, identity_matrix, levi_civita,
    metric_connection_from_params, perturb, CompatLevel, ConnectionError, HermitianMetric, LCParams, Matrix,
    SigmaModule,
};
use qsphere_core::derivations::{self, BasisField, Index};
use qsphere_core::harness::{
    generic_constant_metric, nonconstant_test_metrics, reality_violating_metric, sample_lc_params,
    sample_metric_params, sample_s2_element,
};
use qsphere_core::podles::{self, b0, b_minus, b_plus, basis_indices};
use qsphere_core::uq::{act, pairing};
use qsphere_core::{sample, CheckReport, Element, Monomial, Scalar, Side, UqElement, UqGen};

fn q(n: i64) -> Scalar {
    Scalar::q_pow(n)
}

fn s(n: i64) -> Scalar {
    Scalar::s_pow(n)
}

fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn half() -> Scalar {
    Scalar::from_ratio(1, 2)
}

/// `(qⁿ − q⁻ⁿ)/(q − q⁻¹)` by field division.
fn qint(n: i64) -> Scalar {
    (&q(n) - &q(-n)).checked_div(&(&q(1) - &q(-1))).unwrap()
}

/// Outcome of one criterion: failed sub-checks, with the known-unattainable
/// ones listed separately.
#[derive(Default)]
struct Outcome {
    notes: Vec<String>,
    failures: Vec<String>,
    known: Vec<String>,
}

impl Outcome {
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn require_report(&mut self, r: &CheckReport) {
        if !r.passed() {
            let first = r.failures.first().map(|f| f.case.clone()).unwrap_or_default();
            self.failures.push(format!("{}: {}/{} failed (first: {first})", r.name, r.failed, r.cases));
        }
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

fn c1_action_tables() -> Outcome {
    let mut o = Outcome::default();
    let (a, ast, c, cst) = (Element::a(), Element::a_star(), Element::c(), Element::c_star());
    let (e, f) = (UqElement::gen(UqGen::E), UqElement::gen(UqGen::F));
    let (k, ki) = (UqElement::gen(UqGen::K), UqElement::gen(UqGen::KInv));
    let (mut rows, mut k_rows) = (0, 0);
    for n in 1..=5i64 {
        let nu = n as u32;
        let p = |x: &Element, m: i64| x.pow(m as u32);
        let z = Element::zero();
        // (generator, side, input, expected) for the E and F rows
        let ef: Vec<(&UqElement, Side, Element, Element, &str)> = vec![
            (&e, Side::Left, p(&a, n), (&p(&a, n - 1) * &cst).scale(&-(&s(3 - n) * &qint(n))), "E▷a^n"),
            (&e, Side::Left, p(&c, n), (&p(&c, n - 1) * &ast).scale(&(&s(1 - n) * &qint(n))), "E▷c^n"),
            (&e, Side::Left, p(&ast, n), z.clone(), "E▷a*^n"),
            (&e, Side::Left, p(&cst, n), z.clone(), "E▷c*^n"),
            (&f, Side::Left, p(&a, n), z.clone(), "F▷a^n"),
            (&f, Side::Left, p(&c, n), z.clone(), "F▷c^n"),
            (&f, Side::Left, p(&ast, n), (&c * &p(&ast, n - 1)).scale(&(&s(1 - n) * &qint(n))), "F▷a*^n"),
            (&f, Side::Left, p(&cst, n), (&a * &p(&cst, n - 1)).scale(&-(&s(-1 - n) * &qint(n))), "F▷c*^n"),
            (&f, Side::Right, p(&a, n), (&c * &p(&a, n - 1)).scale(&(&s(n - 1) * &qint(n))), "a^n◁F"),
            (&f, Side::Right, p(&ast, n), z.clone(), "a*^n◁F"),
            (&f, Side::Right, p(&c, n), z.clone(), "c^n◁F"),
            (&f, Side::Right, p(&cst, n), (&ast * &p(&cst, n - 1)).scale(&-(&s(n - 3) * &qint(n))), "c*^n◁F"),
            (&e, Side::Right, p(&a, n), z.clone(), "a^n◁E"),
            // exponent (3-n)/2, forced by a*◁E = -q c* from the pairing
            (&e, Side::Right, p(&ast, n), (&cst * &p(&ast, n - 1)).scale(&-(&s(3 - n) * &qint(n))), "a*^n◁E"),
            (&e, Side::Right, p(&c, n), (&p(&c, n - 1) * &a).scale(&(&s(n - 1) * &qint(n))), "c^n◁E"),
            (&e, Side::Right, p(&cst, n), z.clone(), "c*^n◁E"),
        ];
        for (h, side, x, want, label) in ef {
            rows += 1;
            o.require(act(h, &x, side) == want, format!("{label}, n = {nu}"));
        }
        // K^{±1} weights: left a, c: -1; a*, c*: +1. right a, c*: -1; a*, c: +1.
        let weights = [
            (Side::Left, &a, -1),
            (Side::Left, &c, -1),
            (Side::Left, &ast, 1),
            (Side::Left, &cst, 1),
            (Side::Right, &a, -1),
            (Side::Right, &cst, -1),
            (Side::Right, &ast, 1),
            (Side::Right, &c, 1),
        ];
        for (side, x, w) in weights {
            k_rows += 1;
            let xn = p(x, n);
            let ok = act(&k, &xn, side) == xn.scale(&s(w * n)) && act(&ki, &xn, side) == xn.scale(&s(-w * n));
            o.require(ok, format!("K^±1 on {x}^{nu} ({})", side.name()));
        }
    }
    o.require(rows == 80, format!("expected 80 E/F equalities, ran {rows}"));
    o.note(format!("{rows} E/F equalities, {k_rows} K^±1 rows"));
    o
}

fn c2_pairings() -> Outcome {
    let mut o = Outcome::default();
    let (a, ast, c, cst) = (Element::a(), Element::a_star(), Element::c(), Element::c_star());
    let letters = [("a", &a), ("a*", &ast), ("c", &c), ("c*", &cst)];
    let mut nonzero = 0;
    for g in [UqGen::K, UqGen::KInv, UqGen::E, UqGen::F] {
        for (name, x) in letters {
            let want = match (g, name) {
                (UqGen::K, "a") | (UqGen::KInv, "a*") => s(-1),
                (UqGen::KInv, "a") | (UqGen::K, "a*") => s(1),
                (UqGen::E, "c") => Scalar::one(),
                (UqGen::F, "c*") => -q(-1),
                _ => Scalar::zero(),
            };
            if !want.is_zero() {
                nonzero += 1;
            }
            o.require(pairing(&UqElement::gen(g), x) == want, format!("<{}, {name}>", g.name()));
        }
    }
    o.note(format!("16 generator pairs, {nonzero} nonzero"));
    o
}

fn c3_leibniz() -> Outcome {
    let mut o = Outcome::default();
    let mut cases = 0;
    for side in Side::BOTH {
        let r = derivations::check_leibniz_sweep(4, side);
        cases += r.cases;
        o.require_report(&r);
        // explicit spot check on a product outside the sweep
        let (f, g) = (&Element::a() * &Element::c(), &Element::c_star() * &Element::a_star());
        o.require_report(&derivations::check_twisted_leibniz(Index::Z, &f, &g, side));
    }
    // (L+1)² monomials of length L; ordered pairs of total length <= 4, three
    // indices, plain and starred, two sides
    let by_len = |l: usize| (l + 1) * (l + 1);
    let pairs: usize = (0..=4).flat_map(|i| (0..=4 - i).map(move |j| by_len(i) * by_len(j))).sum();
    o.require(pairs == 406, "406 monomial pairs");
    o.require(cases == pairs * 3 * 2 * 2, format!("expected {} Leibniz cases, ran {cases}", pairs * 12));
    o.note(format!("{cases} plain and starred Leibniz cases"));
    o
}

fn c4_commutation() -> Outcome {
    let mut o = Outcome::default();
    let mut cases = 0;
    for side in Side::BOTH {
        let r = derivations::check_commutation_relations(4, side);
        cases += r.cases;
        o.require_report(&r);
    }
    let basis = enumerate_basis(4).len();
    o.require(cases == 2 * 3 * basis, "one case per relation, monomial and side");
    o.note(format!("3 relations on {basis} monomials, both sides"));
    o
}

fn c5_calculus() -> Outcome {
    let mut o = Outcome::default();
    let recon = calculus::check_reconstruction();
    o.require(recon.cases == 3, "three reconstruction identities");
    o.require_report(&recon);
    o.require_report(&calculus::check_leibniz(4));
    let rel = calculus::check_relations();
    o.require(rel.cases == 7, "seven relation differences");
    o.require_report(&rel);
    o.require_report(&calculus::check_dagger(4));
    // d(cc*) in the ω-basis
    let db0 = differential(&b0());
    let want = OneForm::new(&Element::c_star() * &Element::a_star(), (&Element::c() * &Element::a()).scale(&-q(-1)), Element::zero());
    o.require(db0 == want, "d(cc*) = c*a* ω+ - q^-1 ca ω-");
    o
}

fn c6_metric_connections(seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let mut rng = sample::rng(seed);
    let generic = generic_constant_metric(&mut rng, 3);
    let samples: Vec<_> = (0..20).map(|_| sample_metric_params(&mut rng, 3)).collect();
    let mut built = 0;
    for side in Side::BOTH {
        let module = SigmaModule::one_forms(side);
        let mut conns = Vec::new();
        for (a, b, r) in &samples {
            for m in [HermitianMetric::delta(3), generic.clone()] {
                let conn = metric_connection_from_params(&module, &m, a, b, r).unwrap();
                o.require_report(&check_metric_compatibility(&conn, CompatLevel::GammaTilde).unwrap());
                o.require_report(&check_metric_compatibility(&conn, CompatLevel::Module).unwrap());
                conns.push(conn);
                built += 1;
            }
        }
        for (k, conn) in conns.iter().enumerate().take(5) {
            let a = Index::ALL[k % 3];
            let by = enumerate_basis(1)[k % 5];
            let bad = perturb(conn, a, k % 3, (k + 1) % 3, by);
            let r = check_metric_compatibility(&bad, CompatLevel::GammaTilde).unwrap();
            let nonzero = r.failures.iter().all(|f| f.lhs != f.rhs);
            o.require(!r.passed() && nonzero, format!("perturbation {k} ({}) went undetected", side.name()));
        }
    }
    o.note(format!("{built} connections, 10 perturbations rejected"));
    o
}

fn delta_oracle() -> [Matrix; 3] {
    let (p, m, z) = (0, 1, 2);
    let mut g: [Matrix; 3] = std::array::from_fn(|_| vec![vec![Element::zero(); 3]; 3]);
    let e = Element::from_scalar;
    // ∇₊ω₋ = −½q⁻²ω_z, ∇₊ω_z = ½ω₊, ∇₋ω₊ = ½ω_z, ∇₋ω_z = −½q⁻²ω₋
    g[p][m][z] = e(-(&half() * &q(-2)));
    g[p][z][p] = e(half());
    g[m][p][z] = e(half());
    g[m][z][m] = e(-(&half() * &q(-2)));
    // ∇_zω₊ = −½q²(2+q²)ω₊, ∇_zω₋ = ½(2+2q⁻²−q⁻⁶)ω₋
    g[z][p][p] = e(-(&(&half() * &q(2)) * &(&int(2) + &q(2))));
    g[z][m][m] = e(&half() * &(&(&int(2) + &(&int(2) * &q(-2))) - &q(-6)));
    g
}

fn c7_levi_civita(seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let oracle = delta_oracle();
    for side in Side::BOTH {
        let conn = levi_civita(&HermitianMetric::delta(3), &LCParams::default(), side).unwrap();
        let mut equal = 0;
        for a in Index::ALL {
            for i in 0..3 {
                for j in 0..3 {
                    if conn.gamma_tilde_entry(a, i, j) == &oracle[a.pos()][i][j] {
                        equal += 1;
                    }
                }
            }
        }
        o.require(equal == 27, format!("delta list ({}): {equal}/27 symbols match", side.name()));
        o.require_report(&check_torsion_free_christoffel(&conn).unwrap());
        o.require_report(&check_torsion_free(&conn).unwrap());
        o.require_report(&check_metric_compatibility(&conn, CompatLevel::Module).unwrap());
        o.require_report(&check_metric_compatibility(&conn, CompatLevel::GammaTilde).unwrap());
    }

    let mut h = identity_matrix(3);
    h[0][0] = &Element::one() + &b0();
    let conn = levi_civita(&HermitianMetric::new(h).unwrap(), &LCParams::default(), Side::Left).unwrap();
    o.require_report(&check_torsion_free(&conn).unwrap());
    o.require_report(&check_metric_compatibility(&conn, CompatLevel::GammaTilde).unwrap());
    for (label, m) in nonconstant_test_metrics() {
        let conn = levi_civita(&m, &LCParams::default(), Side::Left).unwrap();
        let ok = check_torsion_free(&conn).unwrap().passed()
            && check_metric_compatibility(&conn, CompatLevel::GammaTilde).unwrap().passed();
        o.require(ok, format!("non-constant metric {label}"));
    }

    let mut rng = sample::rng(seed);
    for side in Side::BOTH {
        for _ in 0..5 {
            let m = generic_constant_metric(&mut rng, 3);
            let conn = levi_civita(&m, &sample_lc_params(&mut rng), side).unwrap();
            o.require_report(&check_torsion_free_christoffel(&conn).unwrap());
            o.require_report(&check_torsion_free(&conn).unwrap());
            o.require_report(&check_metric_compatibility(&conn, CompatLevel::Module).unwrap());
            o.require_report(&check_metric_compatibility(&conn, CompatLevel::GammaTilde).unwrap());
        }
    }

    match levi_civita(&reality_violating_metric(), &LCParams::default(), Side::Left) {
        Err(ConnectionError::Reality { residual }) => {
            // H = q X₊(h_{−z}) − q⁻¹ X₋(h_{+z}) = −q⁻¹ X₋(ac∗) = q⁻² a²
            let want = Element::a().pow(2).scale(&q(-2));
            o.require(residual == want, format!("reality residual {residual}"));
            o.note(format!("reality violation rejected with H = {residual}"));
        }
        other => o.require(false, format!("reality violation not rejected: {:?}", other.map(|_| ()))),
    }
    o
}

fn c8_podles() -> Outcome {
    let mut o = Outcome::default();
    let (bp, bm, b) = (b_plus(), b_minus(), b0());
    let one = Element::one();
    let opq2 = &int(1) + &q(2);
    let table = [
        (&b, Index::Plus, bm.scale(&q(-1))),
        (&b, Index::Minus, bp.scale(&-q(-1))),
        (&b, Index::Z, Element::zero()),
        (&bp, Index::Plus, &one.scale(&q(1)) - &b.scale(&(&q(1) * &opq2))),
        (&bp, Index::Minus, Element::zero()),
        (&bp, Index::Z, bp.scale(&-(&q(2) * &opq2))),
        (&bm, Index::Plus, Element::zero()),
        (&bm, Index::Minus, &one.scale(&-q(-1)) + &b.scale(&(&q(-1) * &opq2))),
        (&bm, Index::Z, bm.scale(&(&int(1) + &q(-2)))),
    ];
    for (x, a, want) in table {
        let got = podles::y_action(x, a);
        o.require(matches!(&got, Ok(v) if *v == want), format!("{x} ◁ Y{}", a.name()));
    }
    let leaves = BasisField::plain(Index::Plus).apply(&b, Side::Left);
    let want = (&Element::a_star() * &Element::c_star()).scale(&q(1));
    o.require(leaves == want && !leaves.is_degree_zero(), "X+ ▷ B0 = q a*c* outside S²_q");

    let indices = basis_indices(4, 4);
    o.require(indices.len() == 45, format!("{} basis indices", indices.len()));
    let rvf_fail = indices.iter().filter(|i| !podles::check_rvf_relation(**i).passed()).count();
    let v_fail = indices.iter().filter(|i| !podles::check_v_differential(**i).passed()).count();
    let left_fail = indices.iter().filter(|i| !podles::check_left_db_expansion(**i).passed()).count();
    o.require(left_fail == 0, format!("left-action dB expansion fails on {left_fail}/45"));
    o.require_report(&podles::check_db_forms());
    if rvf_fail > 0 {
        o.known.push(format!("right-field relation fails on {rvf_fail}/45 indices"));
    }
    if v_fail > 0 {
        o.known.push(format!("V-form of d fails on {v_fail}/45 indices"));
    }
    o
}

fn c9_bundles(seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let mut rng = sample::rng(seed);
    for n in -4..=4i64 {
        let p = match podles::build_projectors(n) {
            Ok(p) => p,
            Err(e) => {
                o.require(false, format!("p_{n}: {e}"));
                continue;
            }
        };
        let dim = p.dim();
        // Σ w_μ word_μ∗ word_μ = 1
        let partition = (0..dim).fold(Element::zero(), |acc, mu| {
            &acc + &(&p.words[mu].star() * &p.words[mu]).scale(&p.weights[mu])
        });
        o.require(partition == Element::one(), format!("partition of unity, n = {n}"));
        for mu in 0..dim {
            for ka in 0..dim {
                let entry = &p.matrix[mu][ka];
                o.require(entry.is_degree_zero(), format!("p_{n}[{mu}][{ka}] has degree 0"));
                let sq = (0..dim).fold(Element::zero(), |acc, nu| {
                    &acc + &(&p.matrix[mu][nu] * &p.matrix[nu][ka]).scale(&p.weights[nu])
                });
                o.require(&sq == entry, format!("p_{n}^2 = p_{n} at ({mu}, {ka})"));
            }
            let k = act(&UqElement::gen(UqGen::K), &p.words[mu], Side::Right);
            o.require(k == p.words[mu].scale(&s(n.abs() - 2 * mu as i64)), format!("word {mu} ◁ K, n = {n}"));
        }
        o.require_report(&podles::sigma_eigen_check(n).unwrap());
        let samples: Vec<Vec<Element>> = (0..3).map(|_| (0..dim).map(|_| sample_s2_element(&mut rng)).collect()).collect();
        o.require_report(&podles::check_kernel_lemma(n, &samples).unwrap());
    }
    for n in [1i64, 2, -1, -2] {
        let dim = n.unsigned_abs() as usize + 1;
        o.require_report(&podles::check_orthogonality(n, &identity_matrix(dim)).unwrap());
        let bundle = podles::bundle_connection_delta(n, Side::Left).unwrap();
        let r = bundle.check_compatibility().unwrap();
        o.require(r.cases == 3 * dim * dim, format!("n = {n}: {} compatibility cases", r.cases));
        o.require_report(&r);
        o.require_report(&bundle.check_christoffel().unwrap());
    }
    o.note("compatibility of p_n∘∇⁰ checked with the left action");
    o
}

fn c10_engine(seed: u64) -> Outcome {
    let mut o = Outcome::default();
    let mut rng = sample::rng(seed);
    let basis = enumerate_basis(3);
    use rand::seq::SliceRandom;
    for _ in 0..1000 {
        let pick = |rng: &mut _| Element::monomial(*basis.choose(rng).unwrap());
        let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        o.require(&(&x * &y) * &z == &x * &(&y * &z), format!("({x})({y})({z})"));
    }
    let els: Vec<Element> = basis.iter().map(|m| Element::monomial(*m)).collect();
    for x in &els {
        for y in &els {
            o.require((x * y).star() == &y.star() * &x.star(), format!("(({x})({y}))*"));
        }
    }
    for n in -20..=20i64 {
        o.require(Scalar::q_integer(n) == qint(n), format!("[{n}] closed form"));
        o.require(qint(n + 1) == &(&(&q(1) + &q(-1)) * &qint(n)) - &qint(n - 1), format!("recurrence at {n}"));
    }
    let m = Monomial::new(0, 1, 1);
    o.require(Element::monomial(m).star() == Element::monomial(m), "(cc*)* = cc*");
    o.note(format!("1000 triples, {} star pairs, 41 q-integers", els.len() * els.len()));
    o
}

fn main() -> ExitCode {
    let seed = 20_240_611;
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 action tables", Duration::from_secs(5), Box::new(c1_action_tables)),
        ("2 pairing table", Duration::from_secs(1), Box::new(c2_pairings)),
        ("3 twisted and star Leibniz", Duration::from_secs(60), Box::new(c3_leibniz)),
        ("4 commutation relations", Duration::from_secs(30), Box::new(c4_commutation)),
        ("5 calculus", Duration::from_secs(30), Box::new(c5_calculus)),
        ("6 metric connections", Duration::from_secs(60), Box::new(move || c6_metric_connections(seed))),
        ("7 Levi-Civita", Duration::from_secs(60), Box::new(move || c7_levi_civita(seed))),
        ("8 Podleś sphere", Duration::from_secs(60), Box::new(c8_podles)),
        ("9 line bundles", Duration::from_secs(120), Box::new(move || c9_bundles(seed))),
        ("10 engine health", Duration::from_secs(30), Box::new(move || c10_engine(seed))),
    ];
    let (mut passed, mut fatal) = (0, false);
    for (name, budget, run) in &criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let ok = o.failures.is_empty() && o.known.is_empty();
        let slow = if elapsed > *budget { " (over time target)" } else { "" };
        println!(
            "{} criterion {name} [{:.1}s / {}s{slow}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        for n in &o.notes {
            println!("     {n}");
        }
        for f in o.failures.iter().take(10) {
            println!("     failure: {f}");
        }
        for k in &o.known {
            println!("     known unattainable: {k}");
        }
        if ok {
            passed += 1;
        }
        if !o.failures.is_empty() || (strict && !o.known.is_empty()) {
            fatal = true;
        }
    }
    println!("{passed}/{} criteria pass", criteria.len());
    if fatal {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
