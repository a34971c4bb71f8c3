//! The Podleś sphere S²_q ⊂ S³_q: the restricted right fields `Y_a`, the
//! dependence relation among them, the `V`-form of the differential, the line
//! bundle projectors `p_n` and projected connections on `M_n`.
//!
//! Projector entries carry radicals `√(β_μ β_ν)`. They are never expanded:
//! the engine works in the normalized frame `f_μ = √w_μ e_μ`, where `w` is the
//! weight vector (`β` for `n ≥ 0`, `α` for `n < 0`). In that frame
//! `p' = diag(w)·M`, with `M_μν = word_μ word_ν∗` radical-free, and the
//! generators `g_μ = √w_μ ê_μ` are the rows of `p'`.

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::Element;
use crate::calculus::{differential, OneForm};
use crate::connections::{
    basis_vector, constant_inverse, hermitian_form, identity_matrix, matrix_to_json, metric_connection_from_params,
    project, project_connection, ConnectionError, HermitianMetric, Matrix, ModuleElement, ProjectedConnection,
    SigmaModule,
};
use crate::derivations::{BasisField, Index, SigmaMap};
use crate::json::{element_to_json, scalar_to_json};
use crate::report::{CheckReport, Failure};
use crate::uq::{act, Side, UqElement};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum PodlesError {
    #[error("{what} is not of U(1) degree 0")]
    NotDegreeZero { what: String },
    #[error("partition of unity fails for n = {n}")]
    Partition { n: i64 },
    #[error("factored idempotence fails for n = {n} at ({mu}, {kappa})")]
    Idempotence { n: i64, mu: usize, kappa: usize },
    #[error("metric entry ({i}, {j}) would carry a radical in the normalized frame; only diagonal constant metrics are supported")]
    Radical { i: usize, j: usize },
    #[error("metric is singular")]
    Singular,
    #[error("metric must have constant entries")]
    NonConstantMetric,
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

fn q(n: i64) -> Scalar {
    Scalar::q_pow(n)
}

fn ratio(num: &Scalar, den: &Scalar) -> Scalar {
    num.checked_div(den).expect("denominators are nonzero polynomials in q")
}

/// `B₀ = cc∗`.
pub fn b0() -> Element {
    &Element::c() * &Element::c_star()
}

/// `B₊ = ca∗`.
pub fn b_plus() -> Element {
    &Element::c() * &Element::a_star()
}

/// `B₋ = ac∗ = B₊∗`.
pub fn b_minus() -> Element {
    &Element::a() * &Element::c_star()
}

/// The basis element `X(m) B₀ⁿ`, `X(m) = B₊^m` for `m ≥ 0`, `B₋^{−m}` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PodlesIndex {
    pub m: i32,
    pub n: u32,
}

impl PodlesIndex {
    pub fn element(self) -> Element {
        let x = if self.m >= 0 { b_plus().pow(self.m as u32) } else { b_minus().pow(self.m.unsigned_abs()) };
        &x * &b0().pow(self.n)
    }

    pub fn label(self) -> String {
        format!("X({})B0^{}", self.m, self.n)
    }
}

/// All indices with `|m| ≤ max_m`, `n ≤ max_n`.
pub fn basis_indices(max_m: u32, max_n: u32) -> Vec<PodlesIndex> {
    let r = max_m as i32;
    (-r..=r).flat_map(|m| (0..=max_n).map(move |n| PodlesIndex { m, n })).collect()
}

fn require_degree_zero(f: &Element, what: &str) -> Result<(), PodlesError> {
    if f.is_degree_zero() {
        Ok(())
    } else {
        Err(PodlesError::NotDegreeZero { what: what.to_string() })
    }
}

fn y_raw(f: &Element, a: Index) -> Element {
    BasisField::plain(a).apply(f, Side::Right)
}

/// `f ◁ Y_a`, the right action of `X_a` restricted to S²_q.
pub fn y_action(f: &Element, a: Index) -> Result<Element, PodlesError> {
    require_degree_zero(f, "input")?;
    let out = y_raw(f, a);
    require_degree_zero(&out, "right action result")?;
    Ok(out)
}

/// The nine tabulated values `B ◁ Y_a` as `(label, B, a, expected)`.
pub fn y_table() -> Vec<(&'static str, Element, Index, Element)> {
    let one = Element::one();
    let opq2 = &q(0) + &q(2);
    vec![
        ("B0", b0(), Index::Plus, b_minus().scale(&q(-1))),
        ("B0", b0(), Index::Minus, b_plus().scale(&-q(-1))),
        ("B0", b0(), Index::Z, Element::zero()),
        ("B+", b_plus(), Index::Plus, &one.scale(&q(1)) - &b0().scale(&(&q(1) * &opq2))),
        ("B+", b_plus(), Index::Minus, Element::zero()),
        ("B+", b_plus(), Index::Z, b_plus().scale(&-(&q(2) * &opq2))),
        ("B-", b_minus(), Index::Plus, Element::zero()),
        ("B-", b_minus(), Index::Minus, &one.scale(&-q(-1)) + &b0().scale(&(&q(-1) * &opq2))),
        ("B-", b_minus(), Index::Z, b_minus().scale(&(&q(0) + &q(-2)))),
    ]
}

pub fn check_y_table() -> CheckReport {
    let mut report = CheckReport::new("restricted right action table");
    for (label, b, a, expected) in y_table() {
        let got = y_action(&b, a);
        let ok = matches!(&got, Ok(v) if *v == expected);
        report.record(ok, || {
            let lhs = got.map(|v| element_to_json(&v)).unwrap_or_else(|e| json!(e.to_string()));
            Failure::new(format!("{label} ◁ Y{}", a.name()), lhs, element_to_json(&expected))
        });
    }
    report
}

/// Both sides of the dependence relation among the `Y_a`, evaluated on `f`:
///
/// `((f◁Y₊)B₊q + (f◁Y₋)B₋q⁻¹)(1+q²) + (f◁Y_z)(1 − 2(1+q²)/(1+q⁴) B₀)`
/// against
/// `(f◁Y_z²) q⁻² ((1−q²)(2q⁴+q²+1)/(1+q⁴) B₀ − (1−q⁶)B₀²)
///  + (f◁K⁴) q⁻²(1+q²)((q⁴−1)B₀ + (1−q⁶)B₀²)`.
pub fn rvf_sides(f: &Element) -> Result<(Element, Element), PodlesError> {
    require_degree_zero(f, "input")?;
    let (bp, bm, b) = (b_plus(), b_minus(), b0());
    let b2 = &b * &b;
    let opq2 = &q(0) + &q(2);
    let opq4 = &q(0) + &q(4);
    let (yp, ym, yz) = (y_raw(f, Index::Plus), y_raw(f, Index::Minus), y_raw(f, Index::Z));
    let yzz = y_raw(&yz, Index::Z);
    let fk4 = act(&UqElement::k_pow(4), f, Side::Right);

    let first = &(&yp * &bp).scale(&q(1)) + &(&ym * &bm).scale(&q(-1));
    let zcoef = &Element::one() - &b.scale(&ratio(&(&Scalar::from_int(2) * &opq2), &opq4));
    let lhs = &first.scale(&opq2) + &(&yz * &zcoef);

    let c_lin = ratio(&(&(&q(0) - &q(2)) * &(&(&Scalar::from_int(2) * &q(4)) + &opq2)), &opq4);
    let zz_coef = &b.scale(&c_lin) - &b2.scale(&(&q(0) - &q(6)));
    let k_coef = &b.scale(&(&q(4) - &q(0))) + &b2.scale(&(&q(0) - &q(6)));
    let rhs = &(&yzz * &zz_coef).scale(&q(-2)) + &(&fk4 * &k_coef).scale(&(&q(-2) * &opq2));
    Ok((lhs, rhs))
}

pub fn check_rvf_relation(idx: PodlesIndex) -> CheckReport {
    let mut report = CheckReport::new(format!("right field relation on {}", idx.label()));
    let (lhs, rhs) = rvf_sides(&idx.element()).expect("basis elements have degree 0");
    report.record(lhs == rhs, || Failure::new(idx.label(), element_to_json(&lhs), element_to_json(&rhs)));
    report
}

/// The coefficients `(f◁V₊, f◁V₋, f◁V₀)` of `dB₊, dB₋, dB₀`, with
///
/// `V₊ = Y₊(1 − q⁻²(1+q²)B₀)q⁻¹ − Y_z B₋ q⁻²(1+q⁶)/(1+q⁴) + Y_z² B₋ (1−q²)/((1+q²)(1+q⁴))`,
/// `V₋ = −Y₋(1 − q²(1+q²)B₀)q + Y_z B₊ q⁻²(1+q⁶)/(1+q⁴) − Y_z² B₊ (1−q²)/((1+q²)(1+q⁴))`,
/// `V₀ = (Y₊B₊q⁻¹ − Y₋B₋q)(1+q²) + Y_z B₀ (1−q⁴)(1+q⁶)/(1+q⁴) − Y_z² B₀ (1−q²)/(1+q⁴)`,
///
/// where an operator word `Y B` acts as `f ↦ (f◁Y)B`.
pub fn v_differential(f: &Element) -> Result<[Element; 3], PodlesError> {
    require_degree_zero(f, "input")?;
    let (bp, bm, b) = (b_plus(), b_minus(), b0());
    let one = Element::one();
    let opq2 = &q(0) + &q(2);
    let opq4 = &q(0) + &q(4);
    let (yp, ym, yz) = (y_raw(f, Index::Plus), y_raw(f, Index::Minus), y_raw(f, Index::Z));
    let yzz = y_raw(&yz, Index::Z);
    let c1 = ratio(&(&q(-2) * &(&q(0) + &q(6))), &opq4);
    let c2 = ratio(&(&q(0) - &q(2)), &(&opq2 * &opq4));
    let c3 = ratio(&(&(&q(0) - &q(4)) * &(&q(0) + &q(6))), &opq4);
    let c4 = ratio(&(&q(0) - &q(2)), &opq4);

    let vp = &(&(&yp * &(&one - &b.scale(&(&q(-2) * &opq2)))).scale(&q(-1)) - &(&yz * &bm).scale(&c1))
        + &(&yzz * &bm).scale(&c2);
    let vm = &(&(&yz * &bp).scale(&c1) - &(&ym * &(&one - &b.scale(&(&q(2) * &opq2)))).scale(&q(1)))
        - &(&yzz * &bp).scale(&c2);
    let v0 = &(&(&(&yp * &bp).scale(&q(-1)) - &(&ym * &bm).scale(&q(1))).scale(&opq2) + &(&yz * &b).scale(&c3))
        - &(&yzz * &b).scale(&c4);
    Ok([vp, vm, v0])
}

fn expand_in_db(coeffs: &[Element; 3]) -> OneForm {
    let [dp, dm, d0] = [differential(&b_plus()), differential(&b_minus()), differential(&b0())];
    &(&dp.left_mul(&coeffs[0]) + &dm.left_mul(&coeffs[1])) + &d0.left_mul(&coeffs[2])
}

/// `(f◁V₊)dB₊ + (f◁V₋)dB₋ + (f◁V₀)dB₀` in ω-coordinates.
pub fn v_expansion(f: &Element) -> Result<OneForm, PodlesError> {
    Ok(expand_in_db(&v_differential(f)?))
}

/// The `dB`-coefficients obtained by substituting the inverted relations
/// `ω₊ = q⁻¹a² dB₊ − q²c² dB₋ + (1+q²)ac dB₀`,
/// `ω₋ = c∗² dB₊ − q a∗² dB₋ − (1+q²)c∗a∗ dB₀`
/// into `df = (X₊▷f)ω₊ + (X₋▷f)ω₋`. The coefficients lie in S³_q, not S²_q.
pub fn left_db_coefficients(f: &Element) -> Result<[Element; 3], PodlesError> {
    require_degree_zero(f, "input")?;
    let (a, ast, c, cst) = (Element::a(), Element::a_star(), Element::c(), Element::c_star());
    let xp = BasisField::plain(Index::Plus).apply(f, Side::Left);
    let xm = BasisField::plain(Index::Minus).apply(f, Side::Left);
    let opq2 = &q(0) + &q(2);
    let cp = &(&xp * &(&a * &a)).scale(&q(-1)) + &(&xm * &(&cst * &cst));
    let cm = -&(&(&xp * &(&c * &c)).scale(&q(2)) + &(&xm * &(&ast * &ast)).scale(&q(1)));
    let c0 = (&(&xp * &(&a * &c)) - &(&xm * &(&cst * &ast))).scale(&opq2);
    Ok([cp, cm, c0])
}

fn form_failure(case: String, lhs: &OneForm, rhs: &OneForm) -> Failure {
    Failure::new(case, lhs.to_json(), rhs.to_json())
}

/// Lemma form of the differential against `df = (X₋▷f)ω₋ + (X₊▷f)ω₊`.
pub fn check_v_differential(idx: PodlesIndex) -> CheckReport {
    let mut report = CheckReport::new(format!("V-form of d on {}", idx.label()));
    let f = idx.element();
    let lhs = v_expansion(&f).expect("basis elements have degree 0");
    let rhs = differential(&f);
    report.record(lhs == rhs, || form_failure(idx.label(), &lhs, &rhs));
    report
}

/// The left-action `dB` expansion against `differential(f)`.
pub fn check_left_db_expansion(idx: PodlesIndex) -> CheckReport {
    let mut report = CheckReport::new(format!("left dB expansion on {}", idx.label()));
    let f = idx.element();
    let lhs = expand_in_db(&left_db_coefficients(&f).expect("basis elements have degree 0"));
    let rhs = differential(&f);
    report.record(lhs == rhs, || form_failure(idx.label(), &lhs, &rhs));
    report
}

/// The tabulated `dB` values and the ω-inversion formulas.
pub fn check_db_forms() -> CheckReport {
    let (a, ast, c, cst) = (Element::a(), Element::a_star(), Element::c(), Element::c_star());
    let z = Element::zero();
    let mut report = CheckReport::new("differentials of S²_q generators");
    let cases = [
        ("dB+", differential(&b_plus()), OneForm::new((&ast * &ast).scale(&q(1)), &c * &c, z.clone())),
        ("dB-", differential(&b_minus()), OneForm::new((&cst * &cst).scale(&-q(2)), (&a * &a).scale(&-q(-1)), z.clone())),
        ("dB0", differential(&b0()), OneForm::new(&cst * &ast, (&c * &a).scale(&-q(-1)), z.clone())),
    ];
    for (label, got, want) in cases {
        report.record(got == want, || form_failure(label.to_string(), &got, &want));
    }
    let opq2 = &q(0) + &q(2);
    let wp = expand_in_db(&[(&a * &a).scale(&q(-1)), (&c * &c).scale(&-q(2)), (&a * &c).scale(&opq2)]);
    let wm = expand_in_db(&[&cst * &cst, (&ast * &ast).scale(&-q(1)), (&cst * &ast).scale(&-opq2)]);
    for (label, got, want) in [("w+", wp, OneForm::basis(Index::Plus)), ("w-", wm, OneForm::basis(Index::Minus))] {
        report.record(got == want, || form_failure(format!("inversion {label}"), &got, &want));
    }
    report
}

/// Negative control: the left action leaves S²_q (`X₊▷B₀ = q a∗c∗`).
pub fn check_left_action_leaves_s2() -> CheckReport {
    let mut report = CheckReport::new("left action does not preserve S²_q");
    let got = BasisField::plain(Index::Plus).apply(&b0(), Side::Left);
    let want = (&Element::a_star() * &Element::c_star()).scale(&q(1));
    report.record(got == want && !got.is_degree_zero(), || {
        Failure::new("X+ ▷ B0", element_to_json(&got), element_to_json(&want))
    });
    report
}

/// `α_{nμ} = ∏_{k=0}^{n−μ−1} (1−q^{2(n−k)})/(1−q^{2(k+1)})`.
pub fn alpha_coefficient(n: u32, mu: u32) -> Scalar {
    let (n, mu) = (n as i64, mu as i64);
    (0..n - mu).fold(Scalar::one(), |acc, k| {
        &acc * &ratio(&(&q(0) - &q(2 * (n - k))), &(&q(0) - &q(2 * (k + 1))))
    })
}

/// `β_{nμ} = q^{2μ} ∏_{k=0}^{μ−1} (1−q^{−2(n−k)})/(1−q^{−2(k+1)})`.
pub fn beta_coefficient(n: u32, mu: u32) -> Scalar {
    let (n, mu) = (n as i64, mu as i64);
    (0..mu).fold(q(2 * mu), |acc, k| &acc * &ratio(&(&q(0) - &q(-2 * (n - k))), &(&q(0) - &q(-2 * (k + 1)))))
}

/// `p_n` in radical-factored form: `(p_n)_μ^ν = √(w_μ w_ν) M_μν`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleProjector {
    pub n: i64,
    /// `β_{nμ}` for `n ≥ 0`, `α_{|n|μ}` for `n < 0`.
    pub weights: Vec<Scalar>,
    /// Unnormalized `Ψ_μ = c∗^μ a∗^{n−μ}` or `Φ_μ = c^{|n|−μ} a^μ`.
    pub words: Vec<Element>,
    /// `M_μν = word_μ word_ν∗`.
    pub matrix: Matrix,
}

/// Builds `p_n` and verifies partition of unity, factored idempotence and degree 0.
pub fn build_projectors(n: i64) -> Result<BundleProjector, PodlesError> {
    let k = n.unsigned_abs() as u32;
    let (a, ast, c, cst) = (Element::a(), Element::a_star(), Element::c(), Element::c_star());
    let (weights, words): (Vec<Scalar>, Vec<Element>) = (0..=k)
        .map(|mu| {
            if n >= 0 {
                (beta_coefficient(k, mu), &cst.pow(mu) * &ast.pow(k - mu))
            } else {
                (alpha_coefficient(k, mu), &c.pow(k - mu) * &a.pow(mu))
            }
        })
        .unzip();
    let stars: Vec<Element> = words.iter().map(Element::star).collect();
    let matrix: Matrix = words.iter().map(|w| stars.iter().map(|s| w * s).collect()).collect();

    let partition = weights
        .iter()
        .zip(words.iter().zip(&stars))
        .fold(Element::zero(), |acc, (wt, (w, s))| &acc + &(s * w).scale(wt));
    if partition != Element::one() {
        return Err(PodlesError::Partition { n });
    }
    for (i, row) in matrix.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if !entry.is_degree_zero() {
                return Err(PodlesError::NotDegreeZero { what: format!("projector entry ({i}, {j})") });
            }
        }
    }
    let dim = matrix.len();
    for mu in 0..dim {
        for kappa in 0..dim {
            let sum = (0..dim).fold(Element::zero(), |acc, nu| {
                &acc + &(&matrix[mu][nu] * &matrix[nu][kappa]).scale(&weights[nu])
            });
            if sum != matrix[mu][kappa] {
                return Err(PodlesError::Idempotence { n, mu, kappa });
            }
        }
    }
    Ok(BundleProjector { n, weights, words, matrix })
}

impl BundleProjector {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    /// `p' = diag(w)·M`, the matrix of `p_n` in the normalized frame.
    pub fn normalized(&self) -> Matrix {
        self.matrix.iter().zip(&self.weights).map(|(row, w)| row.iter().map(|x| x.scale(w)).collect()).collect()
    }

    /// Element JSON for `M` plus a separate table of radicands: entry `(μ,ν)`
    /// of `p_n` is `radicand^{exponent} · M_μν`.
    pub fn to_json(&self) -> Value {
        let dim = self.dim();
        let radicals: Vec<Vec<Value>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| json!({"exponent": "1/2", "radicand": scalar_to_json(&(&self.weights[i] * &self.weights[j]))}))
                    .collect()
            })
            .collect();
        json!({
            "n": self.n,
            "matrix": matrix_to_json(&self.matrix),
            "radical_exponents": radicals,
        })
    }

    /// The right K-weight `s^{|n|−2μ}` of `word_μ`.
    pub fn word_eigenvalue(&self, mu: usize) -> Scalar {
        Scalar::s_pow(self.n.abs() - 2 * mu as i64)
    }

    /// The σ-module `(S²_q)^{|n|+1}` with `σ̂⁰_±(e_μ) = q^{|n|−2μ}e_μ`.
    pub fn module(&self, side: Side) -> SigmaModule {
        SigmaModule {
            labels: (0..self.dim()).map(|mu| format!("e{mu}")).collect(),
            k_eigen: (0..self.dim()).map(|mu| self.word_eigenvalue(mu)).collect(),
            side,
        }
    }

    /// `φ⁰(m) = Σ m'^μ w_μ word_μ` for `m` in normalized coordinates.
    pub fn phi0(&self, m: &ModuleElement) -> Element {
        m.iter()
            .zip(self.weights.iter().zip(&self.words))
            .fold(Element::zero(), |acc, (x, (w, word))| &acc + &(x * word).scale(w))
    }
}

/// K-eigenvalues of the words, of the projector entries, and the induced
/// `σ̂` eigenvalues on the generators.
pub fn sigma_eigen_check(n: i64) -> Result<CheckReport, PodlesError> {
    let p = build_projectors(n)?;
    let mut report = CheckReport::new(format!("sigma eigenvalues on M_{n}"));
    let k1 = UqElement::k_pow(1);
    for mu in 0..p.dim() {
        let got = act(&k1, &p.words[mu], Side::Right);
        let want = p.words[mu].scale(&p.word_eigenvalue(mu));
        report.record(got == want, || {
            Failure::new(format!("word {mu} ◁ K"), element_to_json(&got), element_to_json(&want))
        });
        for nu in 0..p.dim() {
            let got = act(&k1, &p.matrix[mu][nu], Side::Right);
            let want = p.matrix[mu][nu].scale(&q(nu as i64 - mu as i64));
            report.record(got == want, || {
                Failure::new(format!("p[{mu}][{nu}] ◁ K"), element_to_json(&got), element_to_json(&want))
            });
        }
    }
    let pn = p.normalized();
    let module = p.module(Side::Right);
    for b in BasisField::ALL {
        let sigma = b.sigma();
        for mu in 0..p.dim() {
            let g = pn[mu].clone();
            let got = project(&pn, &module.sigma_hat(sigma, &g));
            let want: ModuleElement = g.iter().map(|x| x.scale(&module.eigenvalue(sigma, mu))).collect();
            report.record(got == want, || {
                Failure::new(format!("{sigma} on generator {mu}"), module_json(&got), module_json(&want))
            });
        }
    }
    Ok(report)
}

fn module_json(m: &ModuleElement) -> Value {
    Value::Array(m.iter().map(element_to_json).collect())
}

/// `h̃_{±μν} = q^{2μ−n}h_μν` and `h̃_{zμν} = q^{2(2μ−n)}h_μν` for a metric on the bundle module.
pub fn check_h_tilde(n: i64, h: &HermitianMetric) -> Result<CheckReport, PodlesError> {
    let p = build_projectors(n)?;
    let module = p.module(Side::Right);
    let k = n.abs();
    let mut report = CheckReport::new(format!("lowered metric on M_{n}"));
    for a in Index::ALL {
        let ht = h.h_tilde(&module, a);
        let scale = if a == Index::Z { 2 } else { 1 };
        for mu in 0..p.dim() {
            for nu in 0..p.dim() {
                let want = h.h[mu][nu].scale(&q(scale * (2 * mu as i64 - k)));
                report.record(ht[mu][nu] == want, || {
                    Failure::new(format!("a={} ({mu},{nu})", a.name()), element_to_json(&ht[mu][nu]), element_to_json(&want))
                });
            }
        }
    }
    Ok(report)
}

/// `p_n∘∇⁰` on `M_n` in the normalized frame.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleConnection {
    pub projector: BundleProjector,
    pub connection: ProjectedConnection,
}

/// Transfers a constant metric on `(S²_q)^{|n|+1}` to the normalized frame,
/// `h'_μν = √(w_μ w_ν) h_μν`; only diagonal metrics stay radical-free.
pub fn normalized_metric(p: &BundleProjector, h: &Matrix) -> Result<HermitianMetric, PodlesError> {
    let dim = p.dim();
    let mut out = vec![vec![Element::zero(); dim]; dim];
    for (i, row) in h.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            if i != j {
                return Err(PodlesError::Radical { i, j });
            }
            let c = x.as_scalar().ok_or(PodlesError::NonConstantMetric)?;
            out[i][i] = Element::from_scalar(&c * &p.weights[i]);
        }
    }
    let inv = constant_inverse(&out).ok_or(PodlesError::Singular)?;
    Ok(HermitianMetric::new(out)?.with_inverse(inv)?)
}

/// `∇ = p_n∘∇⁰` with `Γ̃` built from `(α, β, ρ)` given in the normalized frame.
///
/// Fails when `h` is not orthogonal for `p_n`.
pub fn bundle_connection(
    n: i64,
    h: &Matrix,
    alpha: &Matrix,
    beta: &Matrix,
    rho: &Matrix,
    side: Side,
) -> Result<BundleConnection, PodlesError> {
    let p = build_projectors(n)?;
    let metric = normalized_metric(&p, h)?;
    let base = metric_connection_from_params(&p.module(side), &metric, alpha, beta, rho)?;
    let connection = project_connection(&p.normalized(), &base, true)?;
    Ok(BundleConnection { projector: p, connection })
}

/// The `δ` metric with `α = β = ρ = 0`.
pub fn bundle_connection_delta(n: i64, side: Side) -> Result<BundleConnection, PodlesError> {
    let dim = n.unsigned_abs() as usize + 1;
    let zero = vec![vec![Element::zero(); dim]; dim];
    bundle_connection(n, &identity_matrix(dim), &zero, &zero, &zero, side)
}

impl BundleConnection {
    /// `C_{aμ}^κ = (p'Γ_a)_μκ + λ_{a,κ} X_a(p'_μκ)`, so that `∇_{X_a} g_μ = C_{aμ}^κ g_κ`.
    pub fn christoffel(&self, a: Index) -> Matrix {
        let pn = &self.connection.p;
        let base = &self.connection.base;
        let side = base.side();
        let dim = pn.len();
        let gamma = base.gamma.as_ref().expect("normalized metrics carry an inverse");
        let sigma = SigmaMap::plain(a);
        (0..dim)
            .map(|mu| {
                (0..dim)
                    .map(|kappa| {
                        let pg = (0..dim).fold(Element::zero(), |acc, nu| &acc + &(&pn[mu][nu] * &gamma[a.pos()][nu][kappa]));
                        let lam = base.module.eigenvalue(sigma, kappa);
                        &pg + &BasisField::plain(a).apply(&pn[mu][kappa], side).scale(&lam)
                    })
                    .collect()
            })
            .collect()
    }

    /// Checks `∇_{X_a} g_μ = C_{aμ}^κ g_κ` against `p∘∇⁰`.
    pub fn check_christoffel(&self) -> Result<CheckReport, PodlesError> {
        let dim = self.projector.dim();
        let pn = &self.connection.p;
        let mut report = CheckReport::new("bundle Christoffel table");
        for a in Index::ALL {
            let table = self.christoffel(a);
            for mu in 0..dim {
                let got = self.connection.nabla_field(BasisField::plain(a), &pn[mu])?;
                let want = (0..dim).fold(vec![Element::zero(); dim], |acc, kappa| {
                    acc.iter().zip(&pn[kappa]).map(|(x, g)| x + &(&table[mu][kappa] * g)).collect()
                });
                report.record(got == want, || {
                    Failure::new(format!("a={} generator {mu}", a.name()), module_json(&got), module_json(&want))
                });
            }
        }
        Ok(report)
    }

    pub fn christoffel_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for a in Index::ALL {
            map.insert(a.name().to_string(), matrix_to_json(&self.christoffel(a)));
        }
        Value::Object(map)
    }

    /// Metric compatibility on all generator pairs.
    pub fn check_compatibility(&self) -> Result<CheckReport, PodlesError> {
        Ok(self.connection.check_compatibility()?)
    }
}

/// Spot-check of `p_n(m) = 0 ⟹ φ⁰(m) = 0` on `m = v − p_n(v)`.
pub fn check_kernel_lemma(n: i64, samples: &[ModuleElement]) -> Result<CheckReport, PodlesError> {
    let p = build_projectors(n)?;
    let pn = p.normalized();
    let mut report = CheckReport::new(format!("kernel of p_{n} maps to zero"));
    for (i, v) in samples.iter().enumerate() {
        let pv = project(&pn, v);
        let m: ModuleElement = v.iter().zip(&pv).map(|(x, y)| x - y).collect();
        let in_kernel = project(&pn, &m).iter().all(Element::is_zero);
        let image = p.phi0(&m);
        report.record(in_kernel && image.is_zero(), || {
            Failure::new(format!("sample {i}"), element_to_json(&image), json!(0))
        });
    }
    Ok(report)
}

/// Orthogonality of `p_n` for `h` on basis pairs, without building a connection.
pub fn check_orthogonality(n: i64, h: &Matrix) -> Result<CheckReport, PodlesError> {
    let p = build_projectors(n)?;
    let metric = normalized_metric(&p, h)?;
    let pn = p.normalized();
    let dim = p.dim();
    let mut report = CheckReport::new(format!("orthogonality of p_{n}"));
    for i in 0..dim {
        for j in 0..dim {
            let (ei, ej) = (basis_vector(dim, i), basis_vector(dim, j));
            let lhs = hermitian_form(&metric, &project(&pn, &ei), &ej)?;
            let rhs = hermitian_form(&metric, &ei, &project(&pn, &ej))?;
            report.record(lhs == rhs, || Failure::new(format!("({i},{j})"), element_to_json(&lhs), element_to_json(&rhs)));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_and_relations() {
        let (bp, bm, b) = (b_plus(), b_minus(), b0());
        assert_eq!(bm, bp.star());
        assert_eq!(&bm * &b, (&b * &bm).scale(&q(2)));
        assert_eq!(&bp * &b, (&b * &bp).scale(&q(-2)));
        let one = Element::one();
        assert_eq!(&bm * &bp, (&b * &(&one - &b.scale(&q(2)))).scale(&q(2)));
        assert_eq!(&bp * &bm, &b * &(&one - &b));
    }

    #[test]
    fn y_action_examples() {
        assert_eq!(y_action(&b0(), Index::Plus).unwrap(), b_minus().scale(&q(-1)));
        assert!(y_action(&b_plus(), Index::Minus).unwrap().is_zero());
        assert_eq!(y_action(&b_minus(), Index::Z).unwrap(), b_minus().scale(&(&q(0) + &q(-2))));
        assert!(matches!(y_action(&Element::a(), Index::Plus), Err(PodlesError::NotDegreeZero { .. })));
        assert!(check_y_table().passed());
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(beta_coefficient(1, 0), Scalar::one());
        assert_eq!(beta_coefficient(1, 1), q(2));
        assert_eq!(alpha_coefficient(0, 0), Scalar::one());
        assert_eq!(alpha_coefficient(1, 0), Scalar::one());
        assert_eq!(alpha_coefficient(1, 1), Scalar::one());
        // α₂₀ = (1−q⁴)(1−q²)/((1−q²)(1−q⁴)) = 1, α₂₁ = (1−q⁴)/(1−q²) = 1+q².
        assert_eq!(alpha_coefficient(2, 1), &q(0) + &q(2));
    }

    #[test]
    fn small_projectors() {
        let p0 = build_projectors(0).unwrap();
        assert_eq!(p0.matrix, vec![vec![Element::one()]]);
        let p1 = build_projectors(1).unwrap();
        assert_eq!(p1.words, vec![Element::a_star(), Element::c_star()]);
        assert_eq!(p1.weights, vec![Scalar::one(), q(2)]);
        let pm1 = build_projectors(-1).unwrap();
        assert_eq!(pm1.words, vec![Element::c(), Element::a()]);
    }

    #[test]
    fn degree_zero_is_required() {
        assert!(v_differential(&Element::c()).is_err());
        assert!(rvf_sides(&Element::a_star()).is_err());
        let [a, b, c] = v_differential(&Element::one()).unwrap();
        assert!(a.is_zero() && b.is_zero() && c.is_zero());
    }
}
