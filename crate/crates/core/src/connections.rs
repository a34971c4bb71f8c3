//! σ-modules, hermitian forms and q-affine connections on free modules.
//!
//! A connection on a free module with basis `e_i` is stored through the
//! metric-lowered symbols `Γ̃_{ai,j}`; when an inverse metric is supplied the
//! Christoffel symbols `Γ_{ai}^j` (with `∇_{X_a} e_i = Γ_{ai}^j e_j`) are derived
//! from them by
//!
//! ```text
//! Γ_{ai}^k = Γ̃_{ai,j} σ_a(h̃_a^{jk}),   h̃_{aij} = h(σ̂_a∗ e_i, e_j)
//! ```
//!
//! The basis is a K-eigenbasis: `σ̂_a(e_i) = λ_{a,i} e_i` with `λ_{a,i}` a power
//! of the K-eigenvalue of `e_i`. Starred derivatives on the basis are fixed by
//! `∇_{X_a∗} e_i = −σ̂_ā∗(∇_{X_ā} e_i)` where `ā` swaps `±` and fixes `z`.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::{Element, Monomial};
use crate::derivations::{sigma_apply, BasisField, Index, SigmaMap, VectorField};
use crate::json::{element_from_json, element_to_json, JsonError};
use crate::report::{CheckReport, Failure};
use crate::uq::{act, Side, UqElement};
use crate::Scalar;

/// Square matrix of algebra elements, row-major.
pub type Matrix = Vec<Vec<Element>>;

/// Module element in basis coordinates `m = m^i e_i`.
pub type ModuleElement = Vec<Element>;

#[derive(Debug, Error)]
pub enum ConnectionError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("{what} is not hermitian at entry ({i}, {j})")]
    NotHermitian { what: String, i: usize, j: usize },
    #[error("supplied inverse metric fails at entry ({i}, {j})")]
    BadInverse { i: usize, j: usize },
    #[error("metric entry ({i}, {j}) is not K-invariant")]
    NotKInvariant { i: usize, j: usize },
    #[error("metric is not flagged K-invariant")]
    KInvarianceRequired,
    #[error("reality condition fails: H = {residual} is not hermitian")]
    Reality { residual: Element },
    #[error("connection has no Christoffel table (metric inverse missing)")]
    MissingGamma,
    #[error("vector field acts on the {found:?} side, connection on the {expected:?} side")]
    SideMismatch { expected: Side, found: Side },
    #[error("projection is not idempotent at entry ({i}, {j})")]
    NotIdempotent { i: usize, j: usize },
    #[error("projection is not orthogonal for basis pair ({i}, {j})")]
    NotOrthogonal { i: usize, j: usize },
    #[error(transparent)]
    Json(#[from] JsonError),
}

fn check_square(m: &Matrix, n: usize) -> Result<(), ConnectionError> {
    if m.len() != n {
        return Err(ConnectionError::Dimension { expected: n, found: m.len() });
    }
    for row in m {
        if row.len() != n {
            return Err(ConnectionError::Dimension { expected: n, found: row.len() });
        }
    }
    Ok(())
}

/// Checks `M_ji = M_ij∗` for all entries.
pub fn check_hermitian_matrix(m: &Matrix, what: &str) -> Result<(), ConnectionError> {
    check_square(m, m.len())?;
    for i in 0..m.len() {
        for j in i..m.len() {
            if m[i][j].star() != m[j][i] {
                return Err(ConnectionError::NotHermitian { what: what.to_string(), i, j });
            }
        }
    }
    Ok(())
}

pub fn identity_matrix(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Element::one() } else { Element::zero() }).collect()).collect()
}

pub fn matrix_mul(x: &Matrix, y: &Matrix) -> Matrix {
    let n = x.len();
    let inner = y.len();
    let cols = y.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..cols)
                .map(|j| (0..inner).fold(Element::zero(), |acc, k| &acc + &(&x[i][k] * &y[k][j])))
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse of a matrix with scalar entries; `None` if some entry
/// is not a scalar or the matrix is singular.
pub fn constant_inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m
        .iter()
        .map(|row| row.iter().map(Element::as_scalar).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()?;
    let mut inv: Vec<Vec<Scalar>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].inv().ok()?;
        for x in a[col].iter_mut().chain(inv[col].iter_mut()) {
            *x = &*x * &p;
        }
        for r in (0..n).filter(|&r| r != col) {
            let f = a[r][col].clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..n {
                let da = &f * &a[col][c];
                a[r][c] = &a[r][c] - &da;
                let di = &f * &inv[col][c];
                inv[r][c] = &inv[r][c] - &di;
            }
        }
    }
    Some(inv.into_iter().map(|row| row.into_iter().map(Element::from_scalar).collect()).collect())
}

fn k_act(power: i64, f: &Element, side: Side) -> Element {
    if power == 0 {
        return f.clone();
    }
    act(&UqElement::k_pow(power), f, side)
}

/// Free module with a K-eigenbasis and the σ-structure it induces.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaModule {
    pub labels: Vec<String>,
    /// `K(e_i) = κ_i e_i`.
    pub k_eigen: Vec<Scalar>,
    pub side: Side,
}

impl SigmaModule {
    /// Free module of the given rank with `K(e_i) = e_i`.
    pub fn free(rank: usize, side: Side) -> Self {
        SigmaModule {
            labels: (0..rank).map(|i| format!("e{i}")).collect(),
            k_eigen: vec![Scalar::one(); rank],
            side,
        }
    }

    /// `Ω¹(S³_q)` with basis `ω₊, ω₋, ω_z`, all fixed by `K`.
    pub fn one_forms(side: Side) -> Self {
        SigmaModule {
            labels: Index::ALL.iter().map(|a| format!("w{}", a.name())).collect(),
            k_eigen: vec![Scalar::one(); 3],
            side,
        }
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    /// `σ̂(e_i) = λ e_i`.
    pub fn eigenvalue(&self, sigma: SigmaMap, i: usize) -> Scalar {
        self.k_eigen[i].pow(sigma.k_power()).expect("K-eigenvalues are nonzero")
    }

    /// `σ̂(m^i e_i) = σ(m^i) λ_i e_i`.
    pub fn sigma_hat(&self, sigma: SigmaMap, m: &ModuleElement) -> ModuleElement {
        m.iter().enumerate().map(|(i, x)| sigma_apply(sigma, x, self.side).scale(&self.eigenvalue(sigma, i))).collect()
    }
}

/// Hermitian metric `h_ij = h(e_i, e_j)` with an optional inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMetric {
    pub h: Matrix,
    pub h_inv: Option<Matrix>,
    pub k_invariant: bool,
}

impl HermitianMetric {
    /// Validates hermiticity.
    pub fn new(h: Matrix) -> Result<Self, ConnectionError> {
        check_hermitian_matrix(&h, "metric")?;
        Ok(HermitianMetric { h, h_inv: None, k_invariant: false })
    }

    /// The identity metric, with itself as inverse.
    pub fn delta(n: usize) -> Self {
        HermitianMetric { h: identity_matrix(n), h_inv: Some(identity_matrix(n)), k_invariant: true }
    }

    /// Constant hermitian metric with its computed inverse.
    pub fn constant(h: Matrix) -> Result<Self, ConnectionError> {
        let inv = constant_inverse(&h);
        let mut m = HermitianMetric::new(h)?;
        m.h_inv = inv;
        // scalars are fixed by K on either side
        m.k_invariant = m.h.iter().flatten().all(|x| x.as_scalar().is_some());
        Ok(m)
    }

    pub fn rank(&self) -> usize {
        self.h.len()
    }

    /// Attaches an inverse after checking `h·h⁻¹ = h⁻¹·h = 1`.
    pub fn with_inverse(mut self, inv: Matrix) -> Result<Self, ConnectionError> {
        let n = self.rank();
        check_square(&inv, n)?;
        let id = identity_matrix(n);
        for prod in [matrix_mul(&self.h, &inv), matrix_mul(&inv, &self.h)] {
            for i in 0..n {
                for j in 0..n {
                    if prod[i][j] != id[i][j] {
                        return Err(ConnectionError::BadInverse { i, j });
                    }
                }
            }
        }
        self.h_inv = Some(inv);
        Ok(self)
    }

    /// Sets the K-invariance flag after checking `K(h_ij) = h_ij` on `side`.
    pub fn with_k_invariance(mut self, side: Side) -> Result<Self, ConnectionError> {
        for (i, row) in self.h.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if k_act(1, x, side) != *x {
                    return Err(ConnectionError::NotKInvariant { i, j });
                }
            }
        }
        self.k_invariant = true;
        Ok(self)
    }

    /// `h̃_{σ,ij} = h(σ̂∗ e_i, e_j) = λ∗_i h_ij`, for `σ = σ_a`.
    pub fn h_tilde(&self, module: &SigmaModule, a: Index) -> Matrix {
        let lam = |i| module.eigenvalue(SigmaMap::star_of(a), i);
        self.h.iter().enumerate().map(|(i, row)| row.iter().map(|x| x.scale(&lam(i))).collect()).collect()
    }

    /// `h̃_a^{ij} = h^{ij} / λ∗_j`.
    pub fn h_tilde_inv(&self, module: &SigmaModule, a: Index) -> Option<Matrix> {
        let inv = self.h_inv.as_ref()?;
        let lam = |j| module.eigenvalue(SigmaMap::plain(a), j);
        Some(inv.iter().map(|row| row.iter().enumerate().map(|(j, x)| x.scale(&lam(j))).collect()).collect())
    }

    /// Reads `{"h": [[…]], "h_inv": optional, "k_invariant": bool}`; the
    /// K-invariance flag is verified on `side` when set.
    pub fn from_json(v: &Value, side: Side) -> Result<Self, ConnectionError> {
        let h = matrix_from_json(v.get("h").unwrap_or(&Value::Null), "$.h")?;
        let mut m = HermitianMetric::new(h)?;
        if let Some(inv) = v.get("h_inv").filter(|x| !x.is_null()) {
            m = m.with_inverse(matrix_from_json(inv, "$.h_inv")?)?;
        } else if let Some(inv) = constant_inverse(&m.h) {
            m.h_inv = Some(inv);
        }
        if v.get("k_invariant").and_then(Value::as_bool).unwrap_or(false) {
            m = m.with_k_invariance(side)?;
        }
        Ok(m)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "h": matrix_to_json(&self.h),
            "h_inv": self.h_inv.as_ref().map(|m| matrix_to_json(m)),
            "k_invariant": self.k_invariant,
        })
    }
}

pub fn matrix_from_json(v: &Value, path: &str) -> Result<Matrix, ConnectionError> {
    let rows = v.as_array().ok_or(JsonError::Shape { path: path.to_string(), expected: "matrix" })?;
    let m = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let row = row.as_array().ok_or(JsonError::Shape { path: format!("{path}[{i}]"), expected: "row" })?;
            row.iter().enumerate().map(|(j, x)| element_from_json(x, &format!("{path}[{i}][{j}]"))).collect()
        })
        .collect::<Result<Matrix, JsonError>>()?;
    check_square(&m, m.len())?;
    Ok(m)
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(element_to_json).collect())).collect())
}

/// `h(m₁, m₂) = m₁^i h_ij (m₂^j)∗`.
pub fn hermitian_form(h: &HermitianMetric, m1: &ModuleElement, m2: &ModuleElement) -> Result<Element, ConnectionError> {
    let n = h.rank();
    for m in [m1, m2] {
        if m.len() != n {
            return Err(ConnectionError::Dimension { expected: n, found: m.len() });
        }
    }
    let mut out = Element::zero();
    for i in 0..n {
        if m1[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if !m2[j].is_zero() && !h.h[i][j].is_zero() {
                out = &out + &(&(&m1[i] * &h.h[i][j]) * &m2[j].star());
            }
        }
    }
    Ok(out)
}

pub fn basis_vector(n: usize, i: usize) -> ModuleElement {
    (0..n).map(|j| if i == j { Element::one() } else { Element::zero() }).collect()
}

/// A q-affine connection on a free σ-module.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    pub module: SigmaModule,
    pub metric: HermitianMetric,
    /// `gamma_tilde[a][i][j] = Γ̃_{ai,j}`, `a` in the order `+, −, z`.
    pub gamma_tilde: [Matrix; 3],
    /// `gamma[a][i][k] = Γ_{ai}^k`; present when the metric has an inverse.
    pub gamma: Option<[Matrix; 3]>,
}

impl Connection {
    /// Builds the connection and, if `h⁻¹` is known, its Christoffel symbols.
    pub fn new(module: SigmaModule, metric: HermitianMetric, gamma_tilde: [Matrix; 3]) -> Result<Self, ConnectionError> {
        let n = module.rank();
        if metric.rank() != n {
            return Err(ConnectionError::Dimension { expected: n, found: metric.rank() });
        }
        for t in &gamma_tilde {
            check_square(t, n)?;
        }
        let gamma = christoffel_from_lowered(&module, &metric, &gamma_tilde);
        Ok(Connection { module, metric, gamma_tilde, gamma })
    }

    /// Builds a connection from Christoffel symbols; needs no metric inverse.
    pub fn from_christoffel(module: SigmaModule, metric: HermitianMetric, gamma: [Matrix; 3]) -> Result<Self, ConnectionError> {
        let n = module.rank();
        for t in &gamma {
            check_square(t, n)?;
        }
        let side = module.side;
        let gamma_tilde = Index::ALL.map(|a| {
            let ht = metric.h_tilde(&module, a);
            let sig = SigmaMap::plain(a);
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            (0..n).fold(Element::zero(), |acc, k| {
                                &acc + &(&gamma[a.pos()][i][k] * &sigma_apply(sig, &ht[k][j], side))
                            })
                        })
                        .collect()
                })
                .collect()
        });
        Ok(Connection { module, metric, gamma_tilde, gamma: Some(gamma) })
    }

    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    pub fn side(&self) -> Side {
        self.module.side
    }

    pub fn gamma_tilde_entry(&self, a: Index, i: usize, j: usize) -> &Element {
        &self.gamma_tilde[a.pos()][i][j]
    }

    fn gamma_table(&self) -> Result<&[Matrix; 3], ConnectionError> {
        self.gamma.as_ref().ok_or(ConnectionError::MissingGamma)
    }

    /// `∇_b e_i` for a basis field `b`.
    pub fn nabla_basis(&self, b: BasisField, i: usize) -> Result<ModuleElement, ConnectionError> {
        let gamma = self.gamma_table()?;
        if !b.starred {
            return Ok(gamma[b.index.pos()][i].clone());
        }
        let partner = b.index.opposite();
        let row = gamma[partner.pos()][i].clone();
        Ok(self.module.sigma_hat(SigmaMap::star_of(partner), &row).into_iter().map(|x| -x).collect())
    }

    /// `∇_b m` through the twisted Leibniz rules
    /// `∇_{X_a}(f e_i) = f ∇_{X_a} e_i + X_a(f) σ̂_a(e_i)` and
    /// `∇_{X_a∗}(f e_i) = σ_a∗(f) ∇_{X_a∗} e_i + X_a∗(f) e_i`.
    pub fn nabla_field(&self, b: BasisField, m: &ModuleElement) -> Result<ModuleElement, ConnectionError> {
        let n = self.rank();
        if m.len() != n {
            return Err(ConnectionError::Dimension { expected: n, found: m.len() });
        }
        let side = self.side();
        let mut out = vec![Element::zero(); n];
        for (i, f) in m.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let coeff = if b.starred { sigma_apply(b.sigma(), f, side) } else { f.clone() };
            for (k, g) in self.nabla_basis(b, i)?.iter().enumerate() {
                if !g.is_zero() {
                    out[k] = &out[k] + &(&coeff * g);
                }
            }
            let xf = b.apply(f, side);
            let xf = if b.starred { xf } else { xf.scale(&self.module.eigenvalue(b.sigma(), i)) };
            out[i] = &out[i] + &xf;
        }
        Ok(out)
    }
}

fn christoffel_from_lowered(module: &SigmaModule, metric: &HermitianMetric, gt: &[Matrix; 3]) -> Option<[Matrix; 3]> {
    let side = module.side;
    let inv: Vec<Matrix> = Index::ALL.iter().map(|&a| metric.h_tilde_inv(module, a)).collect::<Option<_>>()?;
    Some(Index::ALL.map(|a| {
        let sig = SigmaMap::plain(a);
        let hinv: Matrix =
            inv[a.pos()].iter().map(|row| row.iter().map(|x| sigma_apply(sig, x, side)).collect()).collect();
        matrix_mul(&gt[a.pos()], &hinv)
    }))
}

/// `∇_X m` for a constant combination of the six basis fields.
pub fn apply_connection(conn: &Connection, x: &VectorField, m: &ModuleElement) -> Result<ModuleElement, ConnectionError> {
    if x.side != conn.side() {
        return Err(ConnectionError::SideMismatch { expected: conn.side(), found: x.side });
    }
    let mut out = vec![Element::zero(); conn.rank()];
    for (b, c) in BasisField::ALL.iter().zip(&x.coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(conn.nabla_field(*b, m)?) {
            o.add_scaled(&v, c);
        }
    }
    Ok(out)
}

fn entrywise(m: &Matrix, f: impl Fn(&Element) -> Element) -> Matrix {
    m.iter().map(|row| row.iter().map(&f).collect()).collect()
}

/// The general metric connection
/// `Γ̃₊ = ½X₊(h) + K(α) + iK(β)`, `Γ̃₋ = ½X₋(h) + K(α) − iK(β)`, `Γ̃_z = ½X_z(h) + K²(ρ)`,
/// with `K` applied entrywise.
pub fn metric_connection_from_params(
    module: &SigmaModule,
    metric: &HermitianMetric,
    alpha: &Matrix,
    beta: &Matrix,
    rho: &Matrix,
) -> Result<Connection, ConnectionError> {
    let n = metric.rank();
    for (m, what) in [(alpha, "alpha"), (beta, "beta"), (rho, "rho")] {
        check_square(m, n)?;
        check_hermitian_matrix(m, what)?;
    }
    let side = module.side;
    let half = Scalar::from_ratio(1, 2);
    let i_unit = Scalar::imaginary_unit().expect("ℚ(i) has an imaginary unit");
    let x = |a: Index, f: &Element| BasisField::plain(a).apply(f, side).scale(&half);
    let ka = entrywise(alpha, |f| k_act(1, f, side));
    let kb = entrywise(beta, |f| k_act(1, f, side).scale(&i_unit));
    let kr = entrywise(rho, |f| k_act(2, f, side));
    let build = |a: Index, extra: &dyn Fn(usize, usize) -> Element| -> Matrix {
        (0..n).map(|i| (0..n).map(|j| &x(a, &metric.h[i][j]) + &extra(i, j)).collect()).collect()
    };
    let plus = build(Index::Plus, &|i, j| &ka[i][j] + &kb[i][j]);
    let minus = build(Index::Minus, &|i, j| &ka[i][j] - &kb[i][j]);
    let z = build(Index::Z, &|i, j| kr[i][j].clone());
    Connection::new(module.clone(), metric.clone(), [plus, minus, z])
}

/// Level at which metric compatibility is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompatLevel {
    /// `Γ̃_{ai,j} = X_a(h_ij) + (σ_ā∗(Γ̃_{āj,i}))∗`; inverse-free.
    GammaTilde,
    /// `X_a(h(m₁,m₂)) = −σ_a(h(∇_{X_ā∗}m₁, m₂)) + h(m₁, ∇_{X_a∗}m₂)` on basis pairs.
    Module,
}

fn residual(case: String, lhs: &Element, rhs: &Element) -> Failure {
    Failure::new(case, element_to_json(lhs), element_to_json(rhs))
}

pub fn check_metric_compatibility(conn: &Connection, level: CompatLevel) -> Result<CheckReport, ConnectionError> {
    match level {
        CompatLevel::GammaTilde => Ok(check_compat_gamma_tilde(conn)),
        CompatLevel::Module => {
            let n = conn.rank();
            let basis: Vec<ModuleElement> = (0..n).map(|i| basis_vector(n, i)).collect();
            let pairs: Vec<(String, ModuleElement, ModuleElement)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| (format!("(e{i}, e{j})"), basis[i].clone(), basis[j].clone()))
                .collect();
            check_compat_on_pairs(conn, &pairs)
        }
    }
}

fn check_compat_gamma_tilde(conn: &Connection) -> CheckReport {
    let side = conn.side();
    let h = &conn.metric.h;
    let n = conn.rank();
    let mut report = CheckReport::new(format!("metric compatibility, lowered symbols ({})", side.name()));
    for a in Index::ALL {
        let partner = a.opposite();
        for i in 0..n {
            for j in 0..n {
                let lhs = conn.gamma_tilde_entry(a, i, j);
                let twisted = sigma_apply(SigmaMap::star_of(partner), conn.gamma_tilde_entry(partner, j, i), side);
                let rhs = &BasisField::plain(a).apply(&h[i][j], side) + &twisted.star();
                report.record(*lhs == rhs, || residual(format!("a={} i={i} j={j}", a.name()), lhs, &rhs));
            }
        }
    }
    report
}

/// Module-level compatibility on the given pairs `(label, m₁, m₂)`.
pub fn check_compat_on_pairs(
    conn: &Connection,
    pairs: &[(String, ModuleElement, ModuleElement)],
) -> Result<CheckReport, ConnectionError> {
    let side = conn.side();
    let h = &conn.metric;
    let mut report = CheckReport::new(format!("metric compatibility, module level ({})", side.name()));
    for (label, m1, m2) in pairs {
        let hm = hermitian_form(h, m1, m2)?;
        for a in Index::ALL {
            let lhs = BasisField::plain(a).apply(&hm, side);
            let d1 = conn.nabla_field(BasisField::star_of(a.opposite()), m1)?;
            let d2 = conn.nabla_field(BasisField::star_of(a), m2)?;
            let first = sigma_apply(SigmaMap::plain(a), &hermitian_form(h, &d1, m2)?, side);
            let rhs = &hermitian_form(h, m1, &d2)? - &first;
            report.record(lhs == rhs, || residual(format!("a={} on {label}", a.name()), &lhs, &rhs));
        }
    }
    Ok(report)
}

fn q(n: i64) -> Scalar {
    Scalar::q_pow(n)
}

fn one_plus_q2() -> Scalar {
    &Scalar::one() + &q(2)
}

const P: usize = 0;
const M: usize = 1;
const Z: usize = 2;

/// Torsion freeness for a K-invariant metric on `Ω¹(S³_q)`:
///
/// ```text
/// Γ̃_{−+,a} − q²Γ̃_{+−,a} = h_{za}
/// q²Γ̃_{z−,a} − q⁻²Γ̃_{−z,a} = (1+q²)h_{−a}
/// q²Γ̃_{+z,a} − q⁻²Γ̃_{z+,a} = (1+q²)h_{+a}
/// ```
pub fn check_torsion_free(conn: &Connection) -> Result<CheckReport, ConnectionError> {
    if conn.rank() != 3 {
        return Err(ConnectionError::Dimension { expected: 3, found: conn.rank() });
    }
    if !conn.metric.k_invariant {
        return Err(ConnectionError::KInvarianceRequired);
    }
    let g = |a: usize, b: usize, c: usize| &conn.gamma_tilde[a][b][c];
    let h = &conn.metric.h;
    let mut report = CheckReport::new(format!("torsion freeness, lowered symbols ({})", conn.side().name()));
    for c in 0..3 {
        let eqs = [
            ("first", g(M, P, c) - &g(P, M, c).scale(&q(2)), h[Z][c].clone()),
            ("second", &g(Z, M, c).scale(&q(2)) - &g(M, Z, c).scale(&q(-2)), h[M][c].scale(&one_plus_q2())),
            ("third", &g(P, Z, c).scale(&q(2)) - &g(Z, P, c).scale(&q(-2)), h[P][c].scale(&one_plus_q2())),
        ];
        for (name, lhs, rhs) in eqs {
            report.record(lhs == rhs, || residual(format!("{name} equation, index {c}"), &lhs, &rhs));
        }
    }
    Ok(report)
}

/// Torsion freeness straight from the definition,
/// `∇₋ω₊ − q²∇₊ω₋ = ω_z`, `q²∇_zω₋ − q⁻²∇₋ω_z = (1+q²)ω₋`,
/// `q²∇₊ω_z − q⁻²∇_zω₊ = (1+q²)ω₊`, on the Christoffel symbols.
pub fn check_torsion_free_christoffel(conn: &Connection) -> Result<CheckReport, ConnectionError> {
    if conn.rank() != 3 {
        return Err(ConnectionError::Dimension { expected: 3, found: conn.rank() });
    }
    let gamma = conn.gamma_table()?;
    let g = |a: usize, b: usize, c: usize| &gamma[a][b][c];
    let unit = |c: usize, k: usize, s: Scalar| if c == k { Element::from_scalar(s) } else { Element::zero() };
    let mut report = CheckReport::new(format!("torsion freeness, Christoffel symbols ({})", conn.side().name()));
    for c in 0..3 {
        let eqs = [
            ("first", g(M, P, c) - &g(P, M, c).scale(&q(2)), unit(c, Z, Scalar::one())),
            ("second", &g(Z, M, c).scale(&q(2)) - &g(M, Z, c).scale(&q(-2)), unit(c, M, one_plus_q2())),
            ("third", &g(P, Z, c).scale(&q(2)) - &g(Z, P, c).scale(&q(-2)), unit(c, P, one_plus_q2())),
        ];
        for (name, lhs, rhs) in eqs {
            report.record(lhs == rhs, || residual(format!("{name} equation, index {c}"), &lhs, &rhs));
        }
    }
    Ok(report)
}

/// Free parameters of the Levi-Civita family; `f₀` and `ρ_zz` are hermitian.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LCParams {
    pub tau1: Element,
    pub tau4: Element,
    pub mu2: Element,
    pub gamma_pm: Element,
    pub rho_zz: Element,
    pub f0: Element,
}

impl LCParams {
    pub fn from_json(v: &Value) -> Result<Self, ConnectionError> {
        let get = |key: &str| -> Result<Element, ConnectionError> {
            match v.get(key) {
                None | Some(Value::Null) => Ok(Element::zero()),
                Some(x) => Ok(element_from_json(x, &format!("$.params.{key}"))?),
            }
        };
        Ok(LCParams {
            tau1: get("tau1")?,
            tau4: get("tau4")?,
            mu2: get("mu2")?,
            gamma_pm: get("gamma_pm")?,
            rho_zz: get("rho_zz")?,
            f0: get("f0")?,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tau1": element_to_json(&self.tau1),
            "tau4": element_to_json(&self.tau4),
            "mu2": element_to_json(&self.mu2),
            "gamma_pm": element_to_json(&self.gamma_pm),
            "rho_zz": element_to_json(&self.rho_zz),
            "f0": element_to_json(&self.f0),
        })
    }
}

/// `H = qX₊(h_{−z}) − q⁻¹X₋(h_{+z})`; a Levi-Civita connection exists when it is hermitian.
pub fn reality_residual(h: &Matrix, side: Side) -> Element {
    let xp = BasisField::plain(Index::Plus).apply(&h[M][Z], side).scale(&q(1));
    let xm = BasisField::plain(Index::Minus).apply(&h[P][Z], side).scale(&q(-1));
    &xp - &xm
}

/// The six-parameter torsion-free metric connection on `Ω¹(S³_q)` for a
/// K-invariant metric, symbol by symbol.
pub fn levi_civita(metric: &HermitianMetric, p: &LCParams, side: Side) -> Result<Connection, ConnectionError> {
    if metric.rank() != 3 {
        return Err(ConnectionError::Dimension { expected: 3, found: metric.rank() });
    }
    check_hermitian_matrix(&metric.h, "metric")?;
    let metric = metric.clone().with_k_invariance(side)?;
    if p.f0.star() != p.f0 {
        return Err(ConnectionError::NotHermitian { what: "f0".into(), i: 0, j: 0 });
    }
    if p.rho_zz.star() != p.rho_zz {
        return Err(ConnectionError::NotHermitian { what: "rho_zz".into(), i: 0, j: 0 });
    }
    let hr = reality_residual(&metric.h, side);
    if hr.star() != hr {
        return Err(ConnectionError::Reality { residual: hr });
    }

    let h = |a: usize, b: usize| metric.h[a][b].clone();
    let xp = |a: usize, b: usize| BasisField::plain(Index::Plus).apply(&metric.h[a][b], side);
    let xm = |a: usize, b: usize| BasisField::plain(Index::Minus).apply(&metric.h[a][b], side);
    let k = |n: i64, f: &Element| k_act(n, f, side);
    let c = |num: i64, den: i64, qp: i64| Scalar::from_ratio(num, den).mul_s_pow(2 * qp);
    let qq = |sign: i64, qp: i64| &Scalar::from_int(sign) * &one_plus_q2().mul_s_pow(2 * qp);
    let sum = |terms: Vec<Element>| terms.into_iter().fold(Element::zero(), |acc, t| &acc + &t);

    let (t1, t1s) = (p.tau1.clone(), p.tau1.star());
    let (t4, t4s) = (p.tau4.clone(), p.tau4.star());
    let (m2, m2s) = (p.mu2.clone(), p.mu2.star());
    let (gpm, gpms) = (p.gamma_pm.clone(), p.gamma_pm.star());
    let f0 = &p.f0;

    let mut g: [Matrix; 3] = std::array::from_fn(|_| vec![vec![Element::zero(); 3]; 3]);

    g[P][P][P] = sum(vec![xp(P, P), xm(P, M).scale(&c(-1, 2, 2)), h(P, Z), k(1, &t1s).scale(&q(2))]);
    g[P][M][M] = sum(vec![xm(P, M).scale(&c(1, 2, -2)), h(Z, M).scale(&c(-1, 1, -2)), k(1, &t1s).scale(&q(-2))]);
    g[P][Z][Z] = sum(vec![xp(Z, Z).scale(&c(1, 2, 0)), k(1, &t4)]);
    g[P][P][M] = sum(vec![xp(P, M).scale(&c(1, 2, 0)), k(1, &gpm)]);
    g[P][M][P] = sum(vec![xp(M, P).scale(&c(1, 2, 0)), k(1, &t1)]);
    g[P][Z][P] = sum(vec![
        xp(Z, P).scale(&c(1, 2, 0)),
        xm(Z, M).scale(&c(-1, 2, 2)),
        h(Z, Z).scale(&c(1, 2, 0)),
        k(2, f0).scale(&q(1)),
    ]);
    g[P][P][Z] = sum(vec![xp(P, Z), h(P, M).scale(&qq(-1, 2)), m2s.scale(&q(4))]);
    g[P][Z][M] = sum(vec![h(P, M).scale(&qq(1, -2)), k(2, &m2s).scale(&q(-4))]);
    g[P][M][Z] = sum(vec![
        xp(M, Z).scale(&c(1, 2, 0)),
        xm(P, Z).scale(&c(1, 2, -2)),
        h(Z, Z).scale(&c(-1, 2, -2)),
        f0.scale(&q(-1)),
    ]);

    g[M][P][P] = sum(vec![xp(M, P).scale(&c(1, 2, 2)), h(Z, P), k(1, &t1).scale(&q(2))]);
    g[M][M][M] = sum(vec![xm(M, M), xp(M, P).scale(&c(-1, 2, -2)), h(M, Z).scale(&c(-1, 1, -2)), k(1, &t1).scale(&q(-2))]);
    g[M][Z][Z] = sum(vec![xm(Z, Z).scale(&c(1, 2, 0)), k(1, &t4s)]);
    g[M][P][M] = sum(vec![xm(P, M).scale(&c(1, 2, 0)), k(1, &t1s)]);
    g[M][M][P] = sum(vec![xm(M, P).scale(&c(1, 2, 0)), k(1, &gpms)]);
    g[M][P][Z] = sum(vec![
        xm(P, Z).scale(&c(1, 2, 0)),
        xp(M, Z).scale(&c(1, 2, 2)),
        h(Z, Z).scale(&c(1, 2, 0)),
        f0.scale(&q(1)),
    ]);
    g[M][Z][P] = sum(vec![h(M, P).scale(&qq(-1, 2)), k(2, &m2).scale(&q(4))]);
    g[M][M][Z] = sum(vec![xm(M, Z), h(M, P).scale(&qq(1, -2)), m2.scale(&q(-4))]);
    g[M][Z][M] = sum(vec![
        xm(Z, M).scale(&c(1, 2, 0)),
        xp(Z, P).scale(&c(-1, 2, -2)),
        h(Z, Z).scale(&c(-1, 2, -2)),
        k(2, f0).scale(&q(-1)),
    ]);

    g[Z][P][P] = sum(vec![
        xp(Z, P).scale(&c(1, 2, 4)),
        xm(Z, M).scale(&c(-1, 2, 6)),
        h(P, P).scale(&qq(-1, 2)),
        h(Z, Z).scale(&c(1, 2, 4)),
        k(2, f0).scale(&q(5)),
    ]);
    g[Z][M][M] = sum(vec![
        xm(Z, M).scale(&c(1, 2, -4)),
        xp(Z, P).scale(&c(-1, 2, -6)),
        h(M, M).scale(&qq(1, -2)),
        h(Z, Z).scale(&c(-1, 2, -6)),
        k(2, f0).scale(&q(-5)),
    ]);
    g[Z][Z][Z] = k(2, &p.rho_zz);
    g[Z][P][M] = k(2, &m2s);
    g[Z][M][P] = k(2, &m2);
    g[Z][P][Z] = sum(vec![xp(Z, Z).scale(&c(1, 2, 4)), h(P, Z).scale(&qq(-1, 2)), k(1, &t4).scale(&q(4))]);
    g[Z][Z][P] = sum(vec![xm(Z, Z).scale(&c(-1, 2, 2)), h(Z, P).scale(&qq(-1, 2)), k(3, &t4s).scale(&q(4))]);
    g[Z][M][Z] = sum(vec![xm(Z, Z).scale(&c(1, 2, -4)), h(M, Z).scale(&qq(1, -2)), k(1, &t4s).scale(&q(-4))]);
    g[Z][Z][M] = sum(vec![xp(Z, Z).scale(&c(-1, 2, -2)), h(Z, M).scale(&qq(1, -2)), k(3, &t4).scale(&q(-4))]);

    Connection::new(SigmaModule::one_forms(side), metric, g)
}

/// The lowered Levi-Civita symbols for `h = δ` with all parameters zero:
/// `Γ̃_{+−,z} = Γ̃_{−z,−} = −½q⁻²`, `Γ̃_{+z,+} = Γ̃_{−+,z} = ½`,
/// `Γ̃_{z+,+} = −½q²(2+q²)`, `Γ̃_{z−,−} = ½(2 + 2q⁻² − q⁻⁶)`, all others zero.
pub fn levi_civita_delta_table() -> [Matrix; 3] {
    let half = Scalar::from_ratio(1, 2);
    let mut g: [Matrix; 3] = std::array::from_fn(|_| vec![vec![Element::zero(); 3]; 3]);
    g[P][M][Z] = Element::from_scalar(-half.mul_s_pow(-4));
    g[P][Z][P] = Element::from_scalar(half.clone());
    g[M][P][Z] = Element::from_scalar(half.clone());
    g[M][Z][M] = Element::from_scalar(-half.mul_s_pow(-4));
    g[Z][P][P] = Element::from_scalar(-(&(&Scalar::from_int(2) + &q(2)) * &half.mul_s_pow(4)));
    g[Z][M][M] = Element::from_scalar(&(&(&Scalar::from_int(2) + &(&Scalar::from_int(2) * &q(-2))) - &q(-6)) * &half);
    g
}

/// Serializes the 27 lowered symbols under keys such as `"+-,z"`.
pub fn gamma_tilde_to_json(conn: &Connection) -> Value {
    let mut map = Map::new();
    let n = conn.rank();
    let name = |i: usize| if n == 3 { Index::ALL[i].name().to_string() } else { i.to_string() };
    for a in Index::ALL {
        for i in 0..n {
            for j in 0..n {
                map.insert(
                    format!("{}{},{}", a.name(), name(i), name(j)),
                    element_to_json(conn.gamma_tilde_entry(a, i, j)),
                );
            }
        }
    }
    Value::Object(map)
}

/// `p∘∇⁰` on the image of an idempotent `p` acting on row vectors,
/// `p(m)^ν = m^μ p_μ^ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedConnection {
    pub p: Matrix,
    pub base: Connection,
}

pub fn project(p: &Matrix, m: &ModuleElement) -> ModuleElement {
    let n = p.len();
    (0..n)
        .map(|nu| (0..n).fold(Element::zero(), |acc, mu| &acc + &(&m[mu] * &p[mu][nu])))
        .collect()
}

/// Wraps `∇⁰` as `p∘∇⁰`; `p` must be idempotent, and orthogonal for `h` when
/// `require_orthogonal` is set.
pub fn project_connection(
    p: &Matrix,
    base: &Connection,
    require_orthogonal: bool,
) -> Result<ProjectedConnection, ConnectionError> {
    let n = base.rank();
    check_square(p, n)?;
    let p2 = matrix_mul(p, p);
    for i in 0..n {
        for j in 0..n {
            if p2[i][j] != p[i][j] {
                return Err(ConnectionError::NotIdempotent { i, j });
            }
        }
    }
    if require_orthogonal {
        for i in 0..n {
            for j in 0..n {
                let (ei, ej) = (basis_vector(n, i), basis_vector(n, j));
                let lhs = hermitian_form(&base.metric, &project(p, &ei), &ej)?;
                let rhs = hermitian_form(&base.metric, &ei, &project(p, &ej))?;
                if lhs != rhs {
                    return Err(ConnectionError::NotOrthogonal { i, j });
                }
            }
        }
    }
    Ok(ProjectedConnection { p: p.clone(), base: base.clone() })
}

impl ProjectedConnection {
    /// The generator `ê_μ = p(e_μ)`, i.e. row `μ` of `p`.
    pub fn generator(&self, mu: usize) -> ModuleElement {
        self.p[mu].clone()
    }

    pub fn nabla_field(&self, b: BasisField, m: &ModuleElement) -> Result<ModuleElement, ConnectionError> {
        Ok(project(&self.p, &self.base.nabla_field(b, m)?))
    }

    /// Module-level compatibility on all generator pairs `(ê_μ, ê_ν)`.
    pub fn check_compatibility(&self) -> Result<CheckReport, ConnectionError> {
        let n = self.p.len();
        let side = self.base.side();
        let h = &self.base.metric;
        let mut report = CheckReport::new(format!("projected metric compatibility ({})", side.name()));
        for mu in 0..n {
            for nu in 0..n {
                let (m1, m2) = (self.generator(mu), self.generator(nu));
                let hm = hermitian_form(h, &m1, &m2)?;
                for a in Index::ALL {
                    let lhs = BasisField::plain(a).apply(&hm, side);
                    let d1 = self.nabla_field(BasisField::star_of(a.opposite()), &m1)?;
                    let d2 = self.nabla_field(BasisField::star_of(a), &m2)?;
                    let first = sigma_apply(SigmaMap::plain(a), &hermitian_form(h, &d1, &m2)?, side);
                    let rhs = &hermitian_form(h, &m1, &d2)? - &first;
                    report.record(lhs == rhs, || residual(format!("a={} on (e{mu}, e{nu})", a.name()), &lhs, &rhs));
                }
            }
        }
        Ok(report)
    }
}

/// `Γ̃` tables with one entry shifted by a monomial, for negative controls.
pub fn perturb(conn: &Connection, a: Index, i: usize, j: usize, by: Monomial) -> Connection {
    let mut gt = conn.gamma_tilde.clone();
    gt[a.pos()][i][j].add_term(by, Scalar::one());
    Connection::new(conn.module.clone(), conn.metric.clone(), gt).expect("shape is unchanged")
}
