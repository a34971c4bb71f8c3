//! Suite runner: configuration, concurrent execution and deterministic
//! reports.
//!
//! Suites run in parallel; results are collected in suite order, and every
//! check enumerates its cases in a fixed order, so the emitted bytes depend
//! only on the configuration. Wall-clock timings are measured but only
//! emitted when [`SuiteConfig::timing`] is set.

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{enumerate_basis, Element, Monomial};
use crate::calculus;
use crate::connections::{
    check_metric_compatibility, check_torsion_free, check_torsion_free_christoffel, constant_inverse,
    identity_matrix, levi_civita, levi_civita_delta_table, metric_connection_from_params, perturb, CompatLevel,
    Connection, ConnectionError, HermitianMetric, LCParams, Matrix, SigmaModule,
};
use crate::derivations::{self, Index};
use crate::json::element_to_json;
use crate::podles::{self, basis_indices};
use crate::report::{CheckReport, Failure};
use crate::sample;
use crate::tables;
use crate::uq::{self, Side, UqElement, UqGen};

pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Algebra,
    UqTables,
    Pairing,
    Leibniz,
    Commutation,
    StarRelations,
    Calculus,
    MetricConnections,
    LeviCivita,
    Torsion,
    PodlesRvf,
    PodlesExd,
    Projectors,
    BundleConnections,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::Algebra,
        Suite::UqTables,
        Suite::Pairing,
        Suite::Leibniz,
        Suite::Commutation,
        Suite::StarRelations,
        Suite::Calculus,
        Suite::MetricConnections,
        Suite::LeviCivita,
        Suite::Torsion,
        Suite::PodlesRvf,
        Suite::PodlesExd,
        Suite::Projectors,
        Suite::BundleConnections,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::UqTables => "uq-tables",
            Suite::Pairing => "pairing",
            Suite::Leibniz => "leibniz",
            Suite::Commutation => "commutation",
            Suite::StarRelations => "star-relations",
            Suite::Calculus => "calculus",
            Suite::MetricConnections => "metric-connections",
            Suite::LeviCivita => "levi-civita",
            Suite::Torsion => "torsion",
            Suite::PodlesRvf => "podles-rvf",
            Suite::PodlesExd => "podles-exd",
            Suite::Projectors => "projectors",
            Suite::BundleConnections => "bundle-connections",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| HarnessError::UnknownSuite(s.to_string()))
    }
}

/// Parses suite names; `"all"` selects every suite.
pub fn parse_suites<S: AsRef<str>>(names: &[S]) -> Result<Vec<Suite>, HarnessError> {
    let mut out = Vec::new();
    for n in names {
        match n.as_ref() {
            "all" => out.extend(Suite::ALL),
            other => out.push(other.parse()?),
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("unknown report format {0:?}, expected json or text")]
    UnknownFormat(String),
    #[error("cannot read {path}: {cause}")]
    Io { path: PathBuf, cause: io::Error },
    #[error("{path}: invalid JSON at line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{path}: {cause}")]
    Invalid { path: PathBuf, cause: ConnectionError },
    #[error("{path}: \"side\" must be \"left\" or \"right\", found {found}")]
    BadSide { path: PathBuf, found: String },
}

/// A metric read from a file, with the side its fields act on.
#[derive(Clone, Debug, PartialEq)]
pub struct UserMetric {
    pub source: String,
    pub side: Side,
    pub metric: HermitianMetric,
}

fn read_json(path: &Path) -> Result<Value, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|cause| HarnessError::Io { path: path.into(), cause })?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
        path: path.into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Reads `{"h": [[…]], "h_inv"?: [[…]], "side"?: "left" | "right"}`.
///
/// Hermiticity is enforced; K-invariance is recorded when it holds on the
/// chosen side (default left).
pub fn load_metric(path: &Path) -> Result<UserMetric, HarnessError> {
    let v = read_json(path)?;
    let side = match v.get("side") {
        None | Some(Value::Null) => Side::Left,
        Some(Value::String(s)) if s == "left" => Side::Left,
        Some(Value::String(s)) if s == "right" => Side::Right,
        Some(other) => return Err(HarnessError::BadSide { path: path.into(), found: other.to_string() }),
    };
    let metric =
        HermitianMetric::from_json(&v, side).map_err(|cause| HarnessError::Invalid { path: path.into(), cause })?;
    let metric = match metric.clone().with_k_invariance(side) {
        Ok(m) => m,
        Err(_) => metric,
    };
    Ok(UserMetric { source: path.display().to_string(), side, metric })
}

/// Reads the Levi-Civita parameters; absent keys are zero.
pub fn load_params(path: &Path) -> Result<LCParams, HarnessError> {
    let v = read_json(path)?;
    LCParams::from_json(&v).map_err(|cause| HarnessError::Invalid { path: path.into(), cause })
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    /// Monomial length bound for the sweeps and the Podleś index range.
    pub max_degree: u32,
    /// Line bundles `|n| <= bundle_range` for the projector suite.
    pub bundle_range: u32,
    pub metric: Option<UserMetric>,
    pub params: Option<LCParams>,
    pub seed: u64,
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: Suite::ALL.to_vec(),
            max_degree: 4,
            bundle_range: 4,
            metric: None,
            params: None,
            seed: DEFAULT_SEED,
            timing: false,
        }
    }
}

impl SuiteConfig {
    fn to_json(&self) -> Value {
        json!({
            "suites": self.suites.iter().map(|s| s.name()).collect::<Vec<_>>(),
            "max_degree": self.max_degree,
            "bundle_range": self.bundle_range,
            "metric": self.metric.as_ref().map(|m| m.source.clone()),
            "params": self.params.as_ref().map(LCParams::to_json),
            "seed": self.seed,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub suite: Suite,
    pub checks: Vec<CheckReport>,
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }

    pub fn cases(&self) -> usize {
        self.checks.iter().map(|c| c.cases).sum()
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().map(|c| c.failed).sum()
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub results: Vec<SuiteResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(SuiteResult::passed)
    }

    /// Process exit status: 0 iff no check failed.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn suite(&self, s: Suite) -> Option<&SuiteResult> {
        self.results.iter().find(|r| r.suite == s)
    }

    pub fn to_json(&self) -> Value {
        let timing = self.config.timing;
        let suites: Vec<Value> = self
            .results
            .iter()
            .map(|r| {
                let mut v = json!({
                    "name": r.suite.name(),
                    "passed": r.passed(),
                    "cases": r.cases(),
                    "failed": r.failed(),
                    "checks": r.checks.iter().map(|c| json!({
                        "name": c.name,
                        "passed": c.passed(),
                        "cases": c.cases,
                        "failed": c.failed,
                        "failures": c.failures,
                    })).collect::<Vec<_>>(),
                });
                if timing {
                    v["elapsed_ms"] = json!(r.elapsed.as_millis() as u64);
                }
                v
            })
            .collect();
        json!({
            "config": self.config.to_json(),
            "suites": suites,
            "totals": {
                "suites": self.results.len(),
                "failed_suites": self.results.iter().filter(|r| !r.passed()).count(),
                "checks": self.results.iter().map(|r| r.checks.len()).sum::<usize>(),
                "cases": self.results.iter().map(SuiteResult::cases).sum::<usize>(),
                "failed": self.results.iter().map(SuiteResult::failed).sum::<usize>(),
                "passed": self.passed(),
            },
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        for r in &self.results {
            out.push_str(&format!("{} {} ({} cases, {} failed)", verdict(r.passed()), r.suite, r.cases(), r.failed()));
            if self.config.timing {
                out.push_str(&format!(" [{} ms]", r.elapsed.as_millis()));
            }
            out.push('\n');
            for c in &r.checks {
                out.push_str(&format!("  {} {}: {}/{} cases pass\n", verdict(c.passed()), c.name, c.cases - c.failed, c.cases));
                for f in &c.failures {
                    out.push_str(&format!("    counterexample {}\n      lhs = {}\n      rhs = {}\n", f.case, f.lhs, f.rhs));
                }
            }
        }
        let cases: usize = self.results.iter().map(SuiteResult::cases).sum();
        let failed: usize = self.results.iter().map(SuiteResult::failed).sum();
        out.push_str(&format!(
            "{}: {} suites, {} cases, {} failed\n",
            verdict(self.passed()),
            self.results.len(),
            cases,
            failed
        ));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(HarnessError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn emit_report(r: &SuiteReport, format: Format, out: &mut impl Write) -> io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &r.to_json())?;
            writeln!(out)
        }
        Format::Text => out.write_all(r.to_text().as_bytes()),
    }
}

/// Runs the selected suites concurrently and assembles the report in suite order.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    let results = suites
        .par_iter()
        .map(|&suite| {
            let start = Instant::now();
            let checks = run_one(suite, cfg);
            SuiteResult { suite, checks, elapsed: start.elapsed() }
        })
        .collect();
    SuiteReport { config: SuiteConfig { suites, ..cfg.clone() }, results }
}

fn run_one(suite: Suite, cfg: &SuiteConfig) -> Vec<CheckReport> {
    match suite {
        Suite::Algebra => algebra(cfg),
        Suite::UqTables => uq_tables(cfg),
        Suite::Pairing => vec![tables::check_pairing_table()],
        Suite::Leibniz => leibniz(cfg),
        Suite::Commutation => Side::BOTH.iter().map(|&s| derivations::check_commutation_relations(cfg.max_degree, s)).collect(),
        Suite::StarRelations => star_relations(cfg),
        Suite::Calculus => calculus_suite(cfg),
        Suite::MetricConnections => metric_connections(cfg),
        Suite::LeviCivita => levi_civita_suite(cfg),
        Suite::Torsion => torsion(cfg),
        Suite::PodlesRvf => podles_rvf(cfg),
        Suite::PodlesExd => podles_exd(cfg),
        Suite::Projectors => projectors(cfg),
        Suite::BundleConnections => bundle_connections(cfg),
    }
}

/// A report whose single case failed with an error message.
fn error_report(name: impl Into<String>, case: impl Into<String>, err: impl fmt::Display) -> CheckReport {
    let mut r = CheckReport::new(name);
    r.fail_case(Failure::new(case, json!(err.to_string()), Value::Null));
    r
}

fn tagged(mut r: CheckReport, tag: &str) -> CheckReport {
    for f in &mut r.failures {
        f.case = format!("{tag}: {}", f.case);
    }
    r
}

/// Absorbs a fallible check, turning an error into one failed case.
fn absorb_result<E: fmt::Display>(into: &mut CheckReport, tag: &str, r: Result<CheckReport, E>) {
    match r {
        Ok(r) => into.absorb(tagged(r, tag)),
        Err(e) => into.fail_case(Failure::new(tag, json!(e.to_string()), Value::Null)),
    }
}

/// One case per control: passes when the inner check fails.
fn record_detected(into: &mut CheckReport, tag: &str, r: Result<CheckReport, ConnectionError>) {
    match r {
        Ok(inner) => into.record(!inner.passed(), || Failure::new(tag, json!("check passed"), json!("check fails"))),
        Err(e) => into.fail_case(Failure::new(tag, json!(e.to_string()), Value::Null)),
    }
}

fn algebra(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let len = cfg.max_degree.min(3);
    vec![
        tables::check_associativity(cfg.seed, 1000, len),
        tables::check_star_antihomomorphism(len),
        tables::check_q_integer_recurrence(20),
    ]
}

fn uq_tables(cfg: &SuiteConfig) -> Vec<CheckReport> {
    // powers up to D + 1, i.e. n = 1..5 by default
    let max_n = if cfg.max_degree == 0 { 0 } else { cfg.max_degree + 1 };
    let mut out: Vec<CheckReport> = tables::check_power_tables(max_n).into();
    out.extend(Side::BOTH.iter().map(|&s| uq::check_uq_relations(cfg.max_degree, s)));
    out
}

fn leibniz(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let d = cfg.max_degree;
    Side::BOTH
        .iter()
        .flat_map(|&s| {
            [
                derivations::check_leibniz_sweep(d, s),
                derivations::check_sigma_laws(d, s),
                derivations::check_k_invariant_kernel(d, s),
            ]
        })
        .collect()
}

fn star_relations(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let gens = [UqGen::E, UqGen::F, UqGen::K, UqGen::KInv];
    let words: Vec<UqElement> = gens
        .iter()
        .map(|&g| UqElement::gen(g))
        .chain(gens.iter().flat_map(|&g| gens.iter().map(move |&h| UqElement::word(&[g, h]))))
        .collect();
    let basis = enumerate_basis(cfg.max_degree);
    let mut out = Vec::new();
    for side in Side::BOTH {
        out.push(derivations::check_star_fields(cfg.max_degree, side));
        let mut r = CheckReport::new(format!("action star compatibility ({})", side.name()));
        for h in &words {
            for m in &basis {
                r.absorb(uq::check_star_compatibility(h, &Element::monomial(*m), side));
            }
        }
        out.push(r);
    }
    out
}

fn calculus_suite(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let d = cfg.max_degree;
    vec![
        calculus::check_reconstruction(),
        calculus::check_leibniz(d),
        calculus::check_relations(),
        calculus::check_dagger(d),
        calculus::check_bimodule(d),
    ]
}

/// A generic invertible constant hermitian metric.
pub fn generic_constant_metric(rng: &mut ChaCha8Rng, n: usize) -> HermitianMetric {
    loop {
        let h = sample::constant_hermitian_matrix(rng, n);
        if constant_inverse(&h).is_some() {
            return HermitianMetric::constant(h).expect("sampled matrix is hermitian");
        }
    }
}

/// Parameters of entry-degree `<= 1`; `f₀` and `ρ_zz` hermitian.
pub fn sample_lc_params(rng: &mut ChaCha8Rng) -> LCParams {
    LCParams {
        tau1: sample::element(rng, 1, 2),
        tau4: sample::element(rng, 1, 2),
        mu2: sample::element(rng, 1, 2),
        gamma_pm: sample::element(rng, 1, 2),
        rho_zz: sample::hermitian_element(rng, 1, 2),
        f0: sample::hermitian_element(rng, 1, 2),
    }
}

/// Seeded hermitian `(α, β, ρ)` of entry-degree `<= 1`.
pub fn sample_metric_params(rng: &mut ChaCha8Rng, n: usize) -> (Matrix, Matrix, Matrix) {
    (
        sample::hermitian_matrix(rng, n, 1, 2),
        sample::hermitian_matrix(rng, n, 1, 2),
        sample::hermitian_matrix(rng, n, 1, 2),
    )
}

/// Lowered-symbol entries that enter the torsion equations.
const TORSION_ENTRIES: [(Index, usize); 6] =
    [(Index::Minus, 0), (Index::Plus, 1), (Index::Z, 1), (Index::Minus, 2), (Index::Plus, 2), (Index::Z, 0)];

fn random_perturbation(rng: &mut ChaCha8Rng, conn: &Connection, torsion_only: bool) -> (Connection, String) {
    let (a, i) = if torsion_only {
        *TORSION_ENTRIES.choose(rng).expect("nonempty")
    } else {
        (*Index::ALL.choose(rng).expect("nonempty"), rng.gen_range(0..3))
    };
    let j = rng.gen_range(0..3);
    let by: Monomial = *enumerate_basis(1).choose(rng).expect("basis contains 1");
    let label = format!("Γ̃[{}][{i}][{j}] + {by}", a.name());
    (perturb(conn, a, i, j, by), label)
}

fn metric_connections(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut rng = sample::rng(cfg.seed);
    let generic = generic_constant_metric(&mut rng, 3);
    let samples: Vec<_> = (0..20).map(|_| sample_metric_params(&mut rng, 3)).collect();
    let metrics = [("delta", HermitianMetric::delta(3)), ("generic", generic)];
    let mut out = Vec::new();
    for side in Side::BOTH {
        let module = SigmaModule::one_forms(side);
        let mut gt = CheckReport::new(format!("seeded metric connections, lowered compatibility ({})", side.name()));
        let mut md = CheckReport::new(format!("seeded metric connections, module compatibility ({})", side.name()));
        let mut built = Vec::new();
        for (k, (a, b, r)) in samples.iter().enumerate() {
            for (label, m) in &metrics {
                let tag = format!("sample {k} over {label}");
                match metric_connection_from_params(&module, m, a, b, r) {
                    Ok(conn) => {
                        absorb_result(&mut gt, &tag, check_metric_compatibility(&conn, CompatLevel::GammaTilde));
                        absorb_result(&mut md, &tag, check_metric_compatibility(&conn, CompatLevel::Module));
                        built.push(conn);
                    }
                    Err(e) => gt.fail_case(Failure::new(tag, json!(e.to_string()), Value::Null)),
                }
            }
        }
        let mut neg = CheckReport::new(format!("perturbed symbols are rejected ({})", side.name()));
        for conn in built.iter().take(5) {
            let (bad, label) = random_perturbation(&mut rng, conn, false);
            record_detected(&mut neg, &label, check_metric_compatibility(&bad, CompatLevel::GammaTilde));
        }
        out.extend([gt, md, neg]);
    }
    if let Some(user) = &cfg.metric {
        let n = user.metric.rank();
        let module = SigmaModule { side: user.side, ..SigmaModule::free(n, user.side) };
        let mut gt = CheckReport::new(format!("metric file {}, lowered compatibility", user.source));
        let mut md = CheckReport::new(format!("metric file {}, module compatibility", user.source));
        for k in 0..20 {
            let (a, b, r) = sample_metric_params(&mut rng, n);
            let tag = format!("sample {k}");
            match metric_connection_from_params(&module, &user.metric, &a, &b, &r) {
                Ok(conn) => {
                    absorb_result(&mut gt, &tag, check_metric_compatibility(&conn, CompatLevel::GammaTilde));
                    if user.metric.h_inv.is_some() {
                        absorb_result(&mut md, &tag, check_metric_compatibility(&conn, CompatLevel::Module));
                    }
                }
                Err(e) => gt.fail_case(Failure::new(tag, json!(e.to_string()), Value::Null)),
            }
        }
        out.push(gt);
        if user.metric.h_inv.is_some() {
            out.push(md);
        }
    }
    out
}

fn entry(h: &mut Matrix, i: usize, j: usize, x: Element) {
    h[j][i] = x.star();
    h[i][j] = x;
}

/// Non-constant left K-invariant metrics satisfying the reality condition.
pub fn nonconstant_test_metrics() -> Vec<(&'static str, HermitianMetric)> {
    let (a, ast, c, cst) = (Element::a(), Element::a_star(), Element::c(), Element::c_star());
    let ccs = &c * &cst;
    let mut out = Vec::new();
    let mut h = identity_matrix(3);
    h[0][0] = &Element::one() + &ccs;
    out.push(("diag(1+cc*,1,1)", h));
    for (label, x) in [("h+- = a*c", &ast * &c), ("h+- = ac*", &a * &cst), ("h+- = cc*", ccs.clone())] {
        let mut h = identity_matrix(3);
        entry(&mut h, 0, 1, x);
        out.push((label, h));
    }
    let mut h = identity_matrix(3);
    entry(&mut h, 0, 2, &a * &cst);
    entry(&mut h, 1, 2, (&ast * &c).scale(&crate::Scalar::q_pow(-3)));
    out.push(("h+z = ac*, h-z = q^-3 a*c", h));
    let mut h = identity_matrix(3);
    entry(&mut h, 0, 2, ccs.scale(&crate::Scalar::q_pow(4)));
    entry(&mut h, 1, 2, ccs);
    out.push(("h+z = q^4 cc*, h-z = cc*", h));
    out.into_iter()
        .map(|(l, h)| (l, HermitianMetric::new(h).expect("test metrics are hermitian")))
        .collect()
}

/// `h_{+z} = ac∗`, `h_{−z} = 0`: the reality residual `q⁻²a²` is not hermitian.
pub fn reality_violating_metric() -> HermitianMetric {
    let mut h = identity_matrix(3);
    entry(&mut h, 0, 2, &Element::a() * &Element::c_star());
    HermitianMetric::new(h).expect("hermitian by construction")
}

fn levi_civita_checks(into: &mut [CheckReport; 3], tag: &str, conn: &Connection) {
    absorb_result(&mut into[0], tag, check_torsion_free(conn));
    absorb_result(&mut into[1], tag, check_metric_compatibility(conn, CompatLevel::GammaTilde));
    if conn.gamma.is_some() {
        absorb_result(&mut into[2], tag, check_metric_compatibility(conn, CompatLevel::Module));
    }
}

fn lc_reports(label: &str) -> [CheckReport; 3] {
    [
        CheckReport::new(format!("{label}, torsion")),
        CheckReport::new(format!("{label}, lowered compatibility")),
        CheckReport::new(format!("{label}, module compatibility")),
    ]
}

fn user_levi_civita(cfg: &SuiteConfig, torsion_only: bool) -> Vec<CheckReport> {
    let Some(user) = &cfg.metric else { return Vec::new() };
    let params = cfg.params.clone().unwrap_or_default();
    let label = format!("metric file {}", user.source);
    match levi_civita(&user.metric, &params, user.side) {
        Ok(conn) => {
            if torsion_only {
                let mut r = CheckReport::new(format!("{label}, torsion"));
                absorb_result(&mut r, "lowered form", check_torsion_free(&conn));
                if conn.gamma.is_some() {
                    absorb_result(&mut r, "Christoffel form", check_torsion_free_christoffel(&conn));
                }
                vec![r]
            } else {
                let mut r = lc_reports(&label);
                levi_civita_checks(&mut r, "", &conn);
                r.into_iter().filter(|r| r.cases > 0).collect()
            }
        }
        Err(ConnectionError::Reality { residual }) => {
            let mut r = CheckReport::new(format!("{label}, reality condition"));
            r.fail_case(Failure::new("H = H*", element_to_json(&residual), element_to_json(&residual.star())));
            vec![r]
        }
        Err(e) => vec![error_report(format!("{label}, Levi-Civita construction"), "levi_civita", e)],
    }
}

fn levi_civita_suite(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut rng = sample::rng(cfg.seed);
    let mut out = Vec::new();
    let expected = levi_civita_delta_table();
    for side in Side::BOTH {
        let mut table = CheckReport::new(format!("delta metric, closed form ({})", side.name()));
        let mut checks = lc_reports(&format!("delta metric ({})", side.name()));
        match levi_civita(&HermitianMetric::delta(3), &LCParams::default(), side) {
            Ok(conn) => {
                for a in Index::ALL {
                    for i in 0..3 {
                        for j in 0..3 {
                            let (got, want) = (conn.gamma_tilde_entry(a, i, j), &expected[a.pos()][i][j]);
                            table.record(got == want, || {
                                Failure::new(
                                    format!("Γ̃[{}][{i}][{j}]", a.name()),
                                    element_to_json(got),
                                    element_to_json(want),
                                )
                            });
                        }
                    }
                }
                levi_civita_checks(&mut checks, "delta", &conn);
            }
            Err(e) => table.fail_case(Failure::new("levi_civita(delta, 0)", json!(e.to_string()), Value::Null)),
        }
        out.push(table);
        out.extend(checks);

        let mut seeded = lc_reports(&format!("seeded constant metrics ({})", side.name()));
        for k in 0..5 {
            let metric = generic_constant_metric(&mut rng, 3);
            let params = sample_lc_params(&mut rng);
            let tag = format!("sample {k}");
            match levi_civita(&metric, &params, side) {
                Ok(conn) => levi_civita_checks(&mut seeded, &tag, &conn),
                Err(e) => seeded[0].fail_case(Failure::new(tag, json!(e.to_string()), Value::Null)),
            }
        }
        out.extend(seeded);
    }

    let mut nonconst = lc_reports("non-constant metrics (left)");
    for (label, metric) in nonconstant_test_metrics() {
        match levi_civita(&metric, &LCParams::default(), Side::Left) {
            Ok(conn) => levi_civita_checks(&mut nonconst, label, &conn),
            Err(e) => nonconst[0].fail_case(Failure::new(label, json!(e.to_string()), Value::Null)),
        }
    }
    out.extend(nonconst.into_iter().filter(|r| r.cases > 0));

    let mut reject = CheckReport::new("reality condition rejects h+z = ac*, h-z = 0");
    match levi_civita(&reality_violating_metric(), &LCParams::default(), Side::Left) {
        Err(ConnectionError::Reality { .. }) => reject.pass_case(),
        Ok(_) => reject.fail_case(Failure::new("levi_civita", json!("accepted"), json!("rejected"))),
        Err(e) => reject.fail_case(Failure::new("levi_civita", json!(e.to_string()), json!("reality residual"))),
    }
    out.push(reject);
    out.extend(user_levi_civita(cfg, false));
    out
}

fn torsion(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut rng = sample::rng(cfg.seed ^ 0x7a);
    let mut out = Vec::new();
    for side in Side::BOTH {
        let mut lowered = CheckReport::new(format!("Levi-Civita torsion, lowered form ({})", side.name()));
        let mut direct = CheckReport::new(format!("Levi-Civita torsion, Christoffel form ({})", side.name()));
        let mut neg = CheckReport::new(format!("torsion is detected ({})", side.name()));
        let mut metrics = vec![("delta".to_string(), HermitianMetric::delta(3), LCParams::default())];
        for k in 0..5 {
            let m = generic_constant_metric(&mut rng, 3);
            metrics.push((format!("sample {k}"), m, sample_lc_params(&mut rng)));
        }
        for (tag, metric, params) in &metrics {
            match levi_civita(metric, params, side) {
                Ok(conn) => {
                    absorb_result(&mut lowered, tag, check_torsion_free(&conn));
                    absorb_result(&mut direct, tag, check_torsion_free_christoffel(&conn));
                    let (bad, label) = random_perturbation(&mut rng, &conn, true);
                    record_detected(&mut neg, &format!("{tag}, {label}"), check_torsion_free_christoffel(&bad));
                }
                Err(e) => lowered.fail_case(Failure::new(tag.clone(), json!(e.to_string()), Value::Null)),
            }
        }
        let zero: [Matrix; 3] = std::array::from_fn(|_| vec![vec![Element::zero(); 3]; 3]);
        let conn = Connection::new(SigmaModule::one_forms(side), HermitianMetric::delta(3), zero)
            .expect("shapes match");
        record_detected(&mut neg, "zero symbols over delta", check_torsion_free(&conn));
        out.extend([lowered, direct, neg]);
    }
    let mut nonconst = CheckReport::new("Levi-Civita torsion, non-constant metrics (left)");
    for (label, metric) in nonconstant_test_metrics() {
        match levi_civita(&metric, &LCParams::default(), Side::Left) {
            Ok(conn) => absorb_result(&mut nonconst, label, check_torsion_free(&conn)),
            Err(e) => nonconst.fail_case(Failure::new(label, json!(e.to_string()), Value::Null)),
        }
    }
    out.push(nonconst);
    out.extend(user_levi_civita(cfg, true));
    out
}

fn podles_rvf(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut rvf = CheckReport::new("right field relation");
    for idx in basis_indices(cfg.max_degree, cfg.max_degree) {
        rvf.absorb(podles::check_rvf_relation(idx));
    }
    vec![podles::check_y_table(), rvf, podles::check_left_action_leaves_s2()]
}

fn podles_exd(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut v = CheckReport::new("V-form of the differential");
    let mut left = CheckReport::new("left-action dB expansion");
    for idx in basis_indices(cfg.max_degree, cfg.max_degree) {
        v.absorb(podles::check_v_differential(idx));
        left.absorb(podles::check_left_db_expansion(idx));
    }
    vec![podles::check_db_forms(), v, left]
}

/// A seeded element of S²_q: a short combination of words in `B₀, B₊, B₋`.
pub fn sample_s2_element(rng: &mut ChaCha8Rng) -> Element {
    let gens = [Element::one(), podles::b0(), podles::b_plus(), podles::b_minus()];
    let mut out = Element::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let x = gens.choose(rng).expect("nonempty");
        let y = gens.choose(rng).expect("nonempty");
        out.add_scaled(&(x * y), &sample::scalar(rng));
    }
    out
}

fn projectors(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut rng = sample::rng(cfg.seed);
    let range = cfg.bundle_range as i64;
    let mut build = CheckReport::new("projectors: partition of unity, idempotence, degree 0");
    let mut eigen = CheckReport::new("projectors: K-eigenvalues");
    let mut tilde = CheckReport::new("projectors: lowered delta metric");
    let mut kernel = CheckReport::new("projectors: kernel maps to zero");
    for n in -range..=range {
        let tag = format!("n = {n}");
        match podles::build_projectors(n) {
            Ok(p) => {
                build.pass_case();
                let samples: Vec<Vec<Element>> =
                    (0..3).map(|_| (0..p.dim()).map(|_| sample_s2_element(&mut rng)).collect()).collect();
                absorb_result(&mut eigen, &tag, podles::sigma_eigen_check(n));
                absorb_result(&mut tilde, &tag, podles::check_h_tilde(n, &HermitianMetric::delta(p.dim())));
                absorb_result(&mut kernel, &tag, podles::check_kernel_lemma(n, &samples));
            }
            Err(e) => build.fail_case(Failure::new(tag, json!(e.to_string()), Value::Null)),
        }
    }
    vec![build, eigen, tilde, kernel]
}

fn bundle_connections(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let range = cfg.bundle_range.min(2) as i64;
    let ns: Vec<i64> = (1..=range).flat_map(|n| [n, -n]).collect();
    let mut orth = CheckReport::new("bundle projectors orthogonal for delta");
    let mut compat = CheckReport::new("projected connection compatibility, delta (left)");
    let mut table = CheckReport::new("projected connection Christoffel table, delta (left)");
    for &n in &ns {
        let tag = format!("n = {n}");
        let dim = n.unsigned_abs() as usize + 1;
        absorb_result(&mut orth, &tag, podles::check_orthogonality(n, &identity_matrix(dim)));
        match podles::bundle_connection_delta(n, Side::Left) {
            Ok(b) => {
                absorb_result(&mut compat, &tag, b.check_compatibility());
                absorb_result(&mut table, &tag, b.check_christoffel());
            }
            Err(e) => compat.fail_case(Failure::new(tag, json!(e.to_string()), Value::Null)),
        }
    }
    vec![orth, compat, table]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!(parse_suites(&["torsion", "all"]).unwrap().len(), 14);
    }

    #[test]
    fn empty_report_is_a_json_object() {
        let cfg = SuiteConfig { suites: vec![], ..SuiteConfig::default() };
        let r = run_suite(&cfg);
        let mut buf = Vec::new();
        emit_report(&r, Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert!(v.is_object());
        assert_eq!(v["totals"]["cases"], 0);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn degree_zero_sweeps_pass() {
        let cfg = SuiteConfig {
            suites: vec![Suite::Algebra, Suite::Leibniz, Suite::Commutation, Suite::Calculus],
            max_degree: 0,
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg);
        assert!(r.passed(), "{}", r.to_text());
    }
}
