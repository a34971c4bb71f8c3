//! Exact symbolic engine for the quantum 3-sphere S³_q, its U_q(su₂) actions,
//! twisted derivations, first-order calculus, connections on σ-modules, and
//! the Podleś line bundles over S²_q.

pub mod algebra;
pub mod calculus;
pub mod connections;
pub mod derivations;
pub mod field;
pub mod harness;
pub mod json;
pub mod podles;
pub mod poly;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod tables;
pub mod uq;

/// Coefficient field ℚ(i)(q^{1/2}) of the engine.
pub type Scalar = scalar::RatFunc<field::GaussianRational>;

pub use algebra::{Element, Letter, Monomial};
pub use report::{CheckReport, Failure};
pub use uq::{Side, UqElement, UqGen};
