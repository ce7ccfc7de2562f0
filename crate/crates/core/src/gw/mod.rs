//! Gromov-Witten invariants of `S²` and `(S²)ᵏ` from the Kontsevich-Manin
//! axioms, formal expressions in them, and integer feasibility of the
//! equations those expressions produce.

mod expr;
mod product;
mod script;
mod solve;
mod sphere;

use thiserror::Error;

use crate::ring::RingError;

pub use expr::{Atom, GWExpression, Monomial};
pub use product::{eval_sphere_product, product_gw, FactorValue, GWSymbol, Target};
pub use script::{parse_expression, parse_script, EquationScript, ScriptError};
pub use solve::{solve_unknowns, verify_certificate, Certificate, Domain, Verdict};
pub use sphere::{
    applicable_rules, check_confluence, eval_sphere, eval_sphere_full, evaluate_with,
    lift_unstable, rewrite_step, sphere_ring, Cap, ConfluenceReport, Insertion, PriorityStrategy,
    RandomStrategy, RewriteStep, RuleApp, RuleKind, SphereEvaluator, SphereSymbol, Strategy,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GwError {
    #[error("(g, n) = ({genus}, {points}) is unstable: 2g - 2 + n must be positive")]
    Unstable { genus: u32, points: u32 },
    #[error("(g, n) = ({genus}, {points}) is stable; the unstable lift does not apply")]
    AlreadyStable { genus: u32, points: u32 },
    #[error("{0} insertions given but n = {1}")]
    InsertionCount(usize, u32),
    #[error("insertion `{0}` does not live in the cohomology of S2")]
    InsertionOutsideRing(String),
    #[error("no axiom reduces {0}")]
    Unsupported(String),
    #[error("divisor class pairs to zero with the curve class")]
    ZeroPairing,
    #[error("divisor class must be homogeneous of degree 2, got `{0}`")]
    DivisorDegree(String),
    #[error("factor invariants disagree on (g, n, cap): {0}")]
    MismatchedFactors(String),
    #[error("empty product of factor invariants")]
    EmptyProduct,
    #[error("target ring {0} is not a product of spheres")]
    NotSphereProduct(String),
    #[error("{given} degrees given for {factors} sphere factors")]
    DegreeCount { given: usize, factors: usize },
    #[error("value {0} is not an integer where an integer is forced")]
    NotIntegral(String),
    #[error("variable `{0}` appears with exponent {1}; only products of distinct unknowns are supported")]
    Nonlinear(String, u32),
    #[error(transparent)]
    Ring(#[from] RingError),
}
