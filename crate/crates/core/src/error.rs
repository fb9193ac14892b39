//! Error and violation types shared across the crate.
//!
//! Validation routines return lists of [`Violation`]s so a caller sees
//! every failed axiom at once; hard failures (bad references, wrong
//! shapes, exhausted iteration budgets) surface as [`Error`] variants.
//! Each variant carries a stable machine-readable code in its message,
//! which the CLI prints verbatim and maps to exit status 1.

use std::fmt;

use thiserror::Error;

/// Stable codes for structural-axiom violations.
pub mod codes {
    pub const ASSOCIATIVITY: &str = "ASSOCIATIVITY";
    pub const INVERSE_MISMATCH: &str = "INVERSE_MISMATCH";
    pub const UNIT_ENDPOINTS: &str = "UNIT_ENDPOINTS";
    pub const UNIT_IDENTITY: &str = "UNIT_IDENTITY";
    pub const ENDPOINT_NOT_UNIT: &str = "ENDPOINT_NOT_UNIT";
    pub const PRODUCT_DOMAIN: &str = "PRODUCT_DOMAIN";
    pub const PRODUCT_ENDPOINTS: &str = "PRODUCT_ENDPOINTS";
    pub const HOM_STRUCTURE: &str = "HOM_STRUCTURE";
    pub const UNIT_NONZERO: &str = "UNIT_NONZERO";
    pub const NEGATIVE_LENGTH: &str = "NEGATIVE_LENGTH";
    pub const INVERSION_SYMMETRY: &str = "INVERSION_SYMMETRY";
    pub const SUBADDITIVITY: &str = "SUBADDITIVITY";
    pub const NOT_UNIMODULAR: &str = "NOT_UNIMODULAR";
    pub const NOT_NORMALIZED: &str = "NOT_NORMALIZED";
    pub const COCYCLE_IDENTITY: &str = "COCYCLE_IDENTITY";
    pub const METRIC_DIAGONAL: &str = "METRIC_DIAGONAL";
    pub const METRIC_SYMMETRY: &str = "METRIC_SYMMETRY";
    pub const METRIC_TRIANGLE: &str = "METRIC_TRIANGLE";
    pub const METRIC_NEGATIVE: &str = "METRIC_NEGATIVE";
}

/// One failed structural check, with the ids that witness the failure.
///
/// `witness` holds arrow ids (or point indices, for metric checks) in
/// the order the check touched them, so a reader can replay the failing
/// instance by hand.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: &'static str,
    pub witness: Vec<u32>,
    pub detail: String,
}

impl Violation {
    pub fn new(code: &'static str, witness: Vec<u32>, detail: impl Into<String>) -> Self {
        Violation {
            code,
            witness,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}: {}", self.code, self.witness, self.detail)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("PARSE_ERROR: {0}")]
    Parse(String),

    #[error("SCHEMA_ERROR: {0}")]
    Schema(String),

    #[error("VALIDATION_ERROR: {subject}: {} violation(s), first: {}", violations.len(), first(violations))]
    Validation {
        subject: &'static str,
        violations: Vec<Violation>,
    },

    #[error("DANGLING_ID: {0}")]
    DanglingId(String),

    #[error("NOT_A_GROUP: {0}")]
    NotAGroup(String),

    #[error("NOT_AN_ACTION: {0}")]
    NotAnAction(String),

    #[error("NOT_SURJECTIVE: {0}")]
    NotSurjective(String),

    #[error("NOT_GENERATING: {} arrow(s) unreachable, first ids {:?}", .0.len(), preview(.0))]
    NotGenerating(Vec<u32>),

    #[error("NOT_REGULAR: {0}")]
    NotRegular(String),

    #[error("NOT_A_UNIT: arrow {0} is not a unit")]
    NotAUnit(u32),

    #[error("NOT_COMPOSABLE: src(a) != rng(b) for arrows a={0}, b={1}")]
    NotComposable(u32, u32),

    #[error("GROUPOID_MISMATCH: {0}")]
    GroupoidMismatch(String),

    #[error("NEGATIVE_T: t = {0} (weight exponents must be nonnegative)")]
    NegativeT(f64),

    #[error("ZERO_FUNCTION: the zero function has no finite RD ratio")]
    ZeroFunction,

    #[error("EMPTY_FAMILY: {0}")]
    EmptyFamily(String),

    #[error("EMPTY_BALL: unit {unit}, radius {radius}")]
    EmptyBall { unit: u32, radius: f64 },

    #[error("RANGE_NOT_INJECTIVE: arrows {0} and {1} share a range unit")]
    RangeNotInjective(u32, u32),

    #[error("SUPPORT_LEAK: nonzero coefficient on arrow {0} outside the allowed support")]
    SupportLeak(u32),

    #[error("BAD_CONSTANTS: {0}")]
    BadConstants(String),

    #[error("H_NOT_FINITE: {0}")]
    HNotFinite(String),

    #[error(
        "NO_CONVERGENCE: best bound {best}, residual {residual} after {iterations} iterations"
    )]
    NoConvergence {
        best: f64,
        residual: f64,
        iterations: u32,
    },

    #[error("DEGENERATE_FIT: {0}")]
    DegenerateFit(String),

    #[error("DISCONNECTED: {0}")]
    Disconnected(String),

    #[error("IO: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(subject: &'static str, violations: Vec<Violation>) -> Self {
        Error::Validation {
            subject,
            violations,
        }
    }
}

fn first(violations: &[Violation]) -> String {
    violations
        .first()
        .map(|v| v.to_string())
        .unwrap_or_else(|| "(none)".into())
}

fn preview(ids: &[u32]) -> Vec<u32> {
    ids.iter().take(8).copied().collect()
}

pub type Result<T> = std::result::Result<T, Error>;
