use std::fmt;

use thiserror::Error;

/// A single failed validation condition of an urn specification.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Shape(String),
    NotBalanced { row_sums: Vec<f64> },
    NonPositiveBalance { m: f64 },
    NotTenable { color: usize, reason: String },
    InitialOutsideOrthant { color: usize, value: f64 },
    InitialZero,
    Reducible { unreachable: Vec<(usize, usize)> },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::Shape(_) => "Shape",
            Violation::NotBalanced { .. } | Violation::NonPositiveBalance { .. } => "NotBalanced",
            Violation::NotTenable { .. } => "NotTenable",
            Violation::InitialOutsideOrthant { .. } | Violation::InitialZero => "InvalidInitial",
            Violation::Reducible { .. } => "Reducible",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(msg) => write!(f, "malformed spec: {msg}"),
            Violation::NotBalanced { row_sums } => write!(f, "row sums differ: {row_sums:?}"),
            Violation::NonPositiveBalance { m } => write!(f, "balance constant {m} is not positive"),
            Violation::NotTenable { color, reason } => {
                write!(f, "not tenable at color {}: {reason}", color + 1)
            }
            Violation::InitialOutsideOrthant { color, value } => {
                write!(f, "initial mass of color {} is negative ({value})", color + 1)
            }
            Violation::InitialZero => write!(f, "initial composition is zero"),
            Violation::Reducible { unreachable } => {
                let (i, j) = unreachable[0];
                write!(f, "replacement matrix is reducible (color {} cannot reach color {})", i + 1, j + 1)
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid urn: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),

    #[error("composition left the positive orthant at step {step} (color {color}, mass {value})")]
    LeftOrthant { step: usize, color: usize, value: f64 },

    #[error("{what}: budget exceeded ({needed} > {budget})")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u128 },

    #[error("ill-conditioned Jordan structure at eigenvalue {eigenvalue}: ambiguous singular values {singular_values:?}")]
    IllConditioned { eigenvalue: String, singular_values: Vec<f64> },

    #[error("Phi-stability violated: Phi(u^{column}) has a term at {leak} outside the basis")]
    StabilityViolation { column: String, leak: String },

    #[error("resonance ambiguity between diagonal values: {pairs:?}")]
    ResonanceAmbiguity { pairs: Vec<(String, String, f64)> },

    #[error("multi-index {gamma} is not supported on the Perron index and block {block}")]
    UnsupportedSupport { gamma: String, block: String },

    #[error("urn is {class}: this analysis requires a small urn")]
    NotSmall { class: String },

    #[error("degenerate direction: asymptotic variance w'Sw = {gamma:e}")]
    DegenerateDirection { gamma: f64 },

    #[error("exact arithmetic unavailable: {0}")]
    ExactUnavailable(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn violations(&self) -> &[Violation] {
        match self {
            Error::Invalid(v) => v,
            _ => &[],
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
