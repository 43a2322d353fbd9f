//! Library-wide error type.

use thiserror::Error;

/// Errors produced by construction, validation and solving.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector or mask has the wrong length for the space it is used with.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A field of a constructed value failed validation. `index` points at the
    /// offending entry when there is one.
    #[error("invalid {field}{}: {message}", index.map(|i| format!(" at index {i}")).unwrap_or_default())]
    Validation {
        field: &'static str,
        index: Option<usize>,
        message: String,
    },

    /// A numeric parameter is outside its admissible range.
    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// Two parts of a would-be partition intersect.
    #[error("partition overlap: parts {first} and {second} share block {block}")]
    PartitionOverlap {
        first: usize,
        second: usize,
        block: usize,
    },

    /// The parts of a would-be partition do not join to the full condition.
    #[error("partition does not cover: block {block} is missing")]
    PartitionCover { block: usize },

    /// An essential supremum/infimum of the empty family was requested.
    #[error("essential supremum/infimum of an empty family")]
    EmptyFamily,

    /// A stable-hull enumeration would exceed the configured cap.
    #[error("stable hull enumeration needs {required} selections, cap is {cap}")]
    EnumerationCap { required: u128, cap: u128 },

    /// A seminorm id was not found in the registry.
    #[error("unknown seminorm id `{0}`")]
    UnknownSeminorm(String),

    /// A named scenario entry does not exist.
    #[error("unknown {kind} `{name}`; available: {}", available.join(", "))]
    UnknownName {
        kind: &'static str,
        name: String,
        available: Vec<String>,
    },

    /// An iterative solver stopped without certifying its tolerance.
    #[error("solver did not converge on block {block}: residual {residual:.3e}")]
    SolverNonConvergence { block: usize, residual: f64 },

    /// A penalty is identically +inf on a block, so the representation
    /// problem has no feasible dual weight.
    #[error("penalty is +inf everywhere on block {block}")]
    InfeasiblePenalty { block: usize },

    /// An H-represented block set has no feasible point.
    #[error("infeasible constraint system on block {block}")]
    InfeasibleBlock { block: usize },

    /// A block objective is not proper (no finite value anywhere).
    #[error("improper objective on block {block}: {message}")]
    Improper { block: usize, message: String },

    /// Scenario file could not be parsed.
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    /// Scenario file could not be read.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
