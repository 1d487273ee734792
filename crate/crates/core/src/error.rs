//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by field construction, design verification, construction,
/// state assembly and steering operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("no built-in modulus for field order {0}; supply one with Field::with_modulus")]
    UnsupportedOrder(u32),
    #[error("polynomial is not irreducible over GF({p})")]
    ReducibleModulus { p: u32 },
    #[error("label {label} out of range for GF({q})")]
    LabelOutOfRange { label: u32, q: u32 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("symbol count {d} does not divide column count {n}")]
    DivisibilityViolation { d: u32, n: usize },
    #[error("search exhausted {nodes} nodes without finding a scheme")]
    NotFoundWithinBudget { nodes: u64 },
    #[error("requested size {requested} exceeds cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("k = {k} out of range for {n} columns")]
    KOutOfRange { k: usize, n: usize },
    #[error("column index {index} out of range for {n} columns")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("endurance input must pass strength and irredundancy at k: {0}")]
    NotIrredundantInput(String),

    #[error("construction 2 needs a square scheme, got {s}x{n}")]
    ShapeNotSquare { s: usize, n: usize },
    #[error("construction 2 rejects N = 2 (three columns are too few for irredundancy)")]
    NEquals2Rejected,
    #[error("{0} is not prime")]
    NonPrimeFactor(u32),

    #[error("duplicate row {0} in array-to-state conversion")]
    DuplicateRow(usize),
    #[error("phase vector has length {got}, expected {expected}")]
    PhaseLengthMismatch { expected: usize, got: usize },
    #[error("subsystem subset is empty")]
    EmptySubset,
    #[error("subsystem subset must be proper")]
    FullSubset,
    #[error("phase search space {requested} exceeds cap {cap}")]
    SearchSpaceCap { requested: u128, cap: u128 },

    #[error("noise level {0} outside [0, 1]")]
    InvalidNoiseLevel(f64),
    #[error("total dimension {dim} exceeds dense cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("conditioned outcome has probability below 1e-14")]
    ZeroProbabilityOutcome,
    #[error("negativity needs a bipartite matrix, got {parts} parts")]
    NotBipartite { parts: usize },
    #[error("vector is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
