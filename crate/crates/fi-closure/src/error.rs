//! Crate-wide error type.
//!
//! One enum covers the whole pipeline so the CLI can map variants onto its
//! exit codes: input/validation problems, membership violations (which carry
//! the offending minor), and internal invariant failures that should never
//! fire on correct code paths.

use crate::zdl::MinorWitness;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot parse {input:?} as an exact rational")]
    BadRational { input: String },

    #[error("injection images must be distinct and within 1..={codomain}, got {images:?}")]
    BadInjection { images: Vec<usize>, codomain: usize },

    #[error("cannot compose: first map has codomain {mid_first} but second has domain {mid_second}")]
    CompositionMismatch { mid_first: usize, mid_second: usize },

    #[error("index {index} is outside the domain 1..={domain} of the injection")]
    InjectionDomain { index: usize, domain: usize },

    #[error("variable index {index:?} is outside the acting injection's domain 1..={domain}")]
    ActionOutOfDomain { index: Vec<usize>, domain: usize },

    #[error("polynomial kind mismatch: {left} vs {right}")]
    KindMismatch { left: String, right: String },

    #[error("variable {var} does not match polynomial kind {kind}")]
    VarKindMismatch { var: String, kind: String },

    #[error("tensor variable index {index:?} has repeated entries")]
    RepeatedIndex { index: Vec<usize> },

    #[error("matrix variable position ({row},{col}) is outside rows 1..={rows}, cols 1..={cols}")]
    MatrixVarRange { row: usize, col: usize, rows: usize, cols: usize },

    #[error("no value assigned to variable {var}")]
    MissingVariable { var: String },

    #[error("exponent must be positive")]
    ZeroExponent,

    #[error("tuple {tuple:?} is invalid for order {d}, width {width}: {reason}")]
    BadTuple { tuple: Vec<usize>, d: usize, width: usize, reason: String },

    #[error("duplicate entry for tuple {tuple:?}")]
    DuplicateEntry { tuple: Vec<usize> },

    #[error("strict tensor requires all {expected} off-diagonal entries, got {got}")]
    MissingEntries { expected: usize, got: usize },

    #[error("axis {axis} is outside 1..={d}")]
    AxisOutOfRange { axis: usize, d: usize },

    #[error("rows and columns must select a square off-diagonal block: {reason}")]
    BadMinorSelection { reason: String },

    #[error("selection is not off-diagonal: column {col} occurs in row {row:?}")]
    OffDiagonalityViolated { row: Vec<usize>, col: usize },

    #[error("dense materialization of {entries} entries exceeds the cap of {cap}")]
    DenseCapExceeded { entries: u128, cap: u128 },

    #[error("embedding position mismatch: {reason}")]
    EmbeddingMismatch { reason: String },

    #[error("matrix dimensions do not fit this operation: {reason}")]
    BadMatrix { reason: String },

    #[error("decomposition shape invalid: {reason}")]
    BadDecomposition { reason: String },

    #[error("map component {index} invalid: {reason}")]
    BadComponent { index: usize, reason: String },

    #[error("point has {point_k} rows but the map expects {map_k}")]
    RowCountMismatch { point_k: usize, map_k: usize },

    #[error("point width {width} is smaller than component width {component_width}")]
    WidthTooSmall { width: usize, component_width: usize },

    #[error("strict witness search requires l >= 1, got {l}")]
    WitnessSizeZero { l: usize },

    #[error("tensor is not in the rank-{l} locus; first violated minor: {witness}")]
    NotInVariety { l: usize, witness: MinorWitness },

    #[error("component {index}: {source}")]
    InComponent { index: usize, source: Box<Error> },

    #[error("internal invariant violated: {0}")]
    AlgorithmInvariant(String),

    #[error("invalid JSON input: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wrap an error with the 1-based index of the product component it arose in.
    pub fn in_component(self, index: usize) -> Error {
        Error::InComponent { index, source: Box::new(self) }
    }
}
