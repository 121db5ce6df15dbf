use thiserror::Error;

use crate::quiver::VertexId;

/// Structural problems with a quiver, its partition, or a dimension vector.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("vertex {0} is out of range 1..={1}")]
    VertexOutOfRange(VertexId, usize),
    #[error("partition: vertex {0} lies in more than one cell")]
    VertexInSeveralCells(VertexId),
    #[error("partition: vertex {0} lies in no cell")]
    VertexInNoCell(VertexId),
    #[error("partition: pair ({0}, {0}) must consist of distinct vertices")]
    PairNotDistinct(VertexId),
    #[error("arrow `{0}`: both endpoints carry dual spaces")]
    BothEndpointsStarred(String),
    #[error("duplicate arrow id `{0}`")]
    DuplicateArrow(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("dimension vector has {got} entries, quiver has {expected} vertices")]
    DimensionLength { expected: usize, got: usize },
    #[error("compatibility: pair ({head}, {tail}) has d={d_head} and d={d_tail}")]
    IncompatibleDims { head: VertexId, tail: VertexId, d_head: usize, d_tail: usize },
    #[error("nonvacuity: degrees into starred vertices sum to {into_dual}, out of them to {out_of_dual}")]
    Vacuous { into_dual: usize, out_of_dual: usize },
    #[error("multidegree has {got} entries, quiver has {expected} arrows")]
    MultidegreeLength { expected: usize, got: usize },
    #[error("arrow order must list every arrow exactly once with classes A1 < A2 < A3")]
    BadArrowOrder,
    #[error("malformed quiver description: {0}")]
    Parse(String),
}

/// Failures of exact linear algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("coefficient {0} is not defined in characteristic {1}")]
    DenominatorVanishes(String, u64),
    #[error("{0} is not a prime below 2^63")]
    NotPrime(u64),
    #[error("rejection sampling exhausted after {0} attempts")]
    Exhausted(usize),
    #[error("symplectic construction needs an even dimension, got {0}")]
    OddSymplectic(usize),
    #[error("invalid field spec `{0}` (expected `q` or `fp:<prime>`)")]
    FieldSpec(String),
}

/// Failures in permutation handling and the trace map.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("permutation: {0}")]
    BadPermutation(String),
    #[error("permutation acts on {got} points, expected {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("permutation does not satisfy the admissibility conditions")]
    NotAdmissible,
    #[error("contracting rules revisit symbol {0}")]
    Escape(usize),
    #[error("passive set must lie in the first class interval, {0} does not")]
    PassiveOutsideFirstClass(usize),
    #[error("block joining stalled at symbol {0}")]
    JoinDeadlock(usize),
    #[error("word does not give a closed path: {0}")]
    NotClosed(String),
    #[error("degree {r} exceeds the configured cap {cap}")]
    OverCap { r: usize, cap: usize },
    #[error("need 2s <= r, got r={r}, s={s}")]
    BadDegrees { r: usize, s: usize },
    #[error("layout: {0}")]
    Layout(String),
    #[error("substitution: {0}")]
    Substitution(String),
    #[error("malformed word: {0}")]
    Parse(String),
}

/// Crate-wide error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("specialization: {0}")]
    Specialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
