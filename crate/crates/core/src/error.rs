use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("pair ({0}, {1}) listed more than once")]
    DuplicatePair(usize, usize),
    #[error("relations have different vertex counts ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("operation requires a loop-free digraph, found loop at {0}")]
    HasLoop(usize),
    #[error("k must be 1 or 2, got {0}")]
    BadWalkLength(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Failures while constructing a certificate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("no reduction rule applies to the current graph {graph}")]
    StepSelectionFailed { graph: String },
    #[error("step {step} ({kind}) attributes {attributed} pairs but removes {removed} edges; input graph: {graph}")]
    SoundnessViolation {
        step: usize,
        kind: String,
        attributed: usize,
        removed: usize,
        graph: String,
    },
}

/// Failures while replaying a certificate against a graph.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("malformed certificate at step {step:?}: {reason}")]
    MalformedCertificate { step: Option<usize>, reason: String },
    #[error("step {step} is unsound: {reason}")]
    StepUnsound { step: usize, reason: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("table is not square: row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("empty table")]
    Empty,
    #[error("entry {value} at ({row}, {col}) is not an element index")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("not a Latin square: value {value} repeats in {line} {index}")]
    NotLatinSquare {
        line: &'static str,
        index: usize,
        value: usize,
    },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("element {0} has no two-sided inverse")]
    MissingInverse(usize),
    #[error("expected {expected} element names, got {got}")]
    NameCount { expected: usize, got: usize },
    #[error("cannot parse group spec {spec:?}: {reason}")]
    ParseError { spec: String, reason: String },
    #[error("group of order {order} exceeds the limit {limit}")]
    TooLarge { order: usize, limit: usize },
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("element index {index} out of range for order {order}")]
    ElementOutOfRange { index: usize, order: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradingError {
    #[error("grading tuple must be non-empty")]
    EmptyTuple,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("enumeration would produce {count} data, above the budget {budget}")]
    TooLarge { count: u128, budget: u128 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("negative entry {value} at row {row}, column {col}")]
    Negative { row: usize, col: usize, value: String },
    #[error("entry {value} at row {row}, column {col} is nonzero but below {floor}; support is ambiguous")]
    Ambiguous {
        row: usize,
        col: usize,
        value: String,
        floor: String,
    },
    #[error("parse error: {0}")]
    Parse(String),
}
