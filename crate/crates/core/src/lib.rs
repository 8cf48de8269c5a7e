//! Mutual-neighbor relations of finite digraphs and the bound `|T(Γ)| ≥ |E|`.
//!
//! For a digraph `Γ = (V, E)` without parallel edges, `T(Γ) = E∘Eᵒᵖ ∪ Eᵒᵖ∘E`
//! is the set of ordered vertex pairs sharing an in-neighbor or an
//! out-neighbor. This crate computes `T`, checks the bound by direct count
//! and by a replayable induction [`certificate`], and applies it to
//! undirected graphs, nonnegative matrices and the component dimensions of
//! simple group gradings.
//!
//! Matrix routines are generic over the entry type ([`scalar::Entry`]); the
//! aliases below cover the common cases.

pub mod certificate;
pub mod corollaries;
pub mod digraph;
pub mod error;
pub mod gradings;
pub mod groups;
pub mod relation;
pub mod scalar;

pub use certificate::{
    build_certificate, check_graph, exhaustive_verify, oracle_check, replay_certificate, verify_certificate, CertStep,
    Certificate, OracleResult, StepKind, VerifyReport,
};
pub use corollaries::{NonnegMatrix, UndirectedGraph};
pub use digraph::{DegreeProfile, Digraph};
pub use error::{CertificateError, GradingError, GraphError, GroupError, MatrixError, VerifyError};
pub use gradings::{enumerate_data, DatumJson, DimensionTable, GradingDatum};
pub use groups::{builtin_group, FiniteGroup, Subgroup};
pub use relation::PairRelation;
pub use scalar::Entry;

/// Nonnegative matrix with `f64` entries; the CLI's input type.
pub type Matrix = NonnegMatrix<f64>;
pub type MatrixF32 = NonnegMatrix<f32>;
/// Exact rational entries.
pub type RationalMatrix = NonnegMatrix<num_rational::Rational64>;
/// Nonnegative integer entries.
pub type CountMatrix = NonnegMatrix<u64>;
