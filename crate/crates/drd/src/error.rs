//! Crate-wide error type.

use thiserror::Error;

use crate::instance::{HypothesisId, OutcomeId, TestId};

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Instance construction or load rejected by validation.
    #[error("invalid instance: {}", errors.join("; "))]
    InvalidInstance { errors: Vec<String> },

    /// Evidence rules out every hypothesis.
    #[error("contradictory evidence: no hypothesis is consistent")]
    ContradictoryEvidence,

    /// A test id outside the instance's test list.
    #[error("unknown test id {0}")]
    UnknownTest(TestId),

    /// A hypothesis id outside the instance's hypothesis list.
    #[error("unknown hypothesis id {0}")]
    UnknownHypothesis(HypothesisId),

    /// An outcome id at or above the test's arity.
    #[error("outcome {outcome} out of range for test {test} (arity {arity})")]
    OutcomeOutOfRange {
        test: TestId,
        outcome: OutcomeId,
        arity: u32,
    },

    /// The same test answered twice.
    #[error("test {0} already answered")]
    DuplicateTest(TestId),

    /// A weight that cannot be embedded into the requested arithmetic.
    #[error("weight {0} is not representable (must be finite)")]
    UnrepresentableWeight(f64),

    /// Multiset passed to a cardinality-k predicate has the wrong size.
    #[error("multiset has cardinality {got}, index requires {expected}")]
    WrongCardinality { got: usize, expected: usize },

    /// Requested hyperedge cardinality below the instance's formula value.
    #[error("cardinality override {requested} is below the instance's required value {formula}")]
    CardinalityBelowFormula { requested: usize, formula: usize },

    /// A weight or gain came out negative beyond tolerance; arithmetic bug.
    #[error("negative mass {value} beyond tolerance in {context}")]
    NegativeMass { value: f64, context: String },

    /// The greedy rule stopped early or kept going against its contract.
    #[error("selection contract violated: {0}")]
    InconsistentSelection(String),

    /// No policy can finish from here with the remaining tests.
    #[error("infeasible under test set: {0}")]
    Infeasible(String),

    /// Brute-force oracle asked to run outside its safe limits.
    #[error("oracle limits exceeded: {0}")]
    OracleLimits(String),

    /// Malformed instance or embedding file.
    #[error("parse error at byte {offset} (line {line}, column {column}): {message}")]
    Parse {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },

    /// Instance file written by an incompatible version.
    #[error("unsupported schema version {got} (this build reads {expected})")]
    SchemaVersion { got: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
