//! Adaptive test selection for decision making.
//!
//! Given hypotheses with a prior, tests whose outcomes the hypotheses
//! determine, and overlapping decision regions, this crate selects tests
//! adaptively until every hypothesis consistent with the answers lies in a
//! single region — at near-minimal expected query cost.
//!
//! The core policy, hyperedge cutting (HEC), reduces the problem to cutting
//! the hyperedges of a splitting hypergraph over subregions; the edge mass is
//! computed in polynomial time with complete homogeneous symmetric
//! polynomials. Classical baselines (generalized binary search, equivalence
//! class edge cutting, myopic value of information) are implemented on the
//! same machinery, along with brute-force oracles that certify the fast path.
//!
//! Modules, bottom to top:
//!
//! * [`arith`] — scalar arithmetic: `f64` or exact rationals.
//! * [`instance`] — problem instances, evidence, version spaces.
//! * [`hypergraph`] — subregions, hyperedge cardinality, shared-region sets.
//! * [`weights`] — symmetric-polynomial edge masses and the HEC objective.
//! * [`policies`] — greedy selection, baselines, policy execution.
//! * [`oracle`] — independent brute-force checks and property validators.
//! * [`io`] — instance files, result tables, synthetic generators.

pub mod arith;
pub mod bitset;
mod error;
pub mod hypergraph;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod policies;
pub mod weights;

pub use arith::Mass;
pub use error::{Error, Result};
pub use hypergraph::SubregionIndex;
pub use instance::{
    apply_test, consistent_hypotheses, is_solved, posterior, validate_instance, CoverageMode,
    Evidence, HypothesisId, InstanceParts, OutcomeId, ProblemInstance, RegionId, TestId,
    ValidationReport, VersionSpace,
};
pub use io::{
    generate_clustered, generate_clustered_from_embeddings, generate_localization_2d,
    load_embeddings, load_instance, parse_instance_document, render_instance_document,
    save_instance, write_results, ClusteredParams, DocumentMetadata, InstanceDocument,
    LocalizationParams, ResultRow, RESULTS_HEADER,
};
pub use oracle::{
    brute_force_edge_weight, check_adaptive_properties, check_theorem1, check_theorem3,
    check_weight_equivalence, optimal_policy_cost, random_instance, Counterexample, OracleReport,
};
pub use policies::{
    expected_cost, make_baseline, make_baseline_with_index, marginal_gain, run_policy,
    select_test_greedy, LazyState, Policy, PolicyEvaluation, PolicyKind, PolicyRunner,
    PolicyTrace, PreparedPolicy, Termination, TraceStep,
};
pub use weights::{hyperedge_weight, objective_f};

// Each guide chapter is attached as documentation here so `cargo test` runs
// its code blocks; the book cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/problem.md")]
    mod problem {}
    #[doc = include_str!("../../../book/src/hypergraph.md")]
    mod hypergraph {}
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/policies.md")]
    mod policies {}
    #[doc = include_str!("../../../book/src/files.md")]
    mod files {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
}
