//! Error type shared across the library.
//!
//! Every fallible operation returns [`Result`]. Variants carry enough
//! context to report the offending input without re-deriving it.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All the ways validation, analysis, or simulation can fail.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A hyperedge with no nodes was supplied.
    #[error("hyperedge {index} is empty")]
    EmptyEdge {
        /// Position of the offending edge in the input list.
        index: usize,
    },

    /// Some node belongs to no hyperedge.
    #[error("node {node} is not covered by any hyperedge")]
    NotCovering {
        /// Smallest uncovered node.
        node: usize,
    },

    /// One hyperedge contains another (or a duplicate exists).
    #[error("hyperedge {inner:?} is contained in hyperedge {outer:?}")]
    NotSimple {
        /// The contained (or duplicated) edge, sorted.
        inner: Vec<usize>,
        /// The containing edge, sorted.
        outer: Vec<usize>,
    },

    /// The intersection graph of the hyperedges is disconnected.
    #[error("hypergraph is not connected: edges {component:?} share no node with the rest")]
    NotConnected {
        /// Edge indices of one proper connected component.
        component: Vec<usize>,
    },

    /// An input exceeds the size guards chosen for exhaustive analysis.
    #[error("input too large: {what} = {value} exceeds limit {limit}")]
    TooLarge {
        /// Which quantity blew the guard.
        what: &'static str,
        /// Observed value.
        value: usize,
        /// Configured limit.
        limit: usize,
    },

    /// An operation that requires all edges to share one size was given a
    /// non-uniform hypergraph.
    #[error("hypergraph is not uniform: edge sizes range from {min} to {max}")]
    NotUniform {
        /// Smallest edge size.
        min: usize,
        /// Largest edge size.
        max: usize,
    },

    /// Family or operation parameters are out of range or inconsistent.
    #[error("bad parameters: {0}")]
    BadParameters(String),

    /// A measure weight was zero or negative.
    #[error("weight for node {node} is not strictly positive")]
    NonPositiveWeight {
        /// Node whose weight is invalid (1-based).
        node: usize,
    },

    /// An empty weight vector was supplied.
    #[error("weight vector is empty")]
    EmptyVector,

    /// A matching policy was asked to choose from an empty candidate set.
    #[error("no matchable hyperedge is available for the arriving class")]
    NoCandidates,

    /// A state outside the admissible region was supplied.
    #[error("state is not admissible: hyperedge {edge:?} is fully present in the buffer")]
    InadmissibleState {
        /// An edge whose classes all have positive count.
        edge: Vec<usize>,
    },

    /// The hypergraph does not belong to the family an operation requires.
    #[error("hypergraph is not in the required family: {0}")]
    BadFamily(String),

    /// The quadratic-form witness ratio is outside the open interval (0, 1/3).
    #[error("alpha = {alpha} is outside the open interval (0, 1/3)")]
    AlphaOutOfRange {
        /// Offending value, rendered as text.
        alpha: String,
    },

    /// Finite differences of the drift disagree, so no single slope exists
    /// at the probed states.
    #[error(
        "drift is not linear near the probed states for coordinate {node}: \
         successive differences are {diffs:?}"
    )]
    NonLinearRegime {
        /// Coordinate whose slope was being measured (1-based node id).
        node: usize,
        /// The two successive finite differences, rendered as text.
        diffs: Vec<String>,
    },

    /// The truncated chain would have more states than the configured bound.
    #[error("truncated state space has more than {limit} states")]
    StateSpaceTooLarge {
        /// Configured bound on the number of states.
        limit: usize,
    },

    /// A buffer-order policy hit a multi-candidate branch in a counts-only
    /// enumeration, where the arrival-order information it needs is absent.
    #[error(
        "policy {policy} cannot be enumerated from counts alone: \
         a branch has {candidates} candidate hyperedges"
    )]
    PolicyNotEnumerable {
        /// Name of the policy.
        policy: &'static str,
        /// Number of candidates at the ambiguous branch.
        candidates: usize,
    },

    /// A conservation identity failed during simulation. This indicates an
    /// internal bookkeeping bug and is never expected on valid inputs.
    #[error("conservation check failed at step {step} for node set {subset:?}")]
    ConservationViolated {
        /// Step index at which the identity failed.
        step: u64,
        /// Node subset on which it failed.
        subset: Vec<usize>,
    },

    /// Malformed textual input (JSON payloads, family strings, measures).
    #[error("parse error: {0}")]
    Parse(String),
}
