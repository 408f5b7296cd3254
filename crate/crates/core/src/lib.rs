//! Stochastic matching on hypergraphs.
//!
//! Items of `q` classes arrive one at a time; compatibility between
//! classes is a hypergraph on the class set, and a matching policy picks,
//! whenever the arrival completes at least one hyperedge in the buffer,
//! which hyperedge leaves. This crate provides:
//!
//! * validated hypergraph structures and parametric families
//!   ([`hypergraph`]);
//! * probability measures on classes with exact-rational or float
//!   arithmetic ([`measure`], [`scalar`]);
//! * the buffer dynamics under six matching policies ([`dynamics`]);
//! * stability conditions — necessary conditions, structural
//!   non-stabilizability triggers, and sufficient stability regions for
//!   complete and near-complete 3-uniform families ([`stability`]);
//! * exact enumeration oracles for drift quantities and a truncated
//!   stationary-distribution solver ([`oracle`]);
//! * a Monte Carlo simulator with replication-based classification
//!   ([`sim`]).
//!
//! Analysis code is generic over the [`scalar::Scalar`] backend; the
//! aliases below fix the two supported instantiations.

#![forbid(unsafe_code)]

pub mod dynamics;
pub mod error;
pub mod hypergraph;
pub mod measure;
pub mod oracle;
pub mod regions;
pub mod scalar;
pub mod sim;
pub mod stability;

pub use error::{Error, Result};
pub use hypergraph::{generate, Family, Hypergraph, StructuralProfile};
pub use measure::Measure;
pub use scalar::Scalar;

/// Exact rational scalar backend.
pub type Rational = num_rational::BigRational;

/// Measure with exact rational probabilities.
pub type RationalMeasure = Measure<Rational>;

/// Measure with float probabilities.
pub type FloatMeasure = Measure<f64>;
