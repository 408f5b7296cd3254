//! Necessary stability conditions and structural non-stabilizability
//! triggers.
//!
//! For a hypergraph `H` on classes `1..=q` and an arrival measure `μ`,
//! this module decides membership in the necessary-condition sets:
//!
//! * `N1_plus` — for every node subset `B`,
//!   `μ(B) ≤ Σ_H |H ∩ B| · min_{j ∈ H} μ(j)`;
//! * `N1_minus` — the same sum with strict inequality, quantified over
//!   the subsets met at least twice by some edge;
//! * `N1_minusminus` — for every proper subset `B`,
//!   `μ(B) < Σ_H |H ∩ B| · min_{j ∈ H∖B} μ(j)` (a subset containing a
//!   full edge passes vacuously: the empty minimum is `+∞`);
//! * `N2` — every transversal `T` satisfies `μ(T) > 1/rank`; checking
//!   the inclusion-minimal transversals suffices because supersets carry
//!   at least as much mass;
//! * `N3_plus` / `N3_minus` — every node satisfies `μ(i) ≤ 1/a`
//!   (resp. `<`), where `a` is the smallest edge size.
//!
//! Violation witnesses are deterministic: the first violating subset /
//! transversal / node in ascending bitmask (resp. node) order.
//!
//! [`classify_nonstabilizable`] collects measure-free structural
//! certificates that no arrival measure (or, for the transversal-count
//! trigger, the uniform measure) can be stabilized, and
//! [`hall_instability`] combines the subset-pair cardinality check with
//! a near-uniformity ratio gate on the measure.

use crate::error::Result;
use crate::hypergraph::{nodes_of_mask, HallVerdict, Hypergraph, PartitionWitness};
use crate::measure::Measure;
use crate::scalar::{sum, Scalar};
use serde::{Deserialize, Serialize};

/// Names of the decidable membership conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionName {
    /// Weak subset-flow bound.
    #[serde(rename = "N1_plus")]
    N1Plus,
    /// Strict subset-flow bound on doubly-met subsets.
    #[serde(rename = "N1_minus")]
    N1Minus,
    /// Strict subset-flow bound with minima outside the subset.
    #[serde(rename = "N1_minusminus")]
    N1MinusMinus,
    /// Transversal mass bound.
    #[serde(rename = "N2")]
    N2,
    /// Weak per-node mass bound.
    #[serde(rename = "N3_plus")]
    N3Plus,
    /// Strict per-node mass bound.
    #[serde(rename = "N3_minus")]
    N3Minus,
    /// Sufficient stability region via negative four-step drift.
    #[serde(rename = "S")]
    S,
    /// Near-uniformity ratio region.
    #[serde(rename = "A")]
    A,
    /// Ratio region intersected with the necessary conditions.
    #[serde(rename = "S1")]
    S1,
}

/// The object certifying a violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// A node subset violating a subset-indexed bound.
    Subset {
        /// The violating subset, sorted.
        nodes: Vec<usize>,
    },
    /// A transversal with too little mass.
    Transversal {
        /// The violating transversal, sorted.
        nodes: Vec<usize>,
    },
    /// A single node violating a per-node bound.
    Node {
        /// The violating node.
        node: usize,
    },
    /// A drift coefficient that fails to be negative.
    Coefficient {
        /// Which coefficient family (`lambda_i` or `nu_i`).
        name: String,
        /// The node the coefficient belongs to.
        node: usize,
    },
    /// The extreme-probability nodes, for ratio bounds.
    Extremes {
        /// A node of smallest probability.
        min_node: usize,
        /// A node of largest probability.
        max_node: usize,
    },
}

/// Membership outcome for one condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    /// Which condition was decided.
    pub condition: ConditionName,
    /// Whether the measure belongs to the condition's set.
    pub member: bool,
    /// Present exactly when `member` is false: the first violating
    /// object in the deterministic scan order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl ConditionVerdict {
    fn new(condition: ConditionName, witness: Option<Witness>) -> Self {
        ConditionVerdict {
            condition,
            member: witness.is_none(),
            witness,
        }
    }
}

/// Verdicts for the three subset-flow conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct N1Report {
    /// Weak bound over all subsets.
    pub plus: ConditionVerdict,
    /// Strict bound over doubly-met subsets.
    pub minus: ConditionVerdict,
    /// Strict bound with minima outside the subset.
    pub minus_minus: ConditionVerdict,
}

struct N1Scan<'a, S: Scalar> {
    masks: &'a [u32],
    probs: &'a [S],
    /// Per-node `μ(i) − Σ_{H ∋ i} min_{j ∈ H} μ(j)`; subset sums of this
    /// vector decide the first two conditions.
    deficit: Vec<S>,
    /// Edge nodes sorted by ascending probability, for the
    /// minimum-outside-the-subset lookups.
    edges_by_prob: Vec<Vec<usize>>,
    full: u32,
    witness_plus: Option<u32>,
    witness_minus: Option<u32>,
    witness_minus_minus: Option<u32>,
}

impl<S: Scalar> N1Scan<'_, S> {
    fn done(&self) -> bool {
        self.witness_plus.is_some()
            && self.witness_minus.is_some()
            && self.witness_minus_minus.is_some()
    }

    /// Visits subsets in ascending bitmask order: all subsets without
    /// the highest undecided node come before all subsets with it.
    fn descend(&mut self, bit: usize, mask: u32, sum_deficit: S, sum_mass: S) {
        if self.done() {
            return;
        }
        if bit == 0 {
            if mask != 0 {
                self.leaf(mask, &sum_deficit, &sum_mass);
            }
            return;
        }
        self.descend(bit - 1, mask, sum_deficit.clone(), sum_mass.clone());
        let included = mask | (1 << (bit - 1));
        self.descend(
            bit - 1,
            included,
            sum_deficit + self.deficit[bit - 1].clone(),
            sum_mass + self.probs[bit - 1].clone(),
        );
    }

    fn leaf(&mut self, mask: u32, sum_deficit: &S, sum_mass: &S) {
        let zero = S::zero();
        if self.witness_plus.is_none() && *sum_deficit > zero {
            self.witness_plus = Some(mask);
        }
        if self.witness_minus.is_none()
            && *sum_deficit >= zero
            && self.masks.iter().any(|&em| (em & mask).count_ones() >= 2)
        {
            self.witness_minus = Some(mask);
        }
        if self.witness_minus_minus.is_none() && mask != self.full {
            let mut rhs = zero;
            let mut vacuous = false;
            for (e, &em) in self.masks.iter().enumerate() {
                let inter = em & mask;
                if inter == 0 {
                    continue;
                }
                if inter == em {
                    // The subset swallows a full edge: empty minimum,
                    // infinite right-hand side.
                    vacuous = true;
                    break;
                }
                let outside_min = self.edges_by_prob[e]
                    .iter()
                    .find(|&&v| mask & (1 << (v - 1)) == 0)
                    .expect("edge has a node outside the subset");
                rhs = rhs
                    + S::from_int(inter.count_ones() as i64)
                        * self.probs[outside_min - 1].clone();
            }
            if !vacuous && *sum_mass >= rhs {
                self.witness_minus_minus = Some(mask);
            }
        }
    }
}

/// Decides the three subset-flow conditions by one exhaustive scan.
pub fn check_n1<S: Scalar>(h: &Hypergraph, measure: &Measure<S>) -> Result<N1Report> {
    h.check_exhaustive_guard()?;
    check_measure_size(h, measure.q())?;
    let probs = measure.probs();
    let edge_min: Vec<S> = h
        .edges()
        .iter()
        .map(|edge| {
            edge.iter()
                .map(|&v| probs[v - 1].clone())
                .reduce(|a, b| if b < a { b } else { a })
                .expect("edges are nonempty")
        })
        .collect();
    let deficit: Vec<S> = (1..=h.q())
        .map(|i| {
            let covered = sum(h.edges_containing(i).iter().map(|&e| edge_min[e].clone()));
            probs[i - 1].clone() - covered
        })
        .collect();
    let edges_by_prob: Vec<Vec<usize>> = h
        .edges()
        .iter()
        .map(|edge| {
            let mut nodes = edge.clone();
            nodes.sort_by(|&a, &b| {
                probs[a - 1]
                    .partial_cmp(&probs[b - 1])
                    .expect("probabilities are comparable")
                    .then(a.cmp(&b))
            });
            nodes
        })
        .collect();
    let mut scan = N1Scan {
        masks: h.masks(),
        probs,
        deficit,
        edges_by_prob,
        full: (1u32 << h.q()) - 1,
        witness_plus: None,
        witness_minus: None,
        witness_minus_minus: None,
    };
    scan.descend(h.q(), 0, S::zero(), S::zero());
    let subset = |mask: Option<u32>| mask.map(|m| Witness::Subset { nodes: nodes_of_mask(m) });
    Ok(N1Report {
        plus: ConditionVerdict::new(ConditionName::N1Plus, subset(scan.witness_plus)),
        minus: ConditionVerdict::new(ConditionName::N1Minus, subset(scan.witness_minus)),
        minus_minus: ConditionVerdict::new(
            ConditionName::N1MinusMinus,
            subset(scan.witness_minus_minus),
        ),
    })
}

/// Decides the transversal mass bound: every transversal needs mass
/// above `1/rank`.
pub fn check_n2<S: Scalar>(h: &Hypergraph, measure: &Measure<S>) -> Result<ConditionVerdict> {
    check_measure_size(h, measure.q())?;
    let threshold = S::from_ratio(1, h.rank() as i64);
    let witness = h
        .minimal_transversals()?
        .into_iter()
        .find(|t| measure.mass_of(t) <= threshold)
        .map(|t| Witness::Transversal { nodes: t });
    Ok(ConditionVerdict::new(ConditionName::N2, witness))
}

/// Verdicts for the weak and strict per-node bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct N3Report {
    /// `μ(i) ≤ 1/a` for every node.
    pub plus: ConditionVerdict,
    /// `μ(i) < 1/a` for every node.
    pub minus: ConditionVerdict,
}

/// Decides the per-node mass bounds against the smallest edge size.
pub fn check_n3<S: Scalar>(h: &Hypergraph, measure: &Measure<S>) -> Result<N3Report> {
    check_measure_size(h, measure.q())?;
    let bound = S::from_ratio(1, h.anti_rank() as i64);
    let violating = |strict: bool| {
        (1..=h.q())
            .find(|&i| {
                if strict {
                    *measure.prob(i) >= bound
                } else {
                    *measure.prob(i) > bound
                }
            })
            .map(|node| Witness::Node { node })
    };
    Ok(N3Report {
        plus: ConditionVerdict::new(ConditionName::N3Plus, violating(false)),
        minus: ConditionVerdict::new(ConditionName::N3Minus, violating(true)),
    })
}

fn check_measure_size(h: &Hypergraph, measure_q: usize) -> Result<()> {
    if measure_q != h.q() {
        return Err(crate::error::Error::BadParameters(format!(
            "measure has {} classes, hypergraph has {}",
            measure_q,
            h.q()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Structural non-stabilizability triggers
// ---------------------------------------------------------------------------

/// A circular node ordering under which the hypergraph may be a window
/// family; supplied by whoever knows how the instance was built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleDescription {
    /// Nodes in circular order.
    pub ordering: Vec<usize>,
    /// Overlap of consecutive windows.
    pub overlap: usize,
}

/// A structural certificate that no arrival measure is stabilizable
/// (the last variant certifies it for the uniform measure only).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "trigger", rename_all = "snake_case")]
pub enum InstabilityTrigger {
    /// An edge with two nodes that belong to no other edge: their buffer
    /// difference is a blind random walk.
    TwoDegreeOneNodes {
        /// The edge.
        edge: Vec<usize>,
        /// Two of its degree-one nodes.
        nodes: Vec<usize>,
    },
    /// Uniform hypergraph whose edges all pass through one node.
    UniformStar {
        /// The common node (smallest if several).
        center: usize,
    },
    /// A subset `B` such that every edge meeting `B` contains a
    /// degree-one node, at least one of them outside `B`.
    DegreeOneWitnessSet {
        /// The subset.
        subset: Vec<usize>,
        /// A degree-one node outside the subset in an edge meeting it.
        outside_node: usize,
    },
    /// A side met exactly once by every edge.
    RUniformBipartite {
        /// The side met exactly once.
        v1: Vec<usize>,
        /// The complementary side.
        v2: Vec<usize>,
    },
    /// A partition into parts each met exactly once by every edge.
    RUniformKPartite {
        /// Number of parts.
        k: usize,
        /// The parts.
        parts: Vec<Vec<usize>>,
    },
    /// A circular window family whose window size divides the node count.
    CyclicCover {
        /// Window size.
        r: usize,
        /// Node count.
        q: usize,
        /// Window overlap.
        overlap: usize,
    },
    /// Uniform hypergraph with a transversal small enough that the
    /// uniform measure fails the transversal mass bound.
    UniformMeasureTransversal {
        /// The transversal number.
        transversal_number: usize,
        /// The uniform edge size.
        r: usize,
    },
}

/// Collects every structural trigger that applies.
///
/// The searches run independently: an instance may (and often does)
/// satisfy several certificates at once, and each is reported. The
/// window-family trigger needs the circular ordering, which cannot be
/// recovered from the edge set alone in general, so it fires only when a
/// [`CycleDescription`] is supplied and verifies.
pub fn classify_nonstabilizable(
    h: &Hypergraph,
    cycle: Option<&CycleDescription>,
) -> Result<Vec<InstabilityTrigger>> {
    h.check_exhaustive_guard()?;
    let mut triggers = Vec::new();
    let degrees = h.degrees();

    // Two degree-one nodes sharing an edge.
    for edge in h.edges() {
        let isolated: Vec<usize> = edge
            .iter()
            .copied()
            .filter(|&v| degrees[v - 1] == 1)
            .collect();
        if isolated.len() >= 2 {
            triggers.push(InstabilityTrigger::TwoDegreeOneNodes {
                edge: edge.clone(),
                nodes: isolated[..2].to_vec(),
            });
            break;
        }
    }

    // Uniform star: a node common to all edges.
    if h.uniform().is_some() {
        let common = h.masks().iter().fold(u32::MAX, |acc, &m| acc & m);
        if common != 0 {
            triggers.push(InstabilityTrigger::UniformStar {
                center: common.trailing_zeros() as usize + 1,
            });
        }
    }

    // Degree-one witness subset.
    let deg1 = h.degree_one_mask();
    if deg1 != 0 {
        'outer: for mask in 1u32..(1u32 << h.q()) {
            let mut outside: Option<usize> = None;
            for &em in h.masks() {
                if em & mask == 0 {
                    continue;
                }
                let ones = em & deg1;
                if ones == 0 {
                    continue 'outer;
                }
                if outside.is_none() && ones & !mask != 0 {
                    outside = Some((ones & !mask).trailing_zeros() as usize + 1);
                }
            }
            if let Some(outside_node) = outside {
                triggers.push(InstabilityTrigger::DegreeOneWitnessSet {
                    subset: nodes_of_mask(mask),
                    outside_node,
                });
                break;
            }
        }
    }

    // Partition structures; searched independently of each other so both
    // certificates are reported when both exist.
    if let Some(r) = h.uniform() {
        match h.detect_partitions()? {
            PartitionWitness::RUniformBipartite { v1, v2 } => {
                triggers.push(InstabilityTrigger::RUniformBipartite { v1, v2 });
                if let Some(PartitionWitness::KPartite { k, parts }) = h.detect_k_partite()? {
                    triggers.push(InstabilityTrigger::RUniformKPartite { k, parts });
                }
            }
            PartitionWitness::KPartite { k, parts } => {
                triggers.push(InstabilityTrigger::RUniformKPartite { k, parts });
            }
            PartitionWitness::None => {}
        }

        // Window family with window size dividing the node count.
        if let Some(desc) = cycle {
            if h.q() % r == 0 && h.verify_cycle(&desc.ordering, desc.overlap)? {
                triggers.push(InstabilityTrigger::CyclicCover {
                    r,
                    q: h.q(),
                    overlap: desc.overlap,
                });
            }
        }

        // Transversal small enough to starve the uniform measure.
        let tau = h.transversal_number()?;
        if tau * r <= h.q() {
            triggers.push(InstabilityTrigger::UniformMeasureTransversal {
                transversal_number: tau,
                r,
            });
        }
    }

    Ok(triggers)
}

// ---------------------------------------------------------------------------
// Hall-style instability for near-uniform measures
// ---------------------------------------------------------------------------

/// Outcome of the cardinality-comparison trigger gated by measure
/// near-uniformity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallInstabilityReport {
    /// Whether the combined trigger applies: comparison violated and the
    /// measure close enough to uniform.
    pub triggered: bool,
    /// The structural comparison outcome.
    pub hall: HallVerdict,
    /// Whether `μ_min / μ_max` exceeds `(t − 1)/t` with
    /// `t = ⌊(q + 1)/2⌋`.
    pub ratio_exceeds_threshold: bool,
    /// The ratio threshold, rendered.
    pub threshold: String,
    /// Whether subset mass is strictly increasing in cardinality
    /// (implied by the ratio gate; reported for visibility).
    pub monotone_in_cardinality: bool,
}

/// Combines the subset-pair cardinality check with the near-uniformity
/// gate that makes it a genuine instability certificate.
pub fn hall_instability<S: Scalar>(
    h: &Hypergraph,
    measure: &Measure<S>,
) -> Result<HallInstabilityReport> {
    check_measure_size(h, measure.q())?;
    let hall = h.check_hall()?;
    let t = (h.q() + 1) / 2;
    let threshold = S::from_ratio(t as i64 - 1, t as i64);
    let stats = measure.order_stats();
    // min/max > (t-1)/t, compared multiplicatively to stay exact.
    let ratio_exceeds_threshold = stats.min > threshold * stats.max;
    let monotone = measure.strictly_monotone_in_cardinality();
    debug_assert!(
        !ratio_exceeds_threshold || monotone,
        "the ratio gate must imply cardinality monotonicity"
    );
    let violated = matches!(hall, HallVerdict::Violated { .. });
    Ok(HallInstabilityReport {
        triggered: violated && ratio_exceeds_threshold,
        hall,
        ratio_exceeds_threshold,
        threshold: format!("{}/{}", t - 1, t),
        monotone_in_cardinality: monotone,
    })
}
