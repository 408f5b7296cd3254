//! Exact enumeration oracles for drift quantities, plus a truncated
//! stationary-distribution solver.
//!
//! These oracles work on *count* states (one integer per class, arrival
//! order forgotten). That is lossless for the count-based policies
//! (`ml`, `ms`, `priority`, `random`): their decisions depend only on
//! counts, with `ml`/`ms` ties expanded into explicitly weighted
//! branches. The buffer-order policies (`fcfm`, `lcfm`) are supported
//! only while every reachable branch has at most one candidate hyperedge
//! — whenever a branch actually needs arrival-order information the
//! oracle refuses with [`Error::PolicyNotEnumerable`] rather than guess.
//!
//! The drift oracles are generic over the scalar backend; run them with
//! the exact rational backend to get authoritative values (the four-step
//! slope probe in particular checks exact linearity of finite
//! differences). The stationary solver is float-only by nature.

use crate::dynamics::PolicyKind;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::measure::Measure;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};

/// Upper bound on the number of states the truncated solver will build.
pub const MAX_TRUNCATED_STATES: usize = 2_000_000;
/// Convergence target for the stationary residual `max |πP − π|`.
pub const STATIONARY_TOL: f64 = 1e-12;
/// Iteration cap for the power method.
pub const MAX_POWER_ITERATIONS: u64 = 2_000_000;

/// Potential function used by the one-step drift oracle.
pub enum Potential<S: Scalar> {
    /// `L(x) = Σ_i x_i²`.
    SumOfSquares,
    /// Any user-supplied potential of the count vector.
    Custom(Box<dyn Fn(&[u64]) -> S + Send + Sync>),
}

impl<S: Scalar> Potential<S> {
    fn eval(&self, counts: &[u64]) -> S {
        match self {
            Potential::SumOfSquares => sum_of_squares(counts),
            Potential::Custom(f) => f(counts),
        }
    }
}

fn sum_of_squares<S: Scalar>(counts: &[u64]) -> S {
    let mut acc = S::zero();
    for &c in counts {
        let c = S::from_int(c as i64);
        acc = acc + c.clone() * c;
    }
    acc
}

/// One-step expected change of a potential, with per-coordinate probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport<S: Scalar> {
    /// Base count state.
    pub state: Vec<u64>,
    /// `E[L(X') − L(x)]` for one arrival from the base state.
    pub expected_delta: S,
    /// `D(x + e_i) − D(x)` per node; `None` when the probed state is not
    /// admissible.
    pub slope_estimates: Vec<Option<S>>,
}

/// Checks that no hyperedge is fully present in `counts`.
fn check_admissible(h: &Hypergraph, counts: &[u64]) -> Result<()> {
    for edge in h.edges() {
        if edge.iter().all(|&c| counts[c - 1] > 0) {
            return Err(Error::InadmissibleState { edge: edge.clone() });
        }
    }
    Ok(())
}

/// Hyperedges completed by `arrival` on top of `counts`.
fn counts_matchable(h: &Hypergraph, counts: &[u64], arrival: usize) -> Vec<usize> {
    h.edges()
        .iter()
        .enumerate()
        .filter(|(_, edge)| edge.iter().all(|&c| c == arrival || counts[c - 1] > 0))
        .map(|(idx, _)| idx)
        .collect()
}

/// All policy outcomes for one arrival, as `(matched edge, weight)` with
/// weights summing to one. `None` means the arrival joins the buffer.
fn enumerate_branches<S: Scalar>(
    h: &Hypergraph,
    policy: &PolicyKind,
    counts: &[u64],
    arrival: usize,
) -> Result<Vec<(Option<usize>, S)>> {
    let candidates = counts_matchable(h, counts, arrival);
    if candidates.is_empty() {
        return Ok(vec![(None, S::one())]);
    }
    if candidates.len() == 1 {
        return Ok(vec![(Some(candidates[0]), S::one())]);
    }
    match policy {
        PolicyKind::Fcfm => Err(Error::PolicyNotEnumerable {
            policy: "fcfm",
            candidates: candidates.len(),
        }),
        PolicyKind::Lcfm => Err(Error::PolicyNotEnumerable {
            policy: "lcfm",
            candidates: candidates.len(),
        }),
        PolicyKind::Ml | PolicyKind::Ms => {
            let score = |e: usize| -> u64 {
                h.edge(e).iter().map(|&c| counts[c - 1]).sum()
            };
            let maximize = matches!(policy, PolicyKind::Ml);
            let mut best = score(candidates[0]);
            let mut tied = vec![candidates[0]];
            for &e in &candidates[1..] {
                let s = score(e);
                let better = if maximize { s > best } else { s < best };
                if better {
                    best = s;
                    tied.clear();
                    tied.push(e);
                } else if s == best {
                    tied.push(e);
                }
            }
            let w = S::from_ratio(1, tied.len() as i64);
            Ok(tied.into_iter().map(|e| (Some(e), w.clone())).collect())
        }
        PolicyKind::Priority { orders } => {
            let listing = h.edges_containing(arrival);
            for &rank in &orders[arrival - 1] {
                let edge = listing[rank];
                if candidates.contains(&edge) {
                    return Ok(vec![(Some(edge), S::one())]);
                }
            }
            Err(Error::NoCandidates)
        }
        PolicyKind::Random => {
            let w = S::from_ratio(1, candidates.len() as i64);
            Ok(candidates.into_iter().map(|e| (Some(e), w.clone())).collect())
        }
    }
}

/// Applies a branch outcome to a copy of `counts`.
fn apply_branch(h: &Hypergraph, counts: &[u64], arrival: usize, matched: Option<usize>) -> Vec<u64> {
    let mut next = counts.to_vec();
    match matched {
        None => next[arrival - 1] += 1,
        Some(edge) => {
            for &c in h.edge(edge) {
                if c != arrival {
                    next[c - 1] -= 1;
                }
            }
        }
    }
    next
}

/// Exact one-step expected change `D(x) = E[L(X₁) − L(x) | X₀ = x]`.
pub fn expected_change<S: Scalar>(
    h: &Hypergraph,
    measure: &Measure<S>,
    policy: &PolicyKind,
    counts: &[u64],
    potential: &Potential<S>,
) -> Result<S> {
    check_admissible(h, counts)?;
    let base = potential.eval(counts);
    let mut acc = S::zero();
    for arrival in 1..=h.q() {
        let mut inner = S::zero();
        for (matched, weight) in enumerate_branches::<S>(h, policy, counts, arrival)? {
            let next = apply_branch(h, counts, arrival, matched);
            inner = inner + weight * (potential.eval(&next) - base.clone());
        }
        acc = acc + measure.prob(arrival).clone() * inner;
    }
    Ok(acc)
}

/// One-step drift report with per-coordinate slope probes.
pub fn one_step_drift<S: Scalar>(
    h: &Hypergraph,
    measure: &Measure<S>,
    policy: &PolicyKind,
    counts: &[u64],
    potential: &Potential<S>,
) -> Result<DriftReport<S>> {
    if counts.len() != h.q() {
        return Err(Error::BadParameters(format!(
            "state has {} coordinates, expected {}",
            counts.len(),
            h.q()
        )));
    }
    let expected_delta = expected_change(h, measure, policy, counts, potential)?;
    let mut slope_estimates = Vec::with_capacity(h.q());
    for i in 0..h.q() {
        let mut probe = counts.to_vec();
        probe[i] += 1;
        match expected_change(h, measure, policy, &probe, potential) {
            Ok(d) => slope_estimates.push(Some(d - expected_delta.clone())),
            Err(Error::InadmissibleState { .. }) => slope_estimates.push(None),
            Err(e) => return Err(e),
        }
    }
    Ok(DriftReport {
        state: counts.to_vec(),
        expected_delta,
        slope_estimates,
    })
}

/// Expected potential after `depth` arrivals, by full enumeration of the
/// arrival words and policy branches.
fn expected_potential_after<S: Scalar>(
    h: &Hypergraph,
    measure: &Measure<S>,
    policy: &PolicyKind,
    counts: &[u64],
    depth: usize,
) -> Result<S> {
    if depth == 0 {
        return Ok(sum_of_squares(counts));
    }
    let mut acc = S::zero();
    for arrival in 1..=h.q() {
        let mut inner = S::zero();
        for (matched, weight) in enumerate_branches::<S>(h, policy, counts, arrival)? {
            let next = apply_branch(h, counts, arrival, matched);
            inner = inner + weight * expected_potential_after(h, measure, policy, &next, depth - 1)?;
        }
        acc = acc + measure.prob(arrival).clone() * inner;
    }
    Ok(acc)
}

/// `E[L(X₄) − L(x) | X₀ = x]` with `L` the sum of squares.
pub fn four_step_change<S: Scalar>(
    h: &Hypergraph,
    measure: &Measure<S>,
    policy: &PolicyKind,
    counts: &[u64],
) -> Result<S> {
    check_admissible(h, counts)?;
    let after = expected_potential_after(h, measure, policy, counts, 4)?;
    Ok(after - sum_of_squares(counts))
}

/// Base-state families whose four-step drift is probed coordinatewise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum StateFamily {
    /// States `x · e_i` for large `x`.
    Singleton {
        /// The populated class.
        node: usize,
    },
    /// States `x · e_i + y · e_j` for large `x, y`.
    Pair {
        /// The two populated classes.
        nodes: (usize, usize),
    },
    /// States `x · e_i + y · e_j + z · e_k` with `x, y ≥ z > 0`; the
    /// third class plays the small-coordinate role. Only supports of a
    /// removed edge are admissible.
    Triple {
        /// The three populated classes; the last one is the small one.
        nodes: (usize, usize, usize),
    },
}

/// Four-step slopes of a state family, one per populated coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySlopes<S: Scalar> {
    /// The probed family.
    pub family: StateFamily,
    /// `(node, slope)` pairs in family order. Singleton slopes are per
    /// four-arrival block; pair and triple slopes are divided by 4 so
    /// they are directly comparable to one-step coefficient formulas.
    pub per_node: Vec<(usize, S)>,
}

/// Measures the linear growth rate of the four-step drift along each
/// populated coordinate of the family, deep inside the region where the
/// drift is linear in the counts.
///
/// Evaluates `E[L(X₄) − L(X₀)]` at three consecutive values of one
/// coordinate (the others held large and fixed), takes the finite
/// difference, and fails with [`Error::NonLinearRegime`] unless the two
/// successive differences agree exactly. Exactness makes the exact
/// rational backend the intended instantiation.
///
/// Requires the hypergraph to be 3-uniform and complete up to
/// pairwise-disjoint removed edges, the shape for which the interior
/// evaluation points below stay in the linear regime.
pub fn four_step_drift_slope<S: Scalar>(
    h: &Hypergraph,
    measure: &Measure<S>,
    policy: &PolicyKind,
    family: &StateFamily,
) -> Result<FamilySlopes<S>> {
    let shape = h
        .complete_minus_shape()
        .filter(|s| s.r == 3)
        .ok_or_else(|| {
            Error::BadFamily(
                "four-step slopes need a 3-uniform complete-minus hypergraph".to_string(),
            )
        })?;
    let q = h.q();
    let check_node = |v: usize| -> Result<()> {
        if v < 1 || v > q {
            return Err(Error::BadParameters(format!(
                "family node {v} is outside 1..={q}"
            )));
        }
        Ok(())
    };

    // Builds the base state with `coordinate` set to `value`.
    let probe = |assign: &[(usize, u64)]| -> Vec<u64> {
        let mut counts = vec![0u64; q];
        for &(node, value) in assign {
            counts[node - 1] = value;
        }
        counts
    };

    let slope_along = |varying: usize,
                       fixed: &[(usize, u64)],
                       divide_by_four: bool|
     -> Result<S> {
        let mut values = Vec::with_capacity(3);
        for x in [8u64, 9, 10] {
            let mut assign = fixed.to_vec();
            assign.push((varying, x));
            values.push(four_step_change(h, measure, policy, &probe(&assign))?);
        }
        let d1 = values[1].clone() - values[0].clone();
        let d2 = values[2].clone() - values[1].clone();
        if d1 != d2 {
            return Err(Error::NonLinearRegime {
                node: varying,
                diffs: vec![d1.render(), d2.render()],
            });
        }
        Ok(if divide_by_four {
            d1 / S::from_int(4)
        } else {
            d1
        })
    };

    match *family {
        StateFamily::Singleton { node } => {
            check_node(node)?;
            let slope = slope_along(node, &[], false)?;
            Ok(FamilySlopes {
                family: *family,
                per_node: vec![(node, slope)],
            })
        }
        StateFamily::Pair { nodes: (i, j) } => {
            check_node(i)?;
            check_node(j)?;
            if i == j {
                return Err(Error::BadParameters(
                    "pair family needs two distinct nodes".to_string(),
                ));
            }
            let si = slope_along(i, &[(j, 9)], true)?;
            let sj = slope_along(j, &[(i, 9)], true)?;
            Ok(FamilySlopes {
                family: *family,
                per_node: vec![(i, si), (j, sj)],
            })
        }
        StateFamily::Triple { nodes: (i, j, k) } => {
            for v in [i, j, k] {
                check_node(v)?;
            }
            if i == j || i == k || j == k {
                return Err(Error::BadParameters(
                    "triple family needs three distinct nodes".to_string(),
                ));
            }
            let mut sorted = vec![i, j, k];
            sorted.sort_unstable();
            if !shape.removed.contains(&sorted) {
                return Err(Error::InadmissibleState { edge: sorted });
            }
            // Large coordinates probed next to a much larger partner and
            // a unit small coordinate; the small coordinate probed under
            // two dominating partners.
            let si = slope_along(i, &[(j, 12), (k, 1)], true)?;
            let sj = slope_along(j, &[(i, 12), (k, 1)], true)?;
            let sk = slope_along(k, &[(i, 20), (j, 20)], true)?;
            Ok(FamilySlopes {
                family: *family,
                per_node: vec![(i, si), (j, sj), (k, sk)],
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Truncated stationary distribution
// ---------------------------------------------------------------------------

/// Stationary distribution of the count chain truncated at a coordinate
/// cap.
///
/// Arrivals that would push a coordinate beyond the cap are dropped
/// (self-loop); [`TruncatedChainResult::arrival_drop_mass`] reports how
/// much stationary probability those dropped arrivals carry, which
/// quantifies the truncation bias.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruncatedChainResult {
    /// Coordinate cap.
    pub cap: u64,
    /// Number of reachable truncated states.
    pub state_count: usize,
    /// Reachable states, in discovery (BFS) order.
    pub states: Vec<Vec<u32>>,
    /// Stationary probabilities aligned with `states`.
    pub stationary: Vec<f64>,
    /// Stationary mean of the total buffered-item count.
    pub mean_total_count: f64,
    /// Stationary probability of the empty buffer.
    pub empty_state_mass: f64,
    /// Stationary probability that the next arrival is dropped by the cap.
    pub arrival_drop_mass: f64,
    /// Final `max |πP − π|` on the untruncated-step kernel.
    pub residual: f64,
    /// Power iterations performed.
    pub iterations: u64,
}

/// Builds the truncated chain reachable from the empty state and solves
/// for its stationary distribution by lazy power iteration (averaging
/// the kernel with the identity removes periodicity).
pub fn truncated_stationary(
    h: &Hypergraph,
    measure: &Measure<f64>,
    policy: &PolicyKind,
    cap: u64,
) -> Result<TruncatedChainResult> {
    if measure.q() != h.q() {
        return Err(Error::BadParameters(format!(
            "measure has {} classes, hypergraph has {}",
            measure.q(),
            h.q()
        )));
    }
    let q = h.q();
    let mut states: Vec<Vec<u32>> = vec![vec![0u32; q]];
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    index.insert(states[0].clone(), 0);
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut drop_mass: Vec<f64> = Vec::new();
    let mut frontier: VecDeque<usize> = VecDeque::new();
    frontier.push_back(0);

    while let Some(s) = frontier.pop_front() {
        let counts: Vec<u64> = states[s].iter().map(|&c| u64::from(c)).collect();
        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut dropped = 0.0;
        for arrival in 1..=q {
            let p = *measure.prob(arrival);
            for (matched, weight) in enumerate_branches::<f64>(h, policy, &counts, arrival)? {
                let next = apply_branch(h, &counts, arrival, matched);
                if next[arrival - 1] > cap {
                    // Cap hit: the arrival is dropped, the state stays.
                    dropped += p * weight;
                    row.push((s, p * weight));
                    continue;
                }
                let key: Vec<u32> = next.iter().map(|&c| c as u32).collect();
                let t = match index.get(&key) {
                    Some(&t) => t,
                    None => {
                        let t = states.len();
                        if t >= MAX_TRUNCATED_STATES {
                            return Err(Error::StateSpaceTooLarge {
                                limit: MAX_TRUNCATED_STATES,
                            });
                        }
                        states.push(key.clone());
                        index.insert(key, t);
                        frontier.push_back(t);
                        t
                    }
                };
                row.push((t, p * weight));
            }
        }
        // Merge duplicate targets for a compact row.
        row.sort_unstable_by_key(|&(t, _)| t);
        row.dedup_by(|a, b| {
            if a.0 == b.0 {
                b.1 += a.1;
                true
            } else {
                false
            }
        });
        let total: f64 = row.iter().map(|&(_, w)| w).sum();
        debug_assert!((total - 1.0).abs() < 1e-9, "row mass {total} != 1");
        rows.push(row);
        drop_mass.push(dropped);
    }

    let n = states.len();
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0f64; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0u64;
    while iterations < MAX_POWER_ITERATIONS {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (s, row) in rows.iter().enumerate() {
            let mass = pi[s];
            for &(t, w) in row {
                next[t] += mass * w;
            }
        }
        residual = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        // Lazy update: average with the current iterate.
        for (p, nx) in pi.iter_mut().zip(&next) {
            *p = 0.5 * *p + 0.5 * nx;
        }
        iterations += 1;
        if residual < STATIONARY_TOL {
            break;
        }
    }
    // Normalize away accumulated rounding.
    let mass: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= mass);

    let mean_total_count = pi
        .iter()
        .zip(&states)
        .map(|(p, s)| p * s.iter().map(|&c| f64::from(c)).sum::<f64>())
        .sum();
    let arrival_drop_mass = pi.iter().zip(&drop_mass).map(|(p, d)| p * d).sum();
    Ok(TruncatedChainResult {
        cap,
        state_count: n,
        empty_state_mass: pi[0],
        mean_total_count,
        arrival_drop_mass,
        residual,
        iterations,
        stationary: pi,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{generate, Family};
    use crate::measure::Measure;
    use crate::Rational;

    fn uniform_rational(q: usize) -> Measure<Rational> {
        Measure::uniform(q)
    }

    /// Single edge {1,2}: matching both classes one-for-one. From any
    /// state on one axis the squared-norm drift is exactly +1.
    #[test]
    fn one_step_drift_on_the_single_edge_model() {
        let h = Hypergraph::validate(2, &[vec![1, 2]]).unwrap();
        let m = uniform_rational(2);
        for x in [0u64, 1, 5] {
            let report = one_step_drift(
                &h,
                &m,
                &PolicyKind::Fcfm,
                &[x, 0],
                &Potential::SumOfSquares,
            )
            .unwrap();
            assert_eq!(report.expected_delta, Rational::from_int(1));
        }
    }

    #[test]
    fn one_step_drift_rejects_inadmissible_states() {
        let h = Hypergraph::validate(2, &[vec![1, 2]]).unwrap();
        let m = uniform_rational(2);
        let err = one_step_drift(
            &h,
            &m,
            &PolicyKind::Ml,
            &[1, 1],
            &Potential::SumOfSquares,
        )
        .unwrap_err();
        assert_eq!(err, Error::InadmissibleState { edge: vec![1, 2] });
    }

    #[test]
    fn fcfm_oracle_refuses_ambiguous_branches() {
        // Star with two edges through node 1: with both leaves buffered,
        // an arrival of class 1 completes both edges and the counts-only
        // view cannot decide FCFM.
        let h = generate(&Family::Star {
            q: 3,
            edges: vec![vec![1, 2], vec![1, 3]],
        })
        .unwrap();
        let m = uniform_rational(3);
        let err = expected_change(
            &h,
            &m,
            &PolicyKind::Fcfm,
            &[0, 1, 1],
            &Potential::SumOfSquares,
        )
        .unwrap_err();
        assert!(matches!(err, Error::PolicyNotEnumerable { .. }));
        // The same state is fine for count-based policies.
        expected_change(
            &h,
            &m,
            &PolicyKind::Random,
            &[0, 1, 1],
            &Potential::SumOfSquares,
        )
        .unwrap();
    }

    #[test]
    fn four_step_slope_is_linear_on_complete_3_uniform() {
        let h = generate(&Family::Complete { q: 5, r: 3 }).unwrap();
        let m = uniform_rational(5);
        let slopes = four_step_drift_slope(
            &h,
            &m,
            &PolicyKind::Ml,
            &StateFamily::Singleton { node: 1 },
        )
        .unwrap();
        assert_eq!(slopes.per_node.len(), 1);
        // Uniform measure on the complete 3-uniform hypergraph is well
        // inside the stability region, so the slope is negative.
        assert!(slopes.per_node[0].1 < Rational::from_int(0));
    }

    #[test]
    fn triple_family_requires_a_removed_edge() {
        let h = generate(&Family::CompleteMinus {
            q: 6,
            r: 3,
            removed: vec![vec![1, 2, 3]],
        })
        .unwrap();
        let m = uniform_rational(6);
        let err = four_step_drift_slope(
            &h,
            &m,
            &PolicyKind::Ml,
            &StateFamily::Triple { nodes: (1, 2, 4) },
        )
        .unwrap_err();
        assert_eq!(err, Error::InadmissibleState { edge: vec![1, 2, 4] });
    }

    #[test]
    fn truncated_stationary_on_the_single_edge_chain() {
        // Uniform arrivals on the single edge {1,2} form a lazy random
        // walk on the difference; truncated at cap K both axes. The chain
        // is transient in the full space but the truncated version still
        // has a stationary law; sanity-check structure only.
        let h = Hypergraph::validate(2, &[vec![1, 2]]).unwrap();
        let m = Measure::make(&[0.5, 0.5]).unwrap();
        let res = truncated_stationary(&h, &m, &PolicyKind::Fcfm, 6).unwrap();
        // States live on the two axes: (0,0), (x,0), (0,y) with x,y <= 6.
        assert_eq!(res.state_count, 13);
        assert!(res.residual < STATIONARY_TOL);
        let mass: f64 = res.stationary.iter().sum();
        assert!((mass - 1.0).abs() < 1e-9);
        assert!(res.arrival_drop_mass > 0.0);
    }

    #[test]
    fn truncated_stationary_matches_a_hand_solved_birth_death_chain() {
        // Classes {1,2}, edge {1,2}, biased arrivals p = 1/4 for class 1.
        // The count chain is the birth–death walk on x = (class-1 items) −
        // (class-2 items) reflected at 0 and capped; its stationary law
        // is geometric with ratio p/(1-p) on the class-1 axis. With cap 1
        // on each axis the states are (0,0), (1,0), (0,1).
        let h = Hypergraph::validate(2, &[vec![1, 2]]).unwrap();
        let m = Measure::make(&[0.25, 0.75]).unwrap();
        let res = truncated_stationary(&h, &m, &PolicyKind::Fcfm, 1).unwrap();
        assert_eq!(res.state_count, 3);
        // Solve the 3-state chain by hand: π(0,0)·p = π(1,0)·(1−p) and
        // π(0,0)·(1−p) = π(0,1)·p give π ∝ (1, p/(1−p), (1−p)/p).
        let p = 0.25;
        let raw = [1.0, p / (1.0 - p), (1.0 - p) / p];
        let z: f64 = raw.iter().sum();
        for (state, want) in [(vec![0u32, 0], raw[0] / z), (vec![1, 0], raw[1] / z), (vec![0, 1], raw[2] / z)]
        {
            let idx = res.states.iter().position(|s| *s == state).unwrap();
            assert!(
                (res.stationary[idx] - want).abs() < 1e-10,
                "state {state:?}: got {}, want {want}",
                res.stationary[idx]
            );
        }
    }
}
