//! Sufficient stability regions for 3-uniform complete and
//! complete-minus hypergraphs under the match-the-longest policy.
//!
//! Three layers, from special to general:
//!
//! * [`complete3_region`] — on the complete 3-uniform hypergraph
//!   (`q ≥ 4`) the stability region is exactly the strict per-node set
//!   `{μ : max_i μ(i) < 1/3}`; this function decides membership.
//! * [`lyapunov_witness`] — for the measures `μ(i) ∝ α^i` on the
//!   complete 3-uniform hypergraph, builds the quadratic-form witness
//!   `(u, w)` whose directional products are all negative, certifying
//!   stability for `0 < α < 1/3`.
//! * [`drift_coefficients`] / [`check_s_s1`] — on a complete-minus
//!   hypergraph (`q ≥ 5`, pairwise-disjoint removed triples), the
//!   four-step drift of the squared buffer norm is asymptotically linear
//!   along each boundary face; its per-coordinate slopes have polynomial
//!   closed forms in `μ` (`λ` for nodes outside removed edges, `ν` for
//!   nodes inside one). The region `S` — negative slopes on every
//!   single-class face, plus the transversal and per-node mass bounds —
//!   is sufficient for stability, and the near-uniformity region `S1`
//!   (ratio bound `A` plus the same mass bounds) is a handier subset.
//!
//! The slopes used to decide `S` always come from the exact enumeration
//! oracle; the closed forms are evaluated alongside and their deviation
//! is reported, so a transcription error in the polynomials can never
//! silently change a verdict.

use crate::dynamics::PolicyKind;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::measure::Measure;
use crate::oracle::{four_step_drift_slope, StateFamily};
use crate::scalar::Scalar;
use crate::stability::{check_n2, check_n3, ConditionName, ConditionVerdict, Witness};
use crate::Rational;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// Complete 3-uniform: exact region
// ---------------------------------------------------------------------------

/// Verdict for the exact stability region of the complete 3-uniform
/// hypergraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Complete3Verdict {
    /// Every class satisfies `μ(i) < 1/3`: the system is stable.
    Stable,
    /// Some class reaches `1/3`: the system is not stable.
    NotStable {
        /// The first offending node.
        node: usize,
    },
    /// The hypergraph is not complete 3-uniform on at least 4 nodes.
    Inapplicable {
        /// Why the region does not apply.
        reason: String,
    },
}

/// Decides membership in the exact stability region of the complete
/// 3-uniform hypergraph on `q ≥ 4` nodes: all `μ(i) < 1/3`.
///
/// The strict inequality is sharp — a class holding exactly one third of
/// the arrivals is already too heavy.
pub fn complete3_region<S: Scalar>(
    h: &Hypergraph,
    measure: &Measure<S>,
) -> Result<Complete3Verdict> {
    if measure.q() != h.q() {
        return Err(Error::BadParameters(format!(
            "measure has {} classes, hypergraph has {}",
            measure.q(),
            h.q()
        )));
    }
    let complete3 = h
        .complete_minus_shape()
        .map(|s| s.r == 3 && s.removed.is_empty())
        .unwrap_or(false);
    if !complete3 || h.q() < 4 {
        return Ok(Complete3Verdict::Inapplicable {
            reason: "the exact region applies to complete 3-uniform hypergraphs on q >= 4 nodes"
                .to_string(),
        });
    }
    let third = S::from_ratio(1, 3);
    match (1..=h.q()).find(|&i| *measure.prob(i) >= third) {
        Some(node) => Ok(Complete3Verdict::NotStable { node }),
        None => Ok(Complete3Verdict::Stable),
    }
}

// ---------------------------------------------------------------------------
// Geometric measures: quadratic-form witness
// ---------------------------------------------------------------------------

/// A quadratic-form stability witness for geometric measures on the
/// complete 3-uniform hypergraph.
///
/// The drift argument tracks the two largest buffer coordinates; the
/// quadratic form `L(x, y) = u(x² + y²) + wxy` has negative directional
/// products against each of the four relevant mean jump vectors whenever
/// `w` sits in the open interval below, and it is positive definite
/// because `4u² > w²`.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovWitness<S: Scalar> {
    /// The geometric ratio, in `(0, 1/3)`.
    pub alpha: S,
    /// Diagonal weight `u = (1 − 3α)/2` of the quadratic form.
    pub u: S,
    /// Chosen cross weight: the midpoint of the admissible interval.
    pub w: S,
    /// Lower end of the admissible interval for `w`.
    pub w_lower: S,
    /// Upper end of the admissible interval for `w`.
    pub w_upper: S,
    /// Directional products of the form gradient with the four mean jump
    /// vectors; all must be negative.
    pub directional: [S; 4],
    /// Whether all four directional products are negative.
    pub all_negative: bool,
    /// Whether the form is positive definite (`4u² > w²`).
    pub positive_definite: bool,
}

/// Builds the quadratic-form witness for the geometric measure with
/// ratio `alpha`, which must lie strictly between 0 and 1/3.
pub fn lyapunov_witness<S: Scalar>(alpha: &S) -> Result<LyapunovWitness<S>> {
    let zero = S::zero();
    let one = S::one();
    let three = S::from_int(3);
    if !(*alpha > zero) || !(three.clone() * alpha.clone() < one) {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.render(),
        });
    }
    let two = S::from_int(2);
    let three_alpha_minus_one = three * alpha.clone() - one.clone();
    let u = -three_alpha_minus_one.clone() / two.clone();
    let w_lower = three_alpha_minus_one.clone();
    let w_upper = three_alpha_minus_one.clone() * alpha.clone() / (one.clone() - alpha.clone());
    let w = (w_lower.clone() + w_upper.clone()) / two.clone();

    // Mean jump vectors of the two tracked coordinates: both large
    // (interior), and each coordinate alone on its axis.
    let interior = (three_alpha_minus_one.clone(), three_alpha_minus_one);
    let first_axis = (alpha.clone(), one.clone() - alpha.clone());
    let second_axis = (one - alpha.clone(), alpha.clone());
    let product = |dx: &S, dy: &S| two.clone() * u.clone() * dx.clone() + w.clone() * dy.clone();
    let directional = [
        product(&interior.0, &interior.1),
        product(&interior.1, &interior.0),
        product(&first_axis.0, &first_axis.1),
        product(&second_axis.1, &second_axis.0),
    ];
    let all_negative = directional.iter().all(|v| *v < zero);
    let four = S::from_int(4);
    let positive_definite = four * u.clone() * u.clone() > w.clone() * w.clone();
    Ok(LyapunovWitness {
        alpha: alpha.clone(),
        u,
        w,
        w_lower,
        w_upper,
        directional,
        all_negative,
        positive_definite,
    })
}

// ---------------------------------------------------------------------------
// Symmetric-sum helpers for the coefficient polynomials
// ---------------------------------------------------------------------------

fn mu<S: Scalar>(probs: &[S], v: usize) -> S {
    probs[v - 1].clone()
}

fn power_sum<S: Scalar>(probs: &[S], nodes: &[usize], k: u32) -> S {
    let mut acc = S::zero();
    for &v in nodes {
        let mut term = S::one();
        for _ in 0..k {
            term = term * mu(probs, v);
        }
        acc = acc + term;
    }
    acc
}

/// `Σ μ(a)μ(b)` over unordered pairs `{a, b}`.
fn pair_sym<S: Scalar>(probs: &[S], nodes: &[usize]) -> S {
    let mut acc = S::zero();
    for (ia, &a) in nodes.iter().enumerate() {
        for &b in &nodes[ia + 1..] {
            acc = acc + mu(probs, a) * mu(probs, b);
        }
    }
    acc
}

/// `Σ μ(a)μ(b)μ(c)` over unordered triples.
fn triple_sym<S: Scalar>(probs: &[S], nodes: &[usize]) -> S {
    let mut acc = S::zero();
    for (ia, &a) in nodes.iter().enumerate() {
        for (ib, &b) in nodes.iter().enumerate().skip(ia + 1) {
            for &c in &nodes[ib + 1..] {
                acc = acc + mu(probs, a) * mu(probs, b) * mu(probs, c);
            }
        }
    }
    acc
}

/// `Σ μ(a)μ(b)μ(c)μ(d)` over unordered quadruples.
fn quad_sym<S: Scalar>(probs: &[S], nodes: &[usize]) -> S {
    let mut acc = S::zero();
    for (ia, &a) in nodes.iter().enumerate() {
        for (ib, &b) in nodes.iter().enumerate().skip(ia + 1) {
            for (ic, &c) in nodes.iter().enumerate().skip(ib + 1) {
                for &d in &nodes[ic + 1..] {
                    acc = acc + mu(probs, a) * mu(probs, b) * mu(probs, c) * mu(probs, d);
                }
            }
        }
    }
    acc
}

/// `Σ μ²(x)μ(y)` over ordered distinct `(x, y)`.
fn sq_lin_ord<S: Scalar>(probs: &[S], nodes: &[usize]) -> S {
    let mut acc = S::zero();
    for &x in nodes {
        for &y in nodes {
            if x != y {
                acc = acc + mu(probs, x) * mu(probs, x) * mu(probs, y);
            }
        }
    }
    acc
}

/// `Σ μ³(x)μ(y)` over ordered distinct `(x, y)`.
fn cube_lin_ord<S: Scalar>(probs: &[S], nodes: &[usize]) -> S {
    let mut acc = S::zero();
    for &x in nodes {
        for &y in nodes {
            if x != y {
                acc = acc + mu(probs, x) * mu(probs, x) * mu(probs, x) * mu(probs, y);
            }
        }
    }
    acc
}

/// `Σ μ²(x)μ²(y)` over unordered pairs.
fn sq_sq_sym<S: Scalar>(probs: &[S], nodes: &[usize]) -> S {
    let mut acc = S::zero();
    for (ia, &a) in nodes.iter().enumerate() {
        for &b in &nodes[ia + 1..] {
            acc = acc + mu(probs, a) * mu(probs, a) * mu(probs, b) * mu(probs, b);
        }
    }
    acc
}

/// `Σ μ²(x)μ(a)μ(b)` over `x` and unordered pairs `{a, b}` avoiding `x`.
fn sq_pair<S: Scalar>(probs: &[S], nodes: &[usize]) -> S {
    let mut acc = S::zero();
    for &x in nodes {
        for (ia, &a) in nodes.iter().enumerate() {
            if a == x {
                continue;
            }
            for &b in &nodes[ia + 1..] {
                if b == x {
                    continue;
                }
                acc = acc + mu(probs, x) * mu(probs, x) * mu(probs, a) * mu(probs, b);
            }
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Closed-form coefficients
// ---------------------------------------------------------------------------

/// Closed form of the four-step slope along the face of a class that
/// belongs to no removed edge.
///
/// All sums range over nodes distinct from `i` (and from each other);
/// pair, triple and quadruple sums count each index set once.
#[must_use]
pub fn closed_form_lambda<S: Scalar>(measure: &Measure<S>, i: usize) -> S {
    let probs = measure.probs();
    let others: Vec<usize> = (1..=measure.q()).filter(|&v| v != i).collect();
    let mi = mu(probs, i);
    let c = S::from_int;
    c(8) * mi.clone() * mi.clone() * mi.clone() * mi.clone()
        + c(24) * mi.clone() * mi.clone() * mi.clone() * power_sum(probs, &others, 1)
        + c(24) * mi.clone() * mi.clone() * power_sum(probs, &others, 2)
        + c(8) * mi.clone() * power_sum(probs, &others, 3)
        + c(24) * mi.clone() * mi * pair_sym(probs, &others)
        - c(44) * sq_pair(probs, &others)
        - c(24) * sq_sq_sym(probs, &others)
        - c(8) * cube_lin_ord(probs, &others)
        - c(96) * quad_sym(probs, &others)
}

/// Closed form of the four-step slope along the face of a class inside
/// the removed edge `removed_edge`.
///
/// Writing `H` for the removed edge, the sums split between the two
/// partner classes of `i` in `H` and the classes outside `H`; terms
/// sharing a monomial shape but split in the derivation by which
/// arrival order realizes them are combined into a single constant.
pub fn closed_form_nu<S: Scalar>(
    measure: &Measure<S>,
    i: usize,
    removed_edge: &[usize],
) -> Result<S> {
    if removed_edge.len() != 3 || !removed_edge.contains(&i) {
        return Err(Error::BadParameters(format!(
            "node {i} must belong to the removed triple {removed_edge:?}"
        )));
    }
    let probs = measure.probs();
    let partners: Vec<usize> = removed_edge.iter().copied().filter(|&v| v != i).collect();
    let (a, b) = (partners[0], partners[1]);
    let outside: Vec<usize> = (1..=measure.q())
        .filter(|v| !removed_edge.contains(v))
        .collect();
    let all_but_i: Vec<usize> = (1..=measure.q()).filter(|&v| v != i).collect();
    let mi = mu(probs, i);
    let (ma, mb) = (mu(probs, a), mu(probs, b));
    let c = S::from_int;
    let mi2 = mi.clone() * mi.clone();
    let partner_lin = ma.clone() + mb.clone();
    let partner_sq = ma.clone() * ma.clone() + mb.clone() * mb.clone();
    let partner_cube =
        ma.clone() * ma.clone() * ma.clone() + mb.clone() * mb.clone() * mb.clone();
    let partner_mixed = ma.clone() * mb.clone() * partner_lin.clone();
    let partner_prod = ma * mb;

    Ok(c(8) * mi2.clone() * mi2.clone()
        + c(24) * mi2.clone() * mi.clone() * power_sum(probs, &all_but_i, 1)
        + c(24) * mi2.clone() * power_sum(probs, &all_but_i, 2)
        + c(8) * mi.clone() * power_sum(probs, &all_but_i, 3)
        - c(8) * partner_lin.clone() * power_sum(probs, &outside, 3)
        - c(24) * partner_mixed.clone() * power_sum(probs, &outside, 1)
        - c(48) * partner_prod.clone() * power_sum(probs, &outside, 2)
        - c(44) * partner_lin.clone() * sq_lin_ord(probs, &outside)
        + c(48) * mi2.clone() * partner_prod.clone()
        - c(88) * partner_prod * pair_sym(probs, &outside)
        - c(96) * partner_lin.clone() * triple_sym(probs, &outside)
        + c(24) * mi2.clone() * partner_lin * power_sum(probs, &outside, 1)
        + c(24) * mi2 * pair_sym(probs, &outside)
        - c(24) * partner_sq.clone() * power_sum(probs, &outside, 2)
        - c(44) * partner_sq * pair_sym(probs, &outside)
        - c(8) * partner_cube * power_sum(probs, &outside, 1)
        + c(24) * mi * partner_mixed
        - c(8) * cube_lin_ord(probs, &outside)
        - c(24) * sq_sq_sym(probs, &outside)
        - c(44) * sq_pair(probs, &outside)
        - c(96) * quad_sym(probs, &outside))
}

/// Closed-form per-class slopes on a two-class face whose support is not
/// contained in a removed edge: `2(μ(·) − μ(V ∖ {i, j}))` for each.
#[must_use]
pub fn closed_form_lambda_pair<S: Scalar>(measure: &Measure<S>, i: usize, j: usize) -> (S, S) {
    let rest: Vec<usize> = (1..=measure.q()).filter(|&v| v != i && v != j).collect();
    let rest_mass = measure.mass_of(&rest);
    let two = S::from_int(2);
    (
        two.clone() * (measure.prob(i).clone() - rest_mass.clone()),
        two * (measure.prob(j).clone() - rest_mass),
    )
}

/// Closed-form per-class slopes on a two-class face inside the removed
/// edge `removed_edge`: `2(μ(·) − μ(V ∖ H))` for each.
pub fn closed_form_nu_pair<S: Scalar>(
    measure: &Measure<S>,
    i: usize,
    j: usize,
    removed_edge: &[usize],
) -> Result<(S, S)> {
    if removed_edge.len() != 3 || !removed_edge.contains(&i) || !removed_edge.contains(&j) {
        return Err(Error::BadParameters(format!(
            "nodes {i},{j} must belong to the removed triple {removed_edge:?}"
        )));
    }
    let rest: Vec<usize> = (1..=measure.q())
        .filter(|v| !removed_edge.contains(v))
        .collect();
    let rest_mass = measure.mass_of(&rest);
    let two = S::from_int(2);
    Ok((
        two.clone() * (measure.prob(i).clone() - rest_mass.clone()),
        two * (measure.prob(j).clone() - rest_mass),
    ))
}

/// Closed-form per-class slopes on the three-class face of a removed
/// edge, where the two dominant coordinates behave like the pair case
/// and the smallest coordinate climbs at rate `2μ(small)`.
pub fn closed_form_triple<S: Scalar>(
    measure: &Measure<S>,
    removed_edge: &[usize],
    small: usize,
) -> Result<Vec<(usize, S)>> {
    if removed_edge.len() != 3 || !removed_edge.contains(&small) {
        return Err(Error::BadParameters(format!(
            "small node {small} must belong to the removed triple {removed_edge:?}"
        )));
    }
    let rest: Vec<usize> = (1..=measure.q())
        .filter(|v| !removed_edge.contains(v))
        .collect();
    let rest_mass = measure.mass_of(&rest);
    let two = S::from_int(2);
    Ok(removed_edge
        .iter()
        .map(|&v| {
            let slope = if v == small {
                two.clone() * measure.prob(v).clone()
            } else {
                two.clone() * (measure.prob(v).clone() - rest_mass.clone())
            };
            (v, slope)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Assembled coefficients and the regions S, A, S1
// ---------------------------------------------------------------------------

/// Which node set each closed-form family is evaluated on.
///
/// The slope criterion pairs one polynomial family with the nodes inside
/// removed edges and the other with the nodes outside. Only one pairing
/// is total — the `ν` polynomial needs a removed edge through its node —
/// and that pairing is the default. The swapped variant is kept
/// inspectable: it evaluates `λ` on the removed-edge nodes (where it
/// disagrees with the exact slopes) and leaves the outside nodes without
/// a closed form. Membership verdicts always use the exact slopes, so
/// the choice never changes a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SIndexAssignment {
    /// `λ` on nodes outside removed edges, `ν` inside (total; default).
    #[default]
    ProofSide,
    /// `λ` on removed-edge nodes only (partial; for comparison).
    DisplaySide,
}

/// A closed-form value attached to one node.
#[derive(Debug, Clone, PartialEq)]
pub struct SingletonClosedForm {
    /// The node.
    pub node: usize,
    /// Which polynomial family produced the value.
    pub form: CoefficientForm,
    /// The value.
    pub value: Rational,
}

/// The two closed-form coefficient families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientForm {
    /// Outside removed edges.
    Lambda,
    /// Inside a removed edge.
    Nu,
}

impl CoefficientForm {
    /// Stable display name.
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            CoefficientForm::Lambda => "lambda_i",
            CoefficientForm::Nu => "nu_i",
        }
    }
}

/// Closed-form slopes on a two-class face.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCoefficient {
    /// The two classes.
    pub nodes: (usize, usize),
    /// The removed edge containing both, when one exists.
    pub within_removed: Option<Vec<usize>>,
    /// Per-class slopes, in `nodes` order.
    pub slopes: (Rational, Rational),
}

/// Closed-form slopes on the three-class face of one removed edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleCoefficient {
    /// The removed edge.
    pub edge: Vec<usize>,
    /// Slope of each class when it is one of the two dominant ones.
    pub large: Vec<(usize, Rational)>,
    /// Slope of each class when it is the smallest one.
    pub small: Vec<(usize, Rational)>,
}

/// Exact per-face drift slopes with their closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftCoefficients {
    /// Which closed form was evaluated on which nodes.
    pub assignment: SIndexAssignment,
    /// The removed triples.
    pub removed: Vec<Vec<usize>>,
    /// Union of the removed triples, ascending.
    pub removed_nodes: Vec<usize>,
    /// Exact single-class-face slopes from the enumeration oracle,
    /// `(node, slope)` ascending by node. These decide membership.
    pub singleton_oracle: Vec<(usize, Rational)>,
    /// Closed-form values for the nodes the assignment covers.
    pub singleton_closed: Vec<SingletonClosedForm>,
    /// Largest absolute difference between an oracle slope and its
    /// closed form, over the covered nodes.
    pub max_singleton_deviation: f64,
    /// Closed-form two-class-face slopes for every unordered pair.
    pub pairs: Vec<PairCoefficient>,
    /// Closed-form three-class-face slopes, one entry per removed edge.
    pub triples: Vec<TripleCoefficient>,
}

fn require_drift_shape(h: &Hypergraph) -> Result<Vec<Vec<usize>>> {
    let shape = h
        .complete_minus_shape()
        .filter(|s| s.r == 3)
        .ok_or_else(|| {
            Error::BadFamily(
                "drift coefficients need a 3-uniform complete-minus hypergraph".to_string(),
            )
        })?;
    if h.q() < 5 {
        return Err(Error::BadParameters(format!(
            "drift coefficients need q >= 5 nodes, got {}",
            h.q()
        )));
    }
    Ok(shape.removed)
}

/// Computes the exact single-class-face slopes under match-the-longest
/// and evaluates the closed-form polynomials alongside.
pub fn drift_coefficients(
    h: &Hypergraph,
    measure: &Measure<Rational>,
    assignment: SIndexAssignment,
) -> Result<DriftCoefficients> {
    if measure.q() != h.q() {
        return Err(Error::BadParameters(format!(
            "measure has {} classes, hypergraph has {}",
            measure.q(),
            h.q()
        )));
    }
    let removed = require_drift_shape(h)?;
    let mut removed_nodes: Vec<usize> = removed.iter().flatten().copied().collect();
    removed_nodes.sort_unstable();
    let policy = PolicyKind::Ml;

    let mut singleton_oracle = Vec::with_capacity(h.q());
    for node in 1..=h.q() {
        let slopes = four_step_drift_slope(h, measure, &policy, &StateFamily::Singleton { node })?;
        singleton_oracle.push((node, slopes.per_node[0].1.clone()));
    }

    let removed_edge_of = |node: usize| removed.iter().find(|e| e.contains(&node));
    let mut singleton_closed = Vec::new();
    for node in 1..=h.q() {
        let entry = match (assignment, removed_edge_of(node)) {
            (SIndexAssignment::ProofSide, Some(edge)) => Some(SingletonClosedForm {
                node,
                form: CoefficientForm::Nu,
                value: closed_form_nu(measure, node, edge)?,
            }),
            (SIndexAssignment::ProofSide, None) => Some(SingletonClosedForm {
                node,
                form: CoefficientForm::Lambda,
                value: closed_form_lambda(measure, node),
            }),
            (SIndexAssignment::DisplaySide, Some(_)) => Some(SingletonClosedForm {
                node,
                form: CoefficientForm::Lambda,
                value: closed_form_lambda(measure, node),
            }),
            (SIndexAssignment::DisplaySide, None) => None,
        };
        if let Some(entry) = entry {
            singleton_closed.push(entry);
        }
    }
    let max_singleton_deviation = singleton_closed
        .iter()
        .map(|entry| {
            let oracle = &singleton_oracle[entry.node - 1].1;
            (oracle.clone() - entry.value.clone()).to_f64().abs()
        })
        .fold(0.0_f64, f64::max);

    let mut pairs = Vec::new();
    for i in 1..=h.q() {
        for j in (i + 1)..=h.q() {
            let containing = removed
                .iter()
                .find(|e| e.contains(&i) && e.contains(&j))
                .cloned();
            let slopes = match &containing {
                Some(edge) => closed_form_nu_pair(measure, i, j, edge)?,
                None => closed_form_lambda_pair(measure, i, j),
            };
            pairs.push(PairCoefficient {
                nodes: (i, j),
                within_removed: containing,
                slopes,
            });
        }
    }

    let mut triples = Vec::new();
    for edge in &removed {
        let mut large = Vec::new();
        let mut small = Vec::new();
        for &v in edge {
            let roles = closed_form_triple(measure, edge, v)?;
            for (node, slope) in roles {
                if node == v {
                    small.push((node, slope));
                } else if large.iter().all(|(n, _)| *n != node) {
                    large.push((node, slope));
                }
            }
        }
        large.sort_by_key(|&(n, _)| n);
        small.sort_by_key(|&(n, _)| n);
        triples.push(TripleCoefficient {
            edge: edge.clone(),
            large,
            small,
        });
    }

    Ok(DriftCoefficients {
        assignment,
        removed,
        removed_nodes,
        singleton_oracle,
        singleton_closed,
        max_singleton_deviation,
        pairs,
        triples,
    })
}

// ---------------------------------------------------------------------------
// The ratio region A and the assembled report
// ---------------------------------------------------------------------------

/// The fourth-power ratio bound defining the near-uniformity region on
/// `q` classes: membership requires
/// `(μ_max / μ_min)⁴ < (2q⁴ − 9q³ + 12q² − 13q + 12) / (6q² + 10q + 24)`.
///
/// The bound exceeds 1 exactly from `q = 5` on; below that the region is
/// empty.
#[must_use]
pub fn ratio_region_bound(q: usize) -> Rational {
    let q = q as i64;
    let num = 2 * q.pow(4) - 9 * q.pow(3) + 12 * q.pow(2) - 13 * q + 12;
    let den = 6 * q.pow(2) + 10 * q + 24;
    Rational::from_ratio(num, den)
}

/// Decides the near-uniformity region via exact fourth powers.
pub fn check_ratio_region(h: &Hypergraph, measure: &Measure<Rational>) -> Result<ConditionVerdict> {
    if measure.q() != h.q() {
        return Err(Error::BadParameters(format!(
            "measure has {} classes, hypergraph has {}",
            measure.q(),
            h.q()
        )));
    }
    let stats = measure.order_stats();
    let min_node = stats.ascending[0];
    let max_node = stats.ascending[h.q() - 1];
    let fourth = |x: &Rational| x.clone() * x.clone() * x.clone() * x.clone();
    let member = fourth(&stats.max) < ratio_region_bound(h.q()) * fourth(&stats.min);
    let witness = (!member).then_some(Witness::Extremes { min_node, max_node });
    Ok(ConditionVerdict {
        condition: ConditionName::A,
        member,
        witness,
    })
}

/// Membership report for the sufficient region `S` and its
/// near-uniformity subset `S1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SRegionReport {
    /// Negative slopes on every single-class face, plus the transversal
    /// and strict per-node mass bounds.
    pub s: ConditionVerdict,
    /// The near-uniformity ratio bound.
    pub a: ConditionVerdict,
    /// Ratio bound plus the same mass bounds.
    pub s1: ConditionVerdict,
    /// The slopes and closed forms backing the `S` verdict.
    pub coefficients: DriftCoefficients,
    /// `S1 ⊆ S` instantiated here: membership in `S1` implies
    /// membership in `S` for this instance.
    pub s1_implies_s_here: bool,
}

/// Decides the sufficient stability regions on a 3-uniform
/// complete-minus hypergraph with `q ≥ 5` nodes.
pub fn check_s_s1(
    h: &Hypergraph,
    measure: &Measure<Rational>,
    assignment: SIndexAssignment,
) -> Result<SRegionReport> {
    let coefficients = drift_coefficients(h, measure, assignment)?;
    let n2 = check_n2(h, measure)?;
    let n3 = check_n3(h, measure)?;

    let removed_edge_of =
        |node: usize| coefficients.removed.iter().any(|e| e.contains(&node));
    let zero = Rational::from_int(0);
    let bad_slope = coefficients
        .singleton_oracle
        .iter()
        .find(|(_, slope)| *slope >= zero);
    let s_witness = match bad_slope {
        Some((node, _)) => Some(Witness::Coefficient {
            name: if removed_edge_of(*node) {
                CoefficientForm::Nu.name().to_string()
            } else {
                CoefficientForm::Lambda.name().to_string()
            },
            node: *node,
        }),
        None if !n2.member => n2.witness.clone(),
        None if !n3.minus.member => n3.minus.witness.clone(),
        None => None,
    };
    let s = ConditionVerdict {
        condition: ConditionName::S,
        member: s_witness.is_none(),
        witness: s_witness,
    };

    let a = check_ratio_region(h, measure)?;
    let s1_witness = if !a.member {
        a.witness.clone()
    } else if !n2.member {
        n2.witness.clone()
    } else if !n3.minus.member {
        n3.minus.witness.clone()
    } else {
        None
    };
    let s1 = ConditionVerdict {
        condition: ConditionName::S1,
        member: s1_witness.is_none(),
        witness: s1_witness,
    };

    let s1_implies_s_here = !s1.member || s.member;
    Ok(SRegionReport {
        s,
        a,
        s1,
        coefficients,
        s1_implies_s_here,
    })
}
