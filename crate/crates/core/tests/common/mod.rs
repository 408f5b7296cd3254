//! Definition-level baselines shared by the integration tests.
//!
//! Every check here re-derives its verdict straight from the defining
//! inequality — plain loops over all subsets — with none of the
//! incremental bookkeeping the library uses. Agreement between the two
//! is what the tests assert, so these must stay naive.

// Each integration-test binary includes this module separately and uses
// a different slice of it.
#![allow(dead_code)]

use hypermatch_core::hypergraph::{mask_of, nodes_of_mask};
use hypermatch_core::stability::Witness;
use hypermatch_core::{Family, Hypergraph, Measure, Rational, Scalar};
use rand::Rng;

/// The reference instances: complete uniform designs, the seven-point
/// plane with and without one edge, stars, and circular window families,
/// all small enough for full subset enumeration.
#[must_use]
pub fn corpus() -> Vec<(&'static str, Hypergraph)> {
    let gen = |f: &Family| hypermatch_core::generate(f).expect("corpus family is valid");
    vec![
        ("complete(4,3)", gen(&Family::Complete { q: 4, r: 3 })),
        ("complete(5,3)", gen(&Family::Complete { q: 5, r: 3 })),
        ("complete(6,3)", gen(&Family::Complete { q: 6, r: 3 })),
        ("complete(4,2)", gen(&Family::Complete { q: 4, r: 2 })),
        ("fano", gen(&Family::Fano)),
        ("fano-minus-one-edge", fano_minus_457()),
        (
            "star(5)",
            gen(&Family::Star {
                q: 5,
                edges: vec![vec![1, 2, 3], vec![1, 4, 5]],
            }),
        ),
        (
            "star(7)",
            gen(&Family::Star {
                q: 7,
                edges: vec![vec![1, 2, 3], vec![1, 4, 5], vec![1, 6, 7]],
            }),
        ),
        ("cycle(6,3,2)", gen(&Family::Cycle { q: 6, r: 3, l: 2 })),
        ("cycle(8,3,1)", gen(&Family::Cycle { q: 8, r: 3, l: 1 })),
        ("cycle(8,4,2)", gen(&Family::Cycle { q: 8, r: 4, l: 2 })),
    ]
}

/// The seven-point plane with the edge `{4, 5, 7}` removed.
#[must_use]
pub fn fano_minus_457() -> Hypergraph {
    let edges = vec![
        vec![1, 2, 4],
        vec![1, 5, 6],
        vec![1, 3, 7],
        vec![2, 3, 5],
        vec![3, 4, 6],
        vec![2, 6, 7],
    ];
    Hypergraph::validate(7, &edges).expect("six-edge plane is valid")
}

/// A measure with integer weights drawn uniformly from `1..=1000`.
pub fn random_rational_measure<R: Rng>(q: usize, rng: &mut R) -> Measure<Rational> {
    let weights: Vec<Rational> = (0..q)
        .map(|_| Rational::from_int(rng.gen_range(1..=1000)))
        .collect();
    Measure::make(&weights).expect("positive weights")
}

/// The node-set mask of a subset or transversal witness.
#[must_use]
pub fn witness_mask(w: &Witness) -> u32 {
    match w {
        Witness::Subset { nodes } | Witness::Transversal { nodes } => mask_of(nodes),
        other => panic!("expected a node-set witness, got {other:?}"),
    }
}

fn mass(measure: &Measure<Rational>, mask: u32) -> Rational {
    nodes_of_mask(mask)
        .iter()
        .fold(Rational::from_int(0), |acc, &v| {
            acc + measure.prob(v).clone()
        })
}

fn edge_min(measure: &Measure<Rational>, edge_mask: u32) -> Rational {
    nodes_of_mask(edge_mask)
        .iter()
        .map(|&v| measure.prob(v).clone())
        .min()
        .expect("edges are nonempty")
}

/// First violating subsets of the three subset-flow bounds, scanning all
/// subset masks in ascending order.
///
/// Returned in order: weak bound over all subsets, strict bound over
/// subsets doubly met by some edge, strict bound with edge minima taken
/// outside the subset (proper subsets only, vacuous when the subset
/// swallows an edge).
pub fn brute_n1(
    h: &Hypergraph,
    measure: &Measure<Rational>,
) -> (Option<u32>, Option<u32>, Option<u32>) {
    let full = (1u32 << h.q()) - 1;
    let mut plus = None;
    let mut minus = None;
    let mut minus_minus = None;
    for mask in 1..=full {
        let lhs = mass(measure, mask);
        let rhs: Rational = h.masks().iter().fold(Rational::from_int(0), |acc, &em| {
            let met = (em & mask).count_ones() as i64;
            acc + Rational::from_int(met) * edge_min(measure, em)
        });
        if plus.is_none() && lhs > rhs {
            plus = Some(mask);
        }
        let doubly_met = h.masks().iter().any(|&em| (em & mask).count_ones() >= 2);
        if minus.is_none() && doubly_met && lhs >= rhs {
            minus = Some(mask);
        }
        if minus_minus.is_none() && mask != full {
            let swallowed = h.masks().iter().any(|&em| em & mask == em);
            if !swallowed {
                let rhs_outside: Rational =
                    h.masks().iter().fold(Rational::from_int(0), |acc, &em| {
                        let met = (em & mask).count_ones() as i64;
                        if met == 0 {
                            return acc;
                        }
                        acc + Rational::from_int(met) * edge_min(measure, em & !mask)
                    });
                if lhs >= rhs_outside {
                    minus_minus = Some(mask);
                }
            }
        }
    }
    (plus, minus, minus_minus)
}

/// First transversal (ascending mask order) whose mass fails to exceed
/// `1/rank`, from a scan over all subsets.
pub fn brute_n2(h: &Hypergraph, measure: &Measure<Rational>) -> Option<u32> {
    let full = (1u32 << h.q()) - 1;
    let bound = Rational::from_ratio(1, h.rank() as i64);
    (1..=full).find(|&mask| {
        let transversal = h.masks().iter().all(|&em| em & mask != 0);
        transversal && mass(measure, mask) <= bound
    })
}

/// Whether `mask` is a transversal no proper subset of which is one.
#[must_use]
pub fn is_minimal_transversal(h: &Hypergraph, mask: u32) -> bool {
    if h.masks().iter().any(|&em| em & mask == 0) {
        return false;
    }
    nodes_of_mask(mask).iter().all(|&v| {
        let without = mask & !(1 << (v - 1));
        h.masks().iter().any(|&em| em & without == 0)
    })
}

/// First nodes violating the weak and strict per-class mass bounds
/// against `1/anti_rank`.
pub fn brute_n3(h: &Hypergraph, measure: &Measure<Rational>) -> (Option<usize>, Option<usize>) {
    let bound = Rational::from_ratio(1, h.anti_rank() as i64);
    let plus = (1..=h.q()).find(|&i| *measure.prob(i) > bound);
    let minus = (1..=h.q()).find(|&i| *measure.prob(i) >= bound);
    (plus, minus)
}

/// Asserts that the subset-flow verdicts and first witnesses equal the
/// brute-force ones.
pub fn assert_n1_agrees(label: &str, h: &Hypergraph, measure: &Measure<Rational>) {
    let report =
        hypermatch_core::stability::check_n1(h, measure).expect("fits the exhaustive guard");
    let (plus, minus, minus_minus) = brute_n1(h, measure);
    let pairs = [
        ("weak subset bound", plus, &report.plus),
        ("strict doubly-met bound", minus, &report.minus),
        ("outside-minimum bound", minus_minus, &report.minus_minus),
    ];
    for (what, brute, verdict) in pairs {
        assert_eq!(
            verdict.member,
            brute.is_none(),
            "{label}: {what} membership disagrees with brute force"
        );
        assert_eq!(
            verdict.witness.as_ref().map(witness_mask),
            brute,
            "{label}: {what} witness disagrees with brute force"
        );
    }
}

/// Asserts that the transversal-mass verdict matches brute force and
/// that any witness is a minimal transversal violating the bound.
pub fn assert_n2_agrees(label: &str, h: &Hypergraph, measure: &Measure<Rational>) {
    let verdict =
        hypermatch_core::stability::check_n2(h, measure).expect("fits the exhaustive guard");
    let brute = brute_n2(h, measure);
    assert_eq!(
        verdict.member,
        brute.is_none(),
        "{label}: transversal-mass membership disagrees with brute force"
    );
    if let Some(w) = &verdict.witness {
        let mask = witness_mask(w);
        assert!(
            is_minimal_transversal(h, mask),
            "{label}: reported witness is not a minimal transversal"
        );
        let bound = Rational::from_ratio(1, h.rank() as i64);
        assert!(
            mass(measure, mask) <= bound,
            "{label}: reported witness does not violate the mass bound"
        );
    }
}

/// Asserts that both per-class verdicts and witnesses equal the
/// brute-force ones.
pub fn assert_n3_agrees(label: &str, h: &Hypergraph, measure: &Measure<Rational>) {
    let report =
        hypermatch_core::stability::check_n3(h, measure).expect("measure sized to hypergraph");
    let (plus, minus) = brute_n3(h, measure);
    let node_of = |w: &Witness| match w {
        Witness::Node { node } => *node,
        other => panic!("expected a node witness, got {other:?}"),
    };
    assert_eq!(report.plus.member, plus.is_none(), "{label}: weak per-class bound");
    assert_eq!(
        report.plus.witness.as_ref().map(node_of),
        plus,
        "{label}: weak per-class witness"
    );
    assert_eq!(report.minus.member, minus.is_none(), "{label}: strict per-class bound");
    assert_eq!(
        report.minus.witness.as_ref().map(node_of),
        minus,
        "{label}: strict per-class witness"
    );
}
