//! The acceptance gate: ten end-to-end criteria, one test each.
//!
//! Every test prints a single `criterion NN: PASS/FAIL` line (visible
//! with `--nocapture`) and asserts the criterion in full. The criteria
//! pin the deterministic replay trace, cross-validate every analytical
//! closed form against exact enumeration, compare the simulator to the
//! truncated-chain oracle, and check the classifier's verdicts on the
//! reference instances.

mod common;

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{
    assert_n1_agrees, assert_n2_agrees, assert_n3_agrees, corpus, fano_minus_457,
    random_rational_measure,
};
use hypermatch_core::dynamics::{
    admissible, replay, step, CountBasis, ModelState, PolicyKind, PolicySpec, TieRng,
};
use hypermatch_core::measure::ClassSampler;
use hypermatch_core::oracle::{four_step_drift_slope, truncated_stationary, StateFamily};
use hypermatch_core::regions::{
    check_s_s1, complete3_region, drift_coefficients, lyapunov_witness, Complete3Verdict,
    SIndexAssignment,
};
use hypermatch_core::sim::{replicate_and_classify, SimConfig, SimVerdict};
use hypermatch_core::stability::{
    check_n3, classify_nonstabilizable, CycleDescription, InstabilityTrigger,
};
use hypermatch_core::{generate, Family, Hypergraph, Measure, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Runs one criterion body and prints its pass/fail line.
fn criterion<F: FnOnce()>(n: u32, what: &str, body: F) {
    let outcome = catch_unwind(AssertUnwindSafe(body));
    match &outcome {
        Ok(()) => println!("criterion {n:02}: PASS — {what}"),
        Err(_) => println!("criterion {n:02}: FAIL — {what}"),
    }
    if let Err(payload) = outcome {
        resume_unwind(payload);
    }
}

fn complete(q: usize, r: usize) -> Hypergraph {
    generate(&Family::Complete { q, r }).expect("valid family")
}

fn complete_minus(q: usize, removed: &[Vec<usize>]) -> Hypergraph {
    generate(&Family::CompleteMinus {
        q,
        r: 3,
        removed: removed.to_vec(),
    })
    .expect("valid family")
}

fn policy(kind: PolicyKind, seed: u64) -> PolicySpec {
    PolicySpec {
        kind,
        seed,
        count_basis: CountBasis::PreArrival,
    }
}

#[test]
fn criterion_01_deterministic_replay_of_a_known_trace() {
    criterion(
        1,
        "first-come replay reproduces the worked trace step by step",
        || {
            let h = complete(4, 3);
            let arrivals = [2, 3, 4, 1, 1, 2, 3, 3, 4, 2, 2];
            let started = Instant::now();
            let outcomes = replay(&h, &policy(PolicyKind::Fcfm, 0), &arrivals).unwrap();
            let elapsed = started.elapsed();
            assert_eq!(outcomes.len(), arrivals.len());
            for (i, outcome) in outcomes.iter().enumerate() {
                match i + 1 {
                    3 => assert_eq!(outcome.matched.as_deref(), Some(&[2, 3, 4][..])),
                    7 => assert_eq!(outcome.matched.as_deref(), Some(&[1, 2, 3][..])),
                    9 => assert_eq!(outcome.matched.as_deref(), Some(&[1, 3, 4][..])),
                    _ => assert_eq!(outcome.matched, None, "unexpected match at step {}", i + 1),
                }
            }
            let last = &outcomes.last().unwrap().new_state;
            assert_eq!(last.counts(), vec![0, 2, 0, 0]);
            assert_eq!(last.buffer_word(), vec![2, 2]);
            assert!(elapsed < Duration::from_secs(1), "replay took {elapsed:?}");
        },
    );
}

#[test]
fn criterion_02_complete3_region_equals_strict_per_class_bound() {
    criterion(
        2,
        "exact region of complete 3-uniform instances coincides with the strict per-class bound",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
            let mut disagreements = 0usize;
            for q in [4usize, 5, 6] {
                let h = complete(q, 3);
                for _ in 0..1000 {
                    let m = random_rational_measure(q, &mut rng);
                    let region = complete3_region(&h, &m).unwrap();
                    let n3 = check_n3(&h, &m).unwrap();
                    let agree = match &region {
                        Complete3Verdict::Stable => n3.minus.member,
                        Complete3Verdict::NotStable { .. } => !n3.minus.member,
                        Complete3Verdict::Inapplicable { reason } => {
                            panic!("complete({q},3) must be applicable: {reason}")
                        }
                    };
                    if !agree {
                        disagreements += 1;
                    }
                }
            }
            assert_eq!(disagreements, 0);
        },
    );
}

/// The slope a closed-form table assigns to `node`.
fn slope_of(table: &[(usize, Rational)], node: usize) -> &Rational {
    &table
        .iter()
        .find(|(n, _)| *n == node)
        .unwrap_or_else(|| panic!("node {node} missing from closed-form table"))
        .1
}

#[test]
fn criterion_03_closed_forms_match_the_enumeration_oracle() {
    criterion(
        3,
        "single-, two- and three-class closed forms agree with exact four-arrival enumeration",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(0xFACADE);
            for q in [5usize, 6, 7] {
                for edges_removed in [1usize, 2] {
                    if 3 * edges_removed > q {
                        continue;
                    }
                    let removed: Vec<Vec<usize>> = (0..edges_removed)
                        .map(|i| vec![3 * i + 1, 3 * i + 2, 3 * i + 3])
                        .collect();
                    let h = complete_minus(q, &removed);
                    for _ in 0..20 {
                        let m = random_rational_measure(q, &mut rng);
                        let c =
                            drift_coefficients(&h, &m, SIndexAssignment::ProofSide).unwrap();
                        // Single-class faces: closed form within 1e-9 of
                        // the oracle, every node covered.
                        assert_eq!(c.singleton_closed.len(), q);
                        assert!(
                            c.max_singleton_deviation <= 1e-9,
                            "singleton deviation {} at q={q}, removed={removed:?}",
                            c.max_singleton_deviation
                        );
                        // Two-class faces: exact rational agreement.
                        for p in &c.pairs {
                            let oracle = four_step_drift_slope(
                                &h,
                                &m,
                                &PolicyKind::Ml,
                                &StateFamily::Pair { nodes: p.nodes },
                            )
                            .unwrap();
                            assert_eq!(oracle.per_node[0], (p.nodes.0, p.slopes.0.clone()));
                            assert_eq!(oracle.per_node[1], (p.nodes.1, p.slopes.1.clone()));
                        }
                        // Three-class faces: exact agreement in all three
                        // small-coordinate rotations.
                        for t in &c.triples {
                            let [a, b, s] = [t.edge[0], t.edge[1], t.edge[2]];
                            for (x, y, z) in [(a, b, s), (b, s, a), (s, a, b)] {
                                let oracle = four_step_drift_slope(
                                    &h,
                                    &m,
                                    &PolicyKind::Ml,
                                    &StateFamily::Triple { nodes: (x, y, z) },
                                )
                                .unwrap();
                                assert_eq!(
                                    oracle.per_node,
                                    vec![
                                        (x, slope_of(&t.large, x).clone()),
                                        (y, slope_of(&t.large, y).clone()),
                                        (z, slope_of(&t.small, z).clone()),
                                    ],
                                    "triple rotation ({x},{y},{z}) at q={q}"
                                );
                            }
                        }
                    }
                }
            }
        },
    );
}

#[test]
fn criterion_04_conditions_match_brute_force_within_a_minute() {
    criterion(
        4,
        "membership checks equal definition-level brute force across the corpus",
        || {
            let started = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(0xACCE5);
            for (label, h) in &corpus() {
                let mut measures = vec![Measure::<Rational>::uniform(h.q())];
                for _ in 0..50 {
                    measures.push(random_rational_measure(h.q(), &mut rng));
                }
                for m in &measures {
                    assert_n1_agrees(label, h, m);
                    assert_n2_agrees(label, h, m);
                    assert_n3_agrees(label, h, m);
                }
            }
            let elapsed = started.elapsed();
            assert!(
                elapsed < Duration::from_secs(60),
                "brute-force sweep took {elapsed:?}"
            );
        },
    );
}

#[test]
fn criterion_05_classifier_flags_known_families_and_stays_quiet_on_complete() {
    criterion(
        5,
        "structural classifier fires on each reference construction and only there",
        || {
            // Seven-point plane minus one edge: a one-versus-rest split.
            let triggers = classify_nonstabilizable(&fano_minus_457(), None).unwrap();
            assert!(
                triggers
                    .iter()
                    .any(|t| matches!(t, InstabilityTrigger::RUniformBipartite { .. })),
                "expected the bipartite split, got {triggers:?}"
            );

            // Circular windows with the natural ordering.
            let h = generate(&Family::Cycle { q: 12, r: 3, l: 2 }).unwrap();
            let hint = CycleDescription {
                ordering: (1..=12).collect(),
                overlap: 2,
            };
            let triggers = classify_nonstabilizable(&h, Some(&hint)).unwrap();
            assert!(
                triggers.iter().any(|t| matches!(
                    t,
                    InstabilityTrigger::CyclicCover {
                        r: 3,
                        q: 12,
                        overlap: 2
                    }
                )),
                "expected the circular-window trigger, got {triggers:?}"
            );

            // A star: one node meets every edge.
            let h = generate(&Family::Star {
                q: 5,
                edges: vec![vec![1, 2, 3], vec![1, 4, 5]],
            })
            .unwrap();
            let triggers = classify_nonstabilizable(&h, None).unwrap();
            assert!(
                triggers.iter().any(|t| matches!(
                    t,
                    InstabilityTrigger::UniformMeasureTransversal {
                        transversal_number: 1,
                        ..
                    }
                )),
                "expected the small-transversal trigger, got {triggers:?}"
            );

            // An edge carrying two degree-one nodes.
            let h = Hypergraph::validate(
                6,
                &[vec![1, 2, 3, 4], vec![4, 5], vec![5, 6]],
            )
            .unwrap();
            let triggers = classify_nonstabilizable(&h, None).unwrap();
            assert!(
                triggers.iter().any(|t| matches!(
                    t,
                    InstabilityTrigger::TwoDegreeOneNodes { .. }
                )),
                "expected the two-degree-one trigger, got {triggers:?}"
            );

            // Complete 3-uniform instances carry no trigger at all.
            for q in [4usize, 5, 6] {
                let triggers = classify_nonstabilizable(&complete(q, 3), None).unwrap();
                assert!(
                    triggers.is_empty(),
                    "complete({q},3) unexpectedly triggered: {triggers:?}"
                );
            }
        },
    );
}

#[test]
fn criterion_06_quadratic_witness_valid_across_the_grid() {
    criterion(
        6,
        "quadratic-form witness is negative in all four directions on a 200-point ratio grid",
        || {
            let started = Instant::now();
            // 200 evenly spaced rationals strictly inside (1/100, 333/1000).
            for k in 0..200i64 {
                let alpha = Rational::from_ratio(1, 100)
                    + Rational::from_ratio(323 * (k + 1), 201_000);
                let w = lyapunov_witness(&alpha).unwrap();
                for (i, d) in w.directional.iter().enumerate() {
                    assert!(
                        *d < Rational::from_int(0),
                        "direction {i} fails at alpha = {}",
                        alpha.render()
                    );
                }
                assert!(w.all_negative);
                assert!(w.positive_definite, "form degenerate at {}", alpha.render());
            }
            assert!(lyapunov_witness(&Rational::from_ratio(1, 3)).is_err());
            let elapsed = started.elapsed();
            assert!(
                elapsed < Duration::from_secs(1),
                "grid sweep took {elapsed:?}"
            );
        },
    );
}

#[test]
fn criterion_07_simulation_mean_matches_truncated_chain() {
    criterion(
        7,
        "long-run simulated buffer mean sits within 5% of the truncated-chain oracle",
        || {
            let h = complete(4, 3);
            let m = Measure::<f64>::uniform(4);
            let tight = truncated_stationary(&h, &m, &PolicyKind::Ml, 30).unwrap();
            let loose = truncated_stationary(&h, &m, &PolicyKind::Ml, 60).unwrap();
            let cap_shift =
                (loose.mean_total_count - tight.mean_total_count).abs() / tight.mean_total_count;
            assert!(
                cap_shift < 0.01,
                "doubling the cap moved the oracle mean by {cap_shift:.4}"
            );

            let report = replicate_and_classify(
                &h,
                &m,
                &policy(PolicyKind::Ml, 7),
                &SimConfig::new(1_000_000, 7),
                20,
            )
            .unwrap();
            let sim_mean = report
                .reps
                .iter()
                .map(|r| r.final_window_mean)
                .sum::<f64>()
                / report.reps.len() as f64;
            let gap = (sim_mean - tight.mean_total_count).abs() / tight.mean_total_count;
            assert!(
                gap < 0.05,
                "simulated mean {sim_mean:.4} vs oracle {:.4} (gap {gap:.4})",
                tight.mean_total_count
            );
        },
    );
}

#[test]
fn criterion_08_ensemble_verdicts_on_reference_instances() {
    criterion(
        8,
        "replicated ensembles classify the reference stable and transient instances",
        || {
            let started = Instant::now();
            let h4 = complete(4, 3);
            let uniform = Measure::<f64>::uniform(4);
            let horizon = SimConfig::new(1_000_000, 20_260_823);

            for (i, kind) in [
                PolicyKind::Fcfm,
                PolicyKind::Lcfm,
                PolicyKind::Ml,
                PolicyKind::Ms,
            ]
            .into_iter()
            .enumerate()
            {
                let report =
                    replicate_and_classify(&h4, &uniform, &policy(kind.clone(), i as u64), &horizon, 20)
                        .unwrap();
                assert_eq!(
                    report.verdict,
                    SimVerdict::StableLike,
                    "uniform arrivals under {kind:?} were not classified stable"
                );
                assert!(report.contained_fraction >= 0.9);
            }

            let heavy = Measure::make(&[0.4, 0.2, 0.2, 0.2]).unwrap();
            let report =
                replicate_and_classify(&h4, &heavy, &policy(PolicyKind::Ml, 40), &horizon, 20)
                    .unwrap();
            assert_eq!(report.verdict, SimVerdict::TransientLike);
            assert!(report.growing_fraction >= 0.9);
            let mean_slope =
                report.reps.iter().map(|r| r.slope).sum::<f64>() / report.reps.len() as f64;
            assert!(
                mean_slope >= 0.05,
                "overloaded instance grew at only {mean_slope:.4} per arrival"
            );

            let h6 = complete_minus(6, &[vec![1, 2, 3], vec![4, 5, 6]]);
            let report = replicate_and_classify(
                &h6,
                &Measure::<f64>::uniform(6),
                &policy(PolicyKind::Ml, 60),
                &horizon,
                20,
            )
            .unwrap();
            assert_eq!(report.verdict, SimVerdict::StableLike);
            assert!(report.contained_fraction >= 0.9);

            let elapsed = started.elapsed();
            assert!(
                elapsed < Duration::from_secs(600),
                "ensemble sweep took {elapsed:?}"
            );
        },
    );
}

#[test]
fn criterion_09_per_step_conservation_and_admissibility() {
    criterion(
        9,
        "flow conservation and buffer admissibility hold after every single arrival",
        || {
            let h = complete(4, 3);
            let m = Measure::<f64>::uniform(4);
            let spec = policy(PolicyKind::Ml, 99);
            let sampler = ClassSampler::new(&m);
            let mut arrival_rng = ChaCha8Rng::seed_from_u64(0x424242);
            let mut subset_rng = ChaCha8Rng::seed_from_u64(0x31337);
            let mut ties = TieRng::new(spec.seed);

            let full = (1u32 << h.q()) - 1;
            let mut masks = vec![full];
            for _ in 0..20 {
                masks.push(subset_rng.gen::<u32>() & full);
            }
            // Net flow per audited subset: arrivals in minus matched out.
            let mut net = vec![0i128; masks.len()];

            let mut state = ModelState::new(h.q());
            let mut violations = 0usize;
            for _ in 0..20_000 {
                let arrival = sampler.sample(&mut arrival_rng);
                let event = step(&h, &mut state, arrival, &spec, &mut ties).unwrap();
                let arrival_bit = 1u32 << (arrival - 1);
                let matched_mask = event.matched_edge.map(|e| h.masks()[e]);
                for (tally, &mask) in net.iter_mut().zip(&masks) {
                    if mask & arrival_bit != 0 {
                        *tally += 1;
                    }
                    if let Some(em) = matched_mask {
                        *tally -= i128::from((em & mask).count_ones());
                    }
                }
                if !admissible(&h, &state) {
                    violations += 1;
                }
                let counts = state.counts();
                for (tally, &mask) in net.iter().zip(&masks) {
                    let buffered: i128 = counts
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, &c)| i128::from(c))
                        .sum();
                    if buffered != *tally {
                        violations += 1;
                    }
                }
            }
            assert_eq!(violations, 0, "audit failures over 20000 audited steps");
        },
    );
}

#[test]
fn criterion_10_uniform_complete_minus_in_s1_for_growing_q() {
    criterion(
        10,
        "uniform arrivals on complete-minus instances with maximal disjoint removals sit in S1",
        || {
            let started = Instant::now();
            for q in 5usize..=10 {
                let removed: Vec<Vec<usize>> = (0..q / 3)
                    .map(|i| vec![3 * i + 1, 3 * i + 2, 3 * i + 3])
                    .collect();
                let h = complete_minus(q, &removed);
                let m = Measure::<Rational>::uniform(q);
                let report = check_s_s1(&h, &m, SIndexAssignment::ProofSide).unwrap();
                assert!(report.s1.member, "q = {q} fell outside S1");
                assert!(report.s.member, "q = {q} fell outside S");
                assert!(report.s1_implies_s_here);
            }
            let elapsed = started.elapsed();
            assert!(
                elapsed < Duration::from_secs(60),
                "region sweep took {elapsed:?}"
            );
        },
    );
}
