//! Monte-Carlo simulation of the matching buffer with built-in
//! conservation auditing and a conservative growth classifier.
//!
//! A trajectory feeds i.i.d. arrivals into [`crate::dynamics::step`] and
//! records enough aggregates to judge long-run behavior:
//!
//! * window means of the total buffer size over the second quarter
//!   (`[h/4, h/2)`) and the second half (`[h/2, h)`) of the horizon;
//! * a least-squares growth slope over evenly spaced checkpoints in the
//!   second half;
//! * visits to the empty buffer and the mean spacing between them.
//!
//! At every checkpoint the run audits itself: the buffer content of a
//! class subset must equal its arrival count minus the matches weighted
//! by how many subset classes each matched edge consumes. The audit runs
//! over the full class set and a batch of seed-derived random subsets,
//! and any discrepancy aborts the run with
//! [`Error::ConservationViolated`] — a failed audit means the dynamics
//! are wrong, not the statistics.
//!
//! Replication derives per-repetition seeds from the base seed with a
//! fixed mixing function, runs repetitions in parallel, and issues a
//! deliberately coarse verdict: `transient_like` needs at least 90% of
//! repetitions growing, `stable_like` needs at least 90% with a
//! contained second half plus an empty-buffer return in every
//! repetition, anything else is `inconclusive`.

use crate::dynamics::{admissible, step, ModelState, PolicySpec, TieRng};
use crate::error::{Error, Result};
use crate::hypergraph::{nodes_of_mask, Hypergraph};
use crate::measure::{ClassSampler, Measure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Slope above which a repetition counts as growing (buffer items per
/// arrival).
pub const GROWTH_SLOPE: f64 = 0.01;
/// A repetition is contained when the second-half mean does not exceed
/// this multiple of the second-quarter mean.
pub const CONTAINMENT_FACTOR: f64 = 2.0;
/// Fraction of repetitions that must agree for a non-inconclusive
/// verdict.
pub const VERDICT_QUORUM: f64 = 0.9;
/// Smallest number of repetitions accepted by the classifier.
pub const MIN_REPLICATIONS: usize = 8;

/// Trajectory parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of arrivals to simulate.
    pub horizon: u64,
    /// Seed of the arrival stream (and of the audit subsets).
    pub seed: u64,
    /// Number of checkpoints spread over the second half.
    pub checkpoints: usize,
    /// Number of random subsets audited for conservation, in addition
    /// to the full class set.
    pub conservation_subsets: usize,
}

impl SimConfig {
    /// Default audit and checkpoint density for a given horizon & seed.
    #[must_use]
    pub fn new(horizon: u64, seed: u64) -> Self {
        SimConfig {
            horizon,
            seed,
            checkpoints: 256,
            conservation_subsets: 20,
        }
    }
}

/// Mixes a base seed and a stream index into an independent seed.
///
/// The constants are the standard 64-bit splitmix finalizer, so distinct
/// streams decorrelate even for adjacent indices.
#[must_use]
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Aggregates of one simulated trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    /// Arrivals simulated.
    pub horizon: u64,
    /// Seed that drove the arrival stream.
    pub arrival_seed: u64,
    /// Seed that drove tie-breaking.
    pub tie_seed: u64,
    /// Buffer size after the last arrival.
    pub final_total: u64,
    /// Largest buffer size seen.
    pub max_total: u64,
    /// `(step, total)` at evenly spaced steps of the second half.
    pub checkpoints: Vec<(u64, u64)>,
    /// Mean total over steps in `[h/4, h/2)`.
    pub mid_window_mean: f64,
    /// Mean total over steps in `[h/2, h)`.
    pub final_window_mean: f64,
    /// Least-squares slope of total against step over the checkpoints.
    pub slope: f64,
    /// Number of times the buffer returned to empty.
    pub empty_returns: u64,
    /// Mean number of arrivals between consecutive empty-buffer visits,
    /// when at least two occurred.
    pub mean_return_time: Option<f64>,
    /// Arrival counts per class.
    pub arrivals_per_class: Vec<u64>,
    /// Match counts per hyperedge (canonical order).
    pub matches_per_edge: Vec<u64>,
}

/// Verifies `Σ_{i∈B} X(i) = Σ_{i∈B} A(i) − Σ_H |H ∩ B| · M(H)` for one
/// subset mask.
fn conservation_holds(
    h: &Hypergraph,
    mask: u32,
    counts: &[u64],
    arrivals: &[u64],
    matches: &[u64],
) -> bool {
    let in_mask = |i: usize| mask & (1u32 << i) != 0;
    let lhs: i128 = (0..h.q()).filter(|&i| in_mask(i)).map(|i| counts[i] as i128).sum();
    let arrived: i128 = (0..h.q())
        .filter(|&i| in_mask(i))
        .map(|i| arrivals[i] as i128)
        .sum();
    let consumed: i128 = h
        .masks()
        .iter()
        .zip(matches)
        .map(|(&em, &mn)| ((em & mask).count_ones() as i128) * mn as i128)
        .sum();
    lhs == arrived - consumed
}

/// Runs one trajectory.
///
/// The arrival stream is seeded from `config.seed`; tie-breaking from
/// `policy.seed`. Identical inputs give an identical summary.
pub fn run(
    h: &Hypergraph,
    measure: &Measure<f64>,
    policy: &PolicySpec,
    config: &SimConfig,
) -> Result<TrajectorySummary> {
    policy.validate_for(h)?;
    if measure.q() != h.q() {
        return Err(Error::BadParameters(format!(
            "measure has {} classes, hypergraph has {}",
            measure.q(),
            h.q()
        )));
    }
    if config.horizon < 16 {
        return Err(Error::BadParameters(
            "simulation horizon must be at least 16 arrivals".to_string(),
        ));
    }

    let q = h.q();
    let full = (1u32 << q) - 1;
    let sampler = ClassSampler::new(measure);
    let mut arrival_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ties = TieRng::new(policy.seed);
    let mut state = ModelState::new(q);
    let mut arrivals_per_class = vec![0u64; q];
    let mut matches_per_edge = vec![0u64; h.edge_count()];

    // Audit subsets: the full class set plus seed-derived random ones.
    let mut audit_masks = vec![full];
    let mut mask_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0xC0A5_E27A));
    while audit_masks.len() < 1 + config.conservation_subsets {
        let mask = mask_rng.gen::<u32>() & full;
        if mask != 0 {
            audit_masks.push(mask);
        }
    }

    // Checkpoints: evenly spaced over the second half, ending at h.
    let half = config.horizon / 2;
    let n_cp = config.checkpoints.clamp(2, half.max(2) as usize) as u64;
    let checkpoint_steps: Vec<u64> = (1..=n_cp)
        .map(|k| half + k * (config.horizon - half) / n_cp)
        .collect();
    let mut next_cp = 0usize;
    let mut checkpoints = Vec::with_capacity(checkpoint_steps.len());

    let mid_range = (config.horizon / 4)..(config.horizon / 2);
    let final_range = (config.horizon / 2)..config.horizon;
    let mut mid_sum: u128 = 0;
    let mut final_sum: u128 = 0;
    let mut max_total = 0u64;
    let mut empty_returns = 0u64;
    let mut last_empty: Option<u64> = None;
    let mut gap_sum: u128 = 0;
    let mut gaps = 0u64;

    for n in 1..=config.horizon {
        let arrival = sampler.sample(&mut arrival_rng);
        let event = step(h, &mut state, arrival, policy, &mut ties)?;
        arrivals_per_class[arrival - 1] += 1;
        if let Some(edge) = event.matched_edge {
            matches_per_edge[edge] += 1;
        }
        let total = state.total();
        max_total = max_total.max(total);
        if mid_range.contains(&n) {
            mid_sum += u128::from(total);
        }
        if final_range.contains(&n) {
            final_sum += u128::from(total);
        }
        if total == 0 {
            empty_returns += 1;
            if let Some(prev) = last_empty {
                gap_sum += u128::from(n - prev);
                gaps += 1;
            }
            last_empty = Some(n);
        }
        if next_cp < checkpoint_steps.len() && n == checkpoint_steps[next_cp] {
            next_cp += 1;
            checkpoints.push((n, total));
            let counts = state.counts();
            if !admissible(h, &state) {
                let edge = h
                    .edges()
                    .iter()
                    .find(|e| e.iter().all(|&v| counts[v - 1] > 0))
                    .cloned()
                    .unwrap_or_default();
                return Err(Error::InadmissibleState { edge });
            }
            for &mask in &audit_masks {
                if !conservation_holds(h, mask, &counts, &arrivals_per_class, &matches_per_edge) {
                    return Err(Error::ConservationViolated {
                        step: n,
                        subset: nodes_of_mask(mask),
                    });
                }
            }
        }
    }

    let window_mean = |sum: u128, range: &std::ops::Range<u64>| {
        let len = range.end.saturating_sub(range.start);
        if len == 0 {
            0.0
        } else {
            sum as f64 / len as f64
        }
    };
    Ok(TrajectorySummary {
        horizon: config.horizon,
        arrival_seed: config.seed,
        tie_seed: policy.seed,
        final_total: state.total(),
        max_total,
        slope: least_squares_slope(&checkpoints),
        mid_window_mean: window_mean(mid_sum, &mid_range),
        final_window_mean: window_mean(final_sum, &final_range),
        checkpoints,
        empty_returns,
        mean_return_time: (gaps > 0).then(|| gap_sum as f64 / gaps as f64),
        arrivals_per_class,
        matches_per_edge,
    })
}

fn least_squares_slope(points: &[(u64, u64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|&(x, _)| x as f64).sum::<f64>() / n;
    let mean_y = points.iter().map(|&(_, y)| y as f64).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in points {
        let dx = x as f64 - mean_x;
        num += dx * (y as f64 - mean_y);
        den += dx * dx;
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Per-repetition statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepStats {
    /// Repetition index.
    pub rep: usize,
    /// Seed of this repetition's arrival stream.
    pub arrival_seed: u64,
    /// Seed of this repetition's tie stream.
    pub tie_seed: u64,
    /// Checkpoint growth slope.
    pub slope: f64,
    /// Mean total over the second quarter.
    pub mid_window_mean: f64,
    /// Mean total over the second half.
    pub final_window_mean: f64,
    /// Final buffer size.
    pub final_total: u64,
    /// Empty-buffer visits.
    pub empty_returns: u64,
    /// Mean spacing between empty-buffer visits.
    pub mean_return_time: Option<f64>,
    /// Whether the slope exceeds [`GROWTH_SLOPE`].
    pub growing: bool,
    /// Whether the second half stayed within [`CONTAINMENT_FACTOR`]
    /// times the second quarter.
    pub contained: bool,
}

/// The classifier's deliberately coarse verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimVerdict {
    /// Nearly all repetitions kept growing.
    TransientLike,
    /// Nearly all repetitions stayed contained and all touched the
    /// empty buffer.
    StableLike,
    /// Anything else.
    Inconclusive,
}

/// Replicated-run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    /// Per-repetition statistics, by repetition index.
    pub reps: Vec<RepStats>,
    /// Fraction of repetitions with a growing slope.
    pub growing_fraction: f64,
    /// Fraction of repetitions with a contained second half.
    pub contained_fraction: f64,
    /// Whether every repetition visited the empty buffer.
    pub all_reps_returned_to_empty: bool,
    /// The verdict.
    pub verdict: SimVerdict,
}

/// Runs `reps` independent repetitions in parallel and classifies the
/// ensemble.
///
/// Repetition `r` draws its arrival seed from `(config.seed, 2r)` and
/// its tie seed from `(config.seed ^ policy.seed, 2r + 1)` through
/// [`derive_seed`], so the ensemble is reproducible from the two base
/// seeds alone.
pub fn replicate_and_classify(
    h: &Hypergraph,
    measure: &Measure<f64>,
    policy: &PolicySpec,
    config: &SimConfig,
    reps: usize,
) -> Result<ReplicationReport> {
    if reps < MIN_REPLICATIONS {
        return Err(Error::BadParameters(format!(
            "need at least {MIN_REPLICATIONS} repetitions, got {reps}"
        )));
    }
    let summaries: Vec<(usize, TrajectorySummary)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let arrival_seed = derive_seed(config.seed, 2 * r as u64);
            let tie_seed = derive_seed(config.seed ^ policy.seed, 2 * r as u64 + 1);
            let rep_policy = PolicySpec {
                seed: tie_seed,
                ..policy.clone()
            };
            let rep_config = SimConfig {
                seed: arrival_seed,
                ..*config
            };
            run(h, measure, &rep_policy, &rep_config).map(|s| (r, s))
        })
        .collect::<Result<_>>()?;

    let reps_stats: Vec<RepStats> = summaries
        .into_iter()
        .map(|(r, s)| RepStats {
            rep: r,
            arrival_seed: s.arrival_seed,
            tie_seed: s.tie_seed,
            slope: s.slope,
            mid_window_mean: s.mid_window_mean,
            final_window_mean: s.final_window_mean,
            final_total: s.final_total,
            empty_returns: s.empty_returns,
            mean_return_time: s.mean_return_time,
            growing: s.slope > GROWTH_SLOPE,
            contained: s.final_window_mean <= CONTAINMENT_FACTOR * s.mid_window_mean,
        })
        .collect();

    let n = reps_stats.len() as f64;
    let growing_fraction = reps_stats.iter().filter(|r| r.growing).count() as f64 / n;
    let contained_fraction = reps_stats.iter().filter(|r| r.contained).count() as f64 / n;
    let all_reps_returned_to_empty = reps_stats.iter().all(|r| r.empty_returns > 0);
    let verdict = if growing_fraction >= VERDICT_QUORUM {
        SimVerdict::TransientLike
    } else if contained_fraction >= VERDICT_QUORUM && all_reps_returned_to_empty {
        SimVerdict::StableLike
    } else {
        SimVerdict::Inconclusive
    };
    Ok(ReplicationReport {
        reps: reps_stats,
        growing_fraction,
        contained_fraction,
        all_reps_returned_to_empty,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::PolicyKind;
    use crate::hypergraph::{generate, Family};

    fn complete43() -> Hypergraph {
        generate(&Family::Complete { q: 4, r: 3 }).unwrap()
    }

    fn ml() -> PolicySpec {
        PolicySpec::new(PolicyKind::Ml)
    }

    #[test]
    fn identical_seeds_reproduce_the_trajectory() {
        let h = complete43();
        let m = Measure::<f64>::uniform(4);
        let config = SimConfig::new(20_000, 7);
        let a = run(&h, &m, &ml(), &config).unwrap();
        let b = run(&h, &m, &ml(), &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_arrivals_keep_the_buffer_small_and_recurrent() {
        let h = complete43();
        let m = Measure::<f64>::uniform(4);
        let summary = run(&h, &m, &ml(), &SimConfig::new(50_000, 11)).unwrap();
        assert!(summary.empty_returns > 100);
        assert!(summary.mean_return_time.is_some());
        assert!(summary.final_window_mean < 20.0);
        assert!(summary.slope.abs() < 0.01);
        // The audit never fired, and totals reconcile globally.
        let arrived: u64 = summary.arrivals_per_class.iter().sum();
        let matched: u64 = summary.matches_per_edge.iter().sum();
        assert_eq!(arrived - 3 * matched, summary.final_total);
    }

    #[test]
    fn heavy_class_grows_linearly() {
        let h = complete43();
        let m = Measure::make(&[0.4, 0.2, 0.2, 0.2]).unwrap();
        let summary = run(&h, &m, &ml(), &SimConfig::new(100_000, 13)).unwrap();
        assert!(summary.slope > 0.02, "slope {}", summary.slope);
        assert!(summary.final_total > 1_000);
    }

    #[test]
    fn classifier_separates_stable_from_transient() {
        let h = complete43();
        let stable = replicate_and_classify(
            &h,
            &Measure::<f64>::uniform(4),
            &ml(),
            &SimConfig::new(40_000, 19),
            8,
        )
        .unwrap();
        assert_eq!(stable.verdict, SimVerdict::StableLike);

        let transient = replicate_and_classify(
            &h,
            &Measure::make(&[0.4, 0.2, 0.2, 0.2]).unwrap(),
            &ml(),
            &SimConfig::new(40_000, 23),
            8,
        )
        .unwrap();
        assert_eq!(transient.verdict, SimVerdict::TransientLike);
    }

    #[test]
    fn too_few_repetitions_are_rejected() {
        let h = complete43();
        assert!(matches!(
            replicate_and_classify(
                &h,
                &Measure::<f64>::uniform(4),
                &ml(),
                &SimConfig::new(1_000, 1),
                4,
            ),
            Err(Error::BadParameters(_))
        ));
    }

    #[test]
    fn conservation_audit_detects_corrupted_tallies() {
        let h = complete43();
        // A consistent tally: 10 arrivals of class 1, 2 of class 2, one
        // match of edge {1,2,3} leaves (9, 1, -1, 0)... build a real one:
        // arrivals (3,2,1,0), one match of {1,2,3} -> counts (2,1,0,0).
        let arrivals = vec![3, 2, 1, 0];
        let mut matches = vec![0u64; h.edge_count()];
        let e123 = h.edges().iter().position(|e| e == &vec![1, 2, 3]).unwrap();
        matches[e123] = 1;
        let counts = vec![2, 1, 0, 0];
        let full = 0b1111;
        assert!(conservation_holds(&h, full, &counts, &arrivals, &matches));
        assert!(conservation_holds(&h, 0b0011, &counts, &arrivals, &matches));
        // Corrupt one count: every subset containing class 1 must notice.
        let bad = vec![3, 1, 0, 0];
        assert!(!conservation_holds(&h, full, &bad, &arrivals, &matches));
        assert!(!conservation_holds(&h, 0b0001, &bad, &arrivals, &matches));
        // Subsets avoiding class 1 stay balanced.
        assert!(conservation_holds(&h, 0b0110, &bad, &arrivals, &matches));
    }

    #[test]
    fn derived_seeds_differ_across_streams() {
        let s: Vec<u64> = (0..8).map(|k| derive_seed(42, k)).collect();
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                assert_ne!(s[i], s[j]);
            }
        }
    }
}
