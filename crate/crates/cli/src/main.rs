//! `hypermatch` — analyze, simulate, replay and cross-check stochastic
//! matching models on hypergraphs.
//!
//! Commands: `analyze` (structure, membership conditions, instability
//! triggers, stability regions), `simulate` (replicated Monte-Carlo with
//! a growth verdict), `replay` (deterministic trace of an explicit
//! arrival sequence), `generate` (hypergraph family to JSON), and
//! `oracle drift` / `oracle stationary` (exact enumeration baselines).
//!
//! Reports are JSON with alphabetically ordered keys and embed a
//! reproducibility header (tool version, resolved configuration, seeds,
//! numeric mode); identical invocations produce byte-identical output.
//! Exact rationals are rendered as `"numerator/denominator"` strings.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a structural
//! guard refuses an oversized exhaustive computation.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hypermatch_core::dynamics::{CountBasis, PolicyKind, PolicySpec};
use hypermatch_core::measure::{parse_measure_inline, parse_measure_json, ParsedMeasure};
use hypermatch_core::oracle::{four_step_drift_slope, truncated_stationary, StateFamily};
use hypermatch_core::regions::{
    check_s_s1, complete3_region, DriftCoefficients, SIndexAssignment,
};
use hypermatch_core::sim::{replicate_and_classify, RepStats, SimConfig};
use hypermatch_core::stability::{
    check_n1, check_n2, check_n3, classify_nonstabilizable, hall_instability,
    ConditionVerdict, CycleDescription,
};
use hypermatch_core::{
    dynamics, generate, Error as CoreError, Family, Hypergraph, Measure, Rational, Scalar,
};

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum AppError {
    Core(CoreError),
    Io(String),
    Msg(String),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Core(e) => write!(f, "{e}"),
            AppError::Io(e) => write!(f, "{e}"),
            AppError::Msg(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        AppError::Core(e)
    }
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Core(CoreError::TooLarge { .. })
            | AppError::Core(CoreError::StateSpaceTooLarge { .. }) => 3,
            _ => 2,
        }
    }
}

type AppResult<T> = Result<T, AppError>;

fn read_file(path: &PathBuf) -> AppResult<String> {
    fs::read_to_string(path)
        .map_err(|e| AppError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write_output(text: &str, out: Option<&PathBuf>) -> AppResult<()> {
    match out {
        Some(path) => {
            let body = if text.ends_with('\n') {
                text.to_string()
            } else {
                format!("{text}\n")
            };
            fs::write(path, body)
                .map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Command-line surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "hypermatch",
    version,
    about = "Stochastic matching models on hypergraphs: stability analysis, simulation, exact oracles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural profile, membership conditions, instability triggers
    /// and stability regions for one instance.
    Analyze(AnalyzeArgs),
    /// Replicated Monte-Carlo simulation with a growth verdict.
    Simulate(SimulateArgs),
    /// Deterministic replay of an explicit arrival sequence (JSON lines).
    Replay(ReplayArgs),
    /// Emit a hypergraph family as a JSON instance file.
    Generate(GenerateArgs),
    /// Exact enumeration baselines.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Four-arrival drift slopes along a boundary state family.
    Drift(DriftArgs),
    /// Stationary distribution of the cap-truncated count chain.
    Stationary(StationaryArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Hypergraph JSON file: {"q": <int>, "hyperedges": [[...], ...]}.
    #[arg(long, value_name = "FILE", conflicts_with = "family")]
    hypergraph: Option<PathBuf>,
    /// Family string, e.g. "complete:q=4,r=3", "cycle:q=12,r=3,l=2",
    /// "fano", "complete-minus:q=6,r=3,J=[[1,2,3],[4,5,6]]".
    #[arg(long, value_name = "SPEC")]
    family: Option<String>,
}

impl SourceArgs {
    fn load(&self) -> AppResult<(Hypergraph, Option<Family>, String)> {
        match (&self.hypergraph, &self.family) {
            (Some(path), None) => {
                let h: Hypergraph = serde_json::from_str(&read_file(path)?)
                    .map_err(|e| AppError::Msg(format!("invalid hypergraph file: {e}")))?;
                Ok((h, None, path.display().to_string()))
            }
            (None, Some(spec)) => {
                let family: Family = spec
                    .parse()
                    .map_err(|e: CoreError| AppError::Core(e))?;
                let h = generate(&family)?;
                Ok((h, Some(family), spec.clone()))
            }
            _ => Err(AppError::Msg(
                "provide exactly one of --hypergraph FILE or --family SPEC".to_string(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AssignmentFlag {
    /// λ outside removed edges, ν inside (total pairing; default).
    Proof,
    /// λ on removed-edge nodes only (partial pairing, for comparison).
    Display,
}

impl From<AssignmentFlag> for SIndexAssignment {
    fn from(f: AssignmentFlag) -> Self {
        match f {
            AssignmentFlag::Proof => SIndexAssignment::ProofSide,
            AssignmentFlag::Display => SIndexAssignment::DisplaySide,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CountBasisFlag {
    /// Score candidate edges on the buffer before the arrival joins.
    Pre,
    /// Score candidate edges with the arrival counted in.
    Post,
}

impl From<CountBasisFlag> for CountBasis {
    fn from(f: CountBasisFlag) -> Self {
        match f {
            CountBasisFlag::Pre => CountBasis::PreArrival,
            CountBasisFlag::Post => CountBasis::PostArrival,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Arrival measure: "uniform", an inline list like "2/5,1/5,1/5,1/5",
    /// or a JSON file path.
    #[arg(long, default_value = "uniform")]
    mu: String,
    /// Exact rational arithmetic for the membership predicates.
    #[arg(long, action = clap::ArgAction::Set, default_value_t = true,
          num_args = 0..=1, default_missing_value = "true")]
    exact: bool,
    /// Which closed-form family labels which node set in the drift
    /// region report.
    #[arg(long, value_enum, default_value = "proof")]
    s_index_assignment: AssignmentFlag,
    /// Circular node ordering for the window-family trigger, e.g.
    /// "1,2,3,4,5,6" (defaults to the natural ordering for generated
    /// cycle families).
    #[arg(long, value_name = "LIST", requires = "cycle_overlap")]
    cycle_ordering: Option<String>,
    /// Window overlap accompanying --cycle-ordering.
    #[arg(long, value_name = "N", requires = "cycle_ordering")]
    cycle_overlap: Option<usize>,
    /// Also write per-condition verdict rows as CSV.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Arrival measure (same forms as in analyze).
    #[arg(long, default_value = "uniform")]
    mu: String,
    /// Matching policy: fcfm | lcfm | ml | ms | random |
    /// priority:[[...],...].
    #[arg(long, default_value = "ml")]
    policy: String,
    /// Arrivals per repetition.
    #[arg(long, default_value_t = 1_000_000)]
    horizon: u64,
    /// Number of repetitions (at least 8).
    #[arg(long, default_value_t = 20)]
    reps: usize,
    /// Base seed; per-repetition seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scoring basis for ml / ms.
    #[arg(long, value_enum, default_value = "pre")]
    count_basis: CountBasisFlag,
    /// Write per-repetition rows as CSV.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Matching policy (same forms as in simulate).
    #[arg(long, default_value = "fcfm")]
    policy: String,
    /// Comma-separated arrival classes, e.g. "2,3,4,1,1,2".
    #[arg(long, value_name = "LIST")]
    arrivals: String,
    /// Tie-breaking seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scoring basis for ml / ms.
    #[arg(long, value_enum, default_value = "pre")]
    count_basis: CountBasisFlag,
    /// Write the JSON lines here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Family string to instantiate.
    #[arg(long, value_name = "SPEC")]
    family: String,
    /// Write the instance JSON here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DriftArgs {
    /// Hypergraph JSON file (use `generate` to build one from a family).
    #[arg(long, value_name = "FILE")]
    hypergraph: PathBuf,
    /// Arrival measure (same forms as in analyze).
    #[arg(long, default_value = "uniform")]
    mu: String,
    /// Boundary state family: "x*e4", "x*e1+y*e2", or
    /// "x*e1+y*e2+z*e3" (the last class is the small coordinate).
    #[arg(long, value_name = "STATE")]
    family: String,
    /// Drift window; only the four-arrival window is supported.
    #[arg(long, default_value_t = 4)]
    steps: u32,
    /// Matching policy evaluated by the oracle.
    #[arg(long, default_value = "ml")]
    policy: String,
    /// Scoring basis for ml / ms.
    #[arg(long, value_enum, default_value = "pre")]
    count_basis: CountBasisFlag,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StationaryArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Arrival measure (same forms as in analyze).
    #[arg(long, default_value = "uniform")]
    mu: String,
    /// Matching policy evaluated by the oracle.
    #[arg(long, default_value = "ml")]
    policy: String,
    /// Per-coordinate truncation cap.
    #[arg(long, default_value_t = 30)]
    cap: u64,
    /// Scoring basis for ml / ms.
    #[arg(long, value_enum, default_value = "pre")]
    count_basis: CountBasisFlag,
    /// Include the full state list and stationary vector.
    #[arg(long)]
    full: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Shared parsing helpers
// ---------------------------------------------------------------------------

fn load_measure(spec: &str, q: usize) -> AppResult<ParsedMeasure> {
    let parsed = if spec == "uniform" {
        ParsedMeasure::Rational((0..q).map(|_| Rational::from_ratio(1, q as i64)).collect())
    } else if spec.contains(',') {
        parse_measure_inline(spec)?
    } else {
        parse_measure_json(&read_file(&PathBuf::from(spec))?)?
    };
    if parsed.len() != q {
        return Err(AppError::Msg(format!(
            "measure lists {} classes, hypergraph has {q}",
            parsed.len()
        )));
    }
    Ok(parsed)
}

fn parse_policy(spec: &str) -> AppResult<PolicyKind> {
    match spec {
        "fcfm" => Ok(PolicyKind::Fcfm),
        "lcfm" => Ok(PolicyKind::Lcfm),
        "ml" => Ok(PolicyKind::Ml),
        "ms" => Ok(PolicyKind::Ms),
        "random" => Ok(PolicyKind::Random),
        other => {
            if let Some(rest) = other.strip_prefix("priority:") {
                let orders: Vec<Vec<usize>> = serde_json::from_str(rest).map_err(|e| {
                    AppError::Msg(format!("invalid priority orders {rest:?}: {e}"))
                })?;
                Ok(PolicyKind::Priority { orders })
            } else {
                Err(AppError::Msg(format!(
                    "unknown policy {other:?}; expected fcfm|lcfm|ml|ms|random|priority:[[...],...]"
                )))
            }
        }
    }
}

fn parse_usize_list(s: &str) -> AppResult<Vec<usize>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| AppError::Msg(format!("invalid integer {tok:?} in list")))
        })
        .collect()
}

/// Parses "x*e4" / "x*e1+y*e2" / "x*e1+y*e2+z*e3" into a state family.
fn parse_state_family(spec: &str) -> AppResult<StateFamily> {
    let expected_vars = ["x", "y", "z"];
    let mut nodes = Vec::new();
    for (idx, term) in spec.split('+').enumerate() {
        let term = term.trim();
        let (var, rest) = term.split_once('*').ok_or_else(|| {
            AppError::Msg(format!("term {term:?} is not of the form var*eN"))
        })?;
        if idx >= expected_vars.len() || var.trim() != expected_vars[idx] {
            return Err(AppError::Msg(format!(
                "term {term:?}: expected variable {:?} in position {}",
                expected_vars.get(idx).copied().unwrap_or("-"),
                idx + 1
            )));
        }
        let node = rest
            .trim()
            .strip_prefix('e')
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| AppError::Msg(format!("term {term:?} needs a class: var*eN")))?;
        nodes.push(node);
    }
    match nodes.as_slice() {
        [a] => Ok(StateFamily::Singleton { node: *a }),
        [a, b] => Ok(StateFamily::Pair { nodes: (*a, *b) }),
        [a, b, c] => Ok(StateFamily::Triple { nodes: (*a, *b, *c) }),
        _ => Err(AppError::Msg(
            "state family needs one to three terms".to_string(),
        )),
    }
}

fn reproducibility(command: &str, numeric_mode: &str, config: Value) -> Value {
    json!({
        "command": command,
        "config": config,
        "numeric_mode": numeric_mode,
        "tool": "hypermatch",
        "version": env!("CARGO_PKG_VERSION"),
    })
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn conditions_for<S: Scalar>(
    h: &Hypergraph,
    m: &Measure<S>,
) -> Result<Vec<ConditionVerdict>, CoreError> {
    let n1 = check_n1(h, m)?;
    let n2 = check_n2(h, m)?;
    let n3 = check_n3(h, m)?;
    Ok(vec![n1.plus, n1.minus, n1.minus_minus, n2, n3.plus, n3.minus])
}

fn coefficients_json(c: &DriftCoefficients) -> Value {
    let singletons: Vec<Value> = c
        .singleton_oracle
        .iter()
        .map(|(node, slope)| {
            let closed = c
                .singleton_closed
                .iter()
                .find(|e| e.node == *node)
                .map(|e| json!({"form": e.form.name(), "value": e.value.render()}))
                .unwrap_or(Value::Null);
            json!({
                "closed_form": closed,
                "node": node,
                "oracle_slope": slope.render(),
            })
        })
        .collect();
    let pairs: Vec<Value> = c
        .pairs
        .iter()
        .map(|p| {
            json!({
                "nodes": [p.nodes.0, p.nodes.1],
                "slopes": [p.slopes.0.render(), p.slopes.1.render()],
                "within_removed": p.within_removed,
            })
        })
        .collect();
    let triples: Vec<Value> = c
        .triples
        .iter()
        .map(|t| {
            let render = |v: &[(usize, Rational)]| -> Vec<Value> {
                v.iter().map(|(n, s)| json!([n, s.render()])).collect()
            };
            json!({
                "edge": t.edge,
                "large_role": render(&t.large),
                "small_role": render(&t.small),
            })
        })
        .collect();
    json!({
        "assignment": c.assignment,
        "max_singleton_deviation": c.max_singleton_deviation,
        "pairs": pairs,
        "removed": c.removed,
        "removed_nodes": c.removed_nodes,
        "singletons": singletons,
        "triples": triples,
    })
}

/// Upper node-count bound for the drift-slope section of `analyze`; the
/// oracle enumerates `q⁴` arrival words per probe, so larger instances
/// are skipped with a note rather than stalling the report.
const ANALYZE_DRIFT_MAX_NODES: usize = 12;

fn run_analyze(args: &AnalyzeArgs) -> AppResult<()> {
    let (h, family, source_desc) = args.source.load()?;
    let parsed = load_measure(&args.mu, h.q())?;
    let assignment: SIndexAssignment = args.s_index_assignment.into();

    let cycle_hint = match (&args.cycle_ordering, &args.cycle_overlap) {
        (Some(ordering), Some(overlap)) => Some(CycleDescription {
            ordering: parse_usize_list(ordering)?,
            overlap: *overlap,
        }),
        _ => match &family {
            Some(Family::Cycle { q, l, .. }) => Some(CycleDescription {
                ordering: (1..=*q).collect(),
                overlap: *l,
            }),
            _ => None,
        },
    };

    let skipped = |reason: &str| json!({ "skipped": reason });

    // Structure: profile always; the partition and comparison scans are
    // exhaustive and may be guarded away on large instances.
    let profile = h.profile()?;
    let partitions = match h.detect_partitions() {
        Ok(w) => serde_json::to_value(&w).unwrap_or(Value::Null),
        Err(e @ CoreError::TooLarge { .. }) => skipped(&e.to_string()),
        Err(e) => return Err(e.into()),
    };
    let hall = match h.check_hall() {
        Ok(v) => serde_json::to_value(&v).unwrap_or(Value::Null),
        Err(e @ CoreError::TooLarge { .. }) => skipped(&e.to_string()),
        Err(e) => return Err(e.into()),
    };

    // Membership conditions in the selected numeric mode.
    let rational_measure = parsed.to_rational()?;
    let (conditions, hall_report) = if args.exact {
        let conds = conditions_for(&h, &rational_measure)?;
        let hall_rep = match hall_instability(&h, &rational_measure) {
            Ok(r) => serde_json::to_value(&r).unwrap_or(Value::Null),
            Err(e @ CoreError::TooLarge { .. }) => skipped(&e.to_string()),
            Err(e) => return Err(e.into()),
        };
        (conds, hall_rep)
    } else {
        let float_measure = parsed.to_float()?;
        let conds = conditions_for(&h, &float_measure)?;
        let hall_rep = match hall_instability(&h, &float_measure) {
            Ok(r) => serde_json::to_value(&r).unwrap_or(Value::Null),
            Err(e @ CoreError::TooLarge { .. }) => skipped(&e.to_string()),
            Err(e) => return Err(e.into()),
        };
        (conds, hall_rep)
    };

    let triggers = classify_nonstabilizable(&h, cycle_hint.as_ref())?;

    // Regions: the exact complete-3-uniform test, then the drift-slope
    // region where its shape and size allow.
    let complete3 = serde_json::to_value(complete3_region(&h, &rational_measure)?)
        .unwrap_or(Value::Null);
    let shape_ok = h
        .complete_minus_shape()
        .map(|s| s.r == 3)
        .unwrap_or(false);
    let drift_region = if !args.exact {
        skipped("drift slopes need exact mode")
    } else if !shape_ok {
        skipped("drift slopes apply to 3-uniform complete-minus hypergraphs")
    } else if h.q() < 5 {
        skipped("drift slopes need at least 5 nodes")
    } else if h.q() > ANALYZE_DRIFT_MAX_NODES {
        skipped("drift slopes skipped beyond 12 nodes (q^4 enumeration)")
    } else {
        let report = check_s_s1(&h, &rational_measure, assignment)?;
        json!({
            "a": report.a,
            "coefficients": coefficients_json(&report.coefficients),
            "s": report.s,
            "s1": report.s1,
            "s1_implies_s_here": report.s1_implies_s_here,
        })
    };

    let config = json!({
        "cycle_hint": cycle_hint.as_ref().map(|c| json!({
            "ordering": c.ordering,
            "overlap": c.overlap,
        })),
        "exact": args.exact,
        "mu": args.mu,
        "s_index_assignment": assignment,
        "source": source_desc,
    });
    let report = json!({
        "conditions": conditions,
        "hall_instability": hall_report,
        "regions": {
            "complete3": complete3,
            "drift": drift_region,
        },
        "reproducibility": reproducibility(
            "analyze",
            if args.exact { "exact" } else { "float" },
            config,
        ),
        "structural": {
            "hall": hall,
            "partitions": partitions,
            "profile": profile,
        },
        "triggers": triggers,
    });

    if let Some(csv_path) = &args.csv {
        let mut w = csv::Writer::from_path(csv_path)
            .map_err(|e| AppError::Io(format!("cannot write {}: {e}", csv_path.display())))?;
        w.write_record(["condition", "member", "witness"])
            .and_then(|()| {
                for c in &conditions {
                    let name = serde_json::to_value(c.condition)
                        .ok()
                        .and_then(|v| v.as_str().map(String::from))
                        .unwrap_or_default();
                    let witness = c
                        .witness
                        .as_ref()
                        .map(|w| serde_json::to_string(w).unwrap_or_default())
                        .unwrap_or_else(|| "-".to_string());
                    w.write_record([name, c.member.to_string(), witness])?;
                }
                w.flush()?;
                Ok(())
            })
            .map_err(|e| AppError::Io(format!("csv write failed: {e}")))?;
    }

    write_output(&serde_json::to_string_pretty(&report).unwrap(), args.out.as_ref())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn rep_verdict(r: &RepStats) -> &'static str {
    if r.growing {
        "transient_like"
    } else if r.contained && r.empty_returns > 0 {
        "stable_like"
    } else {
        "inconclusive"
    }
}

fn run_simulate(args: &SimulateArgs) -> AppResult<()> {
    let (h, _, source_desc) = args.source.load()?;
    let parsed = load_measure(&args.mu, h.q())?;
    let measure = parsed.to_float()?;
    let policy = PolicySpec {
        kind: parse_policy(&args.policy)?,
        seed: args.seed,
        count_basis: args.count_basis.into(),
    };
    let config = SimConfig::new(args.horizon, args.seed);
    let report = replicate_and_classify(&h, &measure, &policy, &config, args.reps)?;

    if let Some(csv_path) = &args.out {
        let mut w = csv::Writer::from_path(csv_path)
            .map_err(|e| AppError::Io(format!("cannot write {}: {e}", csv_path.display())))?;
        w.write_record([
            "rep",
            "slope",
            "mid_mean",
            "final_mean",
            "empty_returns",
            "mean_return_time",
            "verdict",
        ])
        .and_then(|()| {
            for r in &report.reps {
                w.write_record([
                    r.rep.to_string(),
                    format!("{:.6}", r.slope),
                    format!("{:.3}", r.mid_window_mean),
                    format!("{:.3}", r.final_window_mean),
                    r.empty_returns.to_string(),
                    r.mean_return_time
                        .map(|t| format!("{t:.3}"))
                        .unwrap_or_default(),
                    rep_verdict(r).to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        })
        .map_err(|e| AppError::Io(format!("csv write failed: {e}")))?;
    }

    let config_echo = json!({
        "count_basis": serde_json::to_value(CountBasis::from(args.count_basis)).unwrap(),
        "horizon": args.horizon,
        "mu": args.mu,
        "policy": args.policy,
        "reps": args.reps,
        "seed": args.seed,
        "source": source_desc,
    });
    let out = json!({
        "report": report,
        "reproducibility": reproducibility("simulate", "float", config_echo),
        "verdict": report.verdict,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

// ---------------------------------------------------------------------------
// replay
// ---------------------------------------------------------------------------

fn run_replay(args: &ReplayArgs) -> AppResult<()> {
    let (h, _, _) = args.source.load()?;
    let arrivals = parse_usize_list(&args.arrivals)?;
    let policy = PolicySpec {
        kind: parse_policy(&args.policy)?,
        seed: args.seed,
        count_basis: args.count_basis.into(),
    };
    let outcomes = dynamics::replay(&h, &policy, &arrivals)?;
    let mut lines = String::new();
    for (idx, (arrival, outcome)) in arrivals.iter().zip(&outcomes).enumerate() {
        let record = json!({
            "arrival": arrival,
            "buffer_size": outcome.new_state.total(),
            "matched": outcome.matched,
            "n": idx + 1,
        });
        lines.push_str(&serde_json::to_string(&record).unwrap());
        lines.push('\n');
    }
    write_output(&lines, args.out.as_ref())
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

fn run_generate(args: &GenerateArgs) -> AppResult<()> {
    let family: Family = args.family.parse().map_err(AppError::Core)?;
    let h = generate(&family)?;
    write_output(&serde_json::to_string_pretty(&h).unwrap(), args.out.as_ref())
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

fn run_oracle_drift(args: &DriftArgs) -> AppResult<()> {
    if args.steps != 4 {
        return Err(AppError::Msg(
            "only the four-arrival drift window is supported (--steps 4)".to_string(),
        ));
    }
    let h: Hypergraph = serde_json::from_str(&read_file(&args.hypergraph)?)
        .map_err(|e| AppError::Msg(format!("invalid hypergraph file: {e}")))?;
    let parsed = load_measure(&args.mu, h.q())?;
    let measure = parsed.to_rational()?;
    let policy = parse_policy(&args.policy)?;
    let family = parse_state_family(&args.family)?;
    let slopes = four_step_drift_slope(&h, &measure, &policy, &family)?;

    let config = json!({
        "family": args.family,
        "hypergraph": args.hypergraph.display().to_string(),
        "mu": args.mu,
        "policy": args.policy,
        "steps": args.steps,
    });
    let report = json!({
        "reproducibility": reproducibility("oracle drift", "exact", config),
        "slopes": {
            "family": slopes.family,
            "per_node": slopes
                .per_node
                .iter()
                .map(|(n, s)| json!([n, s.render()]))
                .collect::<Vec<_>>(),
        },
    });
    write_output(&serde_json::to_string_pretty(&report).unwrap(), args.out.as_ref())
}

fn run_oracle_stationary(args: &StationaryArgs) -> AppResult<()> {
    let (h, _, source_desc) = args.source.load()?;
    let parsed = load_measure(&args.mu, h.q())?;
    let measure = parsed.to_float()?;
    let policy = parse_policy(&args.policy)?;
    let result = truncated_stationary(&h, &measure, &policy, args.cap)?;

    let config = json!({
        "cap": args.cap,
        "full": args.full,
        "mu": args.mu,
        "policy": args.policy,
        "source": source_desc,
    });
    let mut body = json!({
        "arrival_drop_mass": result.arrival_drop_mass,
        "cap": result.cap,
        "empty_state_mass": result.empty_state_mass,
        "iterations": result.iterations,
        "mean_total_count": result.mean_total_count,
        "residual": result.residual,
        "state_count": result.state_count,
    });
    if args.full {
        body["states"] = serde_json::to_value(&result.states).unwrap();
        body["stationary"] = serde_json::to_value(&result.stationary).unwrap();
    }
    let report = json!({
        "reproducibility": reproducibility("oracle stationary", "float", config),
        "stationary": body,
    });
    write_output(&serde_json::to_string_pretty(&report).unwrap(), args.out.as_ref())
}

// ---------------------------------------------------------------------------
// main
// ---------------------------------------------------------------------------

fn dispatch(cli: &Cli) -> AppResult<()> {
    match &cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Replay(args) => run_replay(args),
        Command::Generate(args) => run_generate(args),
        Command::Oracle(OracleCommand::Drift(args)) => run_oracle_drift(args),
        Command::Oracle(OracleCommand::Stationary(args)) => run_oracle_stationary(args),
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("HYPERMATCH_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
