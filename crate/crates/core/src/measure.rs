//! Probability measures on the node classes.
//!
//! A [`Measure`] assigns a strictly positive probability to every node
//! `1..=q` and sums to one. Construction normalizes arbitrary positive
//! weights, so exact rational inputs stay exact. The module also hosts
//! the textual/JSON input formats and the inverse-transform sampler used
//! by the simulator.

use crate::error::{Error, Result};
use crate::scalar::{sum, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::Deserialize;

/// A strictly positive probability vector over nodes `1..=q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<S: Scalar> {
    probs: Vec<S>,
}

/// Nodes ordered by probability, with the extreme values.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStats<S: Scalar> {
    /// Nodes sorted by ascending probability; ties broken by node id.
    pub ascending: Vec<usize>,
    /// Smallest class probability.
    pub min: S,
    /// Largest class probability.
    pub max: S,
}

impl<S: Scalar> Measure<S> {
    /// Normalizes positive weights into a probability vector.
    pub fn make(weights: &[S]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (i, w) in weights.iter().enumerate() {
            // `!(w > 0)` also rejects NaN floats, which compare false.
            if !(*w > S::zero()) {
                return Err(Error::NonPositiveWeight { node: i + 1 });
            }
        }
        let total = sum(weights.iter().cloned());
        let probs = weights.iter().map(|w| w.clone() / total.clone()).collect();
        Ok(Measure { probs })
    }

    /// The uniform measure on `q` nodes.
    #[must_use]
    pub fn uniform(q: usize) -> Self {
        assert!(q > 0, "uniform measure needs at least one node");
        Measure {
            probs: vec![S::from_ratio(1, q as i64); q],
        }
    }

    /// Number of nodes.
    #[must_use]
    pub fn q(&self) -> usize {
        self.probs.len()
    }

    /// Probability of node `node` (1-based).
    #[must_use]
    pub fn prob(&self, node: usize) -> &S {
        &self.probs[node - 1]
    }

    /// The full probability vector in node order.
    #[must_use]
    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    /// Total probability of the nodes in `mask` (node `i` is bit `i - 1`).
    #[must_use]
    pub fn mass_of_mask(&self, mask: u32) -> S {
        sum((0..self.q()).filter(|i| mask & (1 << i) != 0).map(|i| self.probs[i].clone()))
    }

    /// Total probability of the listed nodes.
    #[must_use]
    pub fn mass_of(&self, nodes: &[usize]) -> S {
        sum(nodes.iter().map(|&v| self.probs[v - 1].clone()))
    }

    /// Nodes ordered by probability plus the extreme values.
    #[must_use]
    pub fn order_stats(&self) -> OrderStats<S> {
        let mut ascending: Vec<usize> = (1..=self.q()).collect();
        ascending.sort_by(|&a, &b| {
            self.probs[a - 1]
                .partial_cmp(&self.probs[b - 1])
                .expect("probabilities are comparable")
                .then(a.cmp(&b))
        });
        OrderStats {
            min: self.probs[ascending[0] - 1].clone(),
            max: self.probs[ascending[self.q() - 1] - 1].clone(),
            ascending,
        }
    }

    /// Whether subset mass is strictly increasing in cardinality: every
    /// set of `k` nodes outweighs every set of `k - 1` nodes.
    ///
    /// Equivalent check on sorted values: for each `k`, the `k` smallest
    /// probabilities sum to strictly more than the `k - 1` largest.
    #[must_use]
    pub fn strictly_monotone_in_cardinality(&self) -> bool {
        let stats = self.order_stats();
        let q = self.q();
        for k in 1..=q {
            let bottom = sum(
                stats.ascending[..k]
                    .iter()
                    .map(|&v| self.probs[v - 1].clone()),
            );
            let top = sum(
                stats.ascending[q - (k - 1)..]
                    .iter()
                    .map(|&v| self.probs[v - 1].clone()),
            );
            if bottom <= top {
                return false;
            }
        }
        true
    }

    /// Lossy conversion for simulation and reporting.
    #[must_use]
    pub fn to_f64(&self) -> Measure<f64> {
        Measure {
            probs: self.probs.iter().map(Scalar::to_f64).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Input formats
// ---------------------------------------------------------------------------

/// A parsed measure before choosing the scalar backend.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedMeasure {
    /// Weights given as floats.
    Float(Vec<f64>),
    /// Weights given as exact rationals.
    Rational(Vec<BigRational>),
}

impl ParsedMeasure {
    /// Builds an exact measure; float weights are converted through their
    /// shortest exact binary representation.
    pub fn to_rational(&self) -> Result<Measure<BigRational>> {
        match self {
            ParsedMeasure::Rational(ws) => Measure::make(ws),
            ParsedMeasure::Float(ws) => {
                let exact: Option<Vec<BigRational>> =
                    ws.iter().map(|&w| BigRational::from_float(w)).collect();
                let exact = exact.ok_or_else(|| {
                    Error::Parse("float weight is not finite".to_string())
                })?;
                Measure::make(&exact)
            }
        }
    }

    /// Builds a float measure.
    pub fn to_float(&self) -> Result<Measure<f64>> {
        match self {
            ParsedMeasure::Float(ws) => Measure::make(ws),
            ParsedMeasure::Rational(ws) => {
                let floats: Vec<f64> = ws.iter().map(Scalar::to_f64).collect();
                Measure::make(&floats)
            }
        }
    }

    /// Number of weights.
    #[must_use]
    pub fn len(&self) -> usize {
        match self {
            ParsedMeasure::Float(ws) => ws.len(),
            ParsedMeasure::Rational(ws) => ws.len(),
        }
    }

    /// Whether no weights were given.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// JSON measure file: either `{"mu": [0.25, ...]}` with floats or
/// `{"mu_rational": [["1", "4"], ...]}` with decimal numerator/denominator
/// strings.
#[derive(Debug, Deserialize)]
struct MeasureFile {
    mu: Option<Vec<f64>>,
    mu_rational: Option<Vec<(String, String)>>,
}

/// Parses the JSON measure file format.
pub fn parse_measure_json(json: &str) -> Result<ParsedMeasure> {
    let file: MeasureFile =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("measure file: {e}")))?;
    match (file.mu, file.mu_rational) {
        (Some(ws), None) => Ok(ParsedMeasure::Float(ws)),
        (None, Some(pairs)) => {
            let mut ws = Vec::with_capacity(pairs.len());
            for (num, den) in &pairs {
                ws.push(parse_big_ratio(num, den)?);
            }
            Ok(ParsedMeasure::Rational(ws))
        }
        _ => Err(Error::Parse(
            "measure file needs exactly one of `mu` or `mu_rational`".to_string(),
        )),
    }
}

/// Parses an inline weight list: comma-separated floats, or exact
/// rationals when any entry contains `/` (e.g. `2/5,1/5,1/5,1/5`).
pub fn parse_measure_inline(s: &str) -> Result<ParsedMeasure> {
    let tokens: Vec<&str> = s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    if tokens.is_empty() {
        return Err(Error::EmptyVector);
    }
    if tokens.iter().any(|t| t.contains('/')) {
        let mut ws = Vec::with_capacity(tokens.len());
        for t in &tokens {
            let (num, den) = match t.split_once('/') {
                Some((n, d)) => (n.trim(), d.trim()),
                None => (*t, "1"),
            };
            ws.push(parse_big_ratio(num, den)?);
        }
        Ok(ParsedMeasure::Rational(ws))
    } else {
        let mut ws = Vec::with_capacity(tokens.len());
        for t in &tokens {
            ws.push(
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("`{t}` is not a number")))?,
            );
        }
        Ok(ParsedMeasure::Float(ws))
    }
}

fn parse_big_ratio(num: &str, den: &str) -> Result<BigRational> {
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("`{num}` is not an integer")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("`{den}` is not an integer")))?;
    if d == BigInt::from(0) {
        return Err(Error::Parse(format!("zero denominator in `{num}/{den}`")));
    }
    Ok(BigRational::new(n, d))
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Inverse-transform sampler for arrival classes.
#[derive(Debug, Clone)]
pub struct ClassSampler {
    cumulative: Vec<f64>,
}

impl ClassSampler {
    /// Precomputes the cumulative distribution of `measure`.
    #[must_use]
    pub fn new(measure: &Measure<f64>) -> Self {
        let mut cumulative = Vec::with_capacity(measure.q());
        let mut acc = 0.0;
        for p in measure.probs() {
            acc += p;
            cumulative.push(acc);
        }
        // Guard against rounding drift so the last class is always
        // reachable.
        *cumulative.last_mut().unwrap() = 1.0;
        ClassSampler { cumulative }
    }

    /// Draws one arrival class (1-based node id).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>();
        for (i, &c) in self.cumulative.iter().enumerate() {
            if u < c {
                return i + 1;
            }
        }
        self.cumulative.len()
    }
}
