//! Hypergraph representation, validation, and structural analysis.
//!
//! A hypergraph here is a finite set of nodes `1..=q` together with a
//! list of hyperedges (node sets). Every instance accepted by
//! [`Hypergraph::validate`] satisfies four structural invariants:
//!
//! * no hyperedge is empty;
//! * every node belongs to at least one hyperedge (covering);
//! * no hyperedge contains another, and there are no duplicates (simple);
//! * the intersection graph of the hyperedges is connected.
//!
//! Edges are stored canonically: each edge sorted ascending, and the edge
//! list sorted lexicographically. All functions that report subset or
//! partition witnesses scan candidates in ascending bitmask order (node
//! `i` is bit `i - 1`), so the reported witness is deterministic: it is
//! the first qualifying candidate in that order.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::str::FromStr;

/// Largest supported node count (edge sets are stored as `u32` bitmasks).
pub const MAX_NODES: usize = 30;
/// Largest supported edge count.
pub const MAX_EDGES: usize = 4096;
/// Largest node count for operations that scan all `2^q` node subsets
/// (transversal number, minimal transversals, partition detection,
/// subset-indexed stability conditions).
pub const MAX_EXHAUSTIVE_NODES: usize = 20;
/// Largest node count for the disjoint-pair scan behind the Hall check
/// (the scan is `O(4^q)`).
pub const MAX_HALL_NODES: usize = 14;

/// A validated hypergraph on nodes `1..=q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph", into = "RawHypergraph")]
pub struct Hypergraph {
    q: usize,
    /// Canonical edge list: each edge sorted, edges sorted lexicographically.
    edges: Vec<Vec<usize>>,
    /// Bitmask per edge, aligned with `edges` (node `i` is bit `i - 1`).
    masks: Vec<u32>,
    /// `degrees[i - 1]` = number of edges containing node `i`.
    degrees: Vec<usize>,
    /// `incidence[i - 1]` = indices into `edges` of the edges containing
    /// node `i`, in canonical edge order.
    incidence: Vec<Vec<usize>>,
}

/// Serialization image of [`Hypergraph`]; deserialization re-validates.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawHypergraph {
    q: usize,
    hyperedges: Vec<Vec<usize>>,
}

impl TryFrom<RawHypergraph> for Hypergraph {
    type Error = Error;

    fn try_from(raw: RawHypergraph) -> Result<Self> {
        Hypergraph::validate(raw.q, &raw.hyperedges)
    }
}

impl From<Hypergraph> for RawHypergraph {
    fn from(h: Hypergraph) -> Self {
        RawHypergraph {
            q: h.q,
            hyperedges: h.edges,
        }
    }
}

/// Summary of the structural quantities of a hypergraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralProfile {
    /// Number of nodes.
    pub q: usize,
    /// Number of hyperedges.
    pub edge_count: usize,
    /// Largest edge size.
    pub rank: usize,
    /// Smallest edge size.
    pub anti_rank: usize,
    /// Per-node degrees, indexed by node order `1..=q`.
    pub degrees: Vec<usize>,
    /// `Some(r)` when every edge has size `r`.
    pub uniform: Option<usize>,
    /// `Some(d)` when every node has degree `d`.
    pub regular: Option<usize>,
    /// Size of a smallest transversal (node set meeting every edge).
    pub transversal_number: usize,
    /// Always true after validation; kept so reports are self-contained.
    pub connected: bool,
}

/// Outcome of the partition search: the first structure found, searching
/// bipartite-style partitions before `k`-partite ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PartitionWitness {
    /// Partition `(V1, V2)` with `|H ∩ V1| = 1` and `|H ∩ V2| = r - 1`
    /// for every edge `H` of an `r`-uniform hypergraph.
    RUniformBipartite {
        /// The side met exactly once by every edge.
        v1: Vec<usize>,
        /// The complementary side.
        v2: Vec<usize>,
    },
    /// Partition `V1, ..., Vk` with `|H ∩ Vi| = 1` for every edge and
    /// every part (forces `k = r`).
    KPartite {
        /// Number of parts.
        k: usize,
        /// The parts, each sorted, ordered by smallest element.
        parts: Vec<Vec<usize>>,
    },
    /// Neither structure exists.
    None,
}

/// Outcome of the Hall-style comparison over disjoint subset pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum HallVerdict {
    /// Every disjoint pair `(V1, V2)` with `|H ∩ V2| >= |H ∩ V1|` for all
    /// edges also satisfies `|V2| >= |V1|`.
    Satisfied,
    /// A witness pair where the cardinality comparison fails.
    Violated {
        /// The larger side.
        v1: Vec<usize>,
        /// The dominating-but-smaller side.
        v2: Vec<usize>,
    },
}

/// Shape of a hypergraph that is a complete `r`-uniform hypergraph with a
/// set of pairwise-disjoint edges removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompleteMinusShape {
    /// Number of nodes.
    pub q: usize,
    /// Uniform edge size.
    pub r: usize,
    /// The removed edges, canonically ordered. Empty means complete.
    pub removed: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Validates raw input and builds the canonical representation.
    ///
    /// Nodes are `1..=q`. Edges may be listed in any order; they are
    /// sorted and deduplicated into canonical form. Fails with a precise
    /// error when any structural invariant is violated.
    pub fn validate(q: usize, edges_in: &[Vec<usize>]) -> Result<Self> {
        if q == 0 || q > MAX_NODES {
            return Err(Error::TooLarge {
                what: "node count q",
                value: q,
                limit: MAX_NODES,
            });
        }
        if edges_in.len() > MAX_EDGES {
            return Err(Error::TooLarge {
                what: "edge count",
                value: edges_in.len(),
                limit: MAX_EDGES,
            });
        }

        // Canonicalize each edge and reject malformed ones.
        let mut edges: Vec<Vec<usize>> = Vec::with_capacity(edges_in.len());
        for (index, edge) in edges_in.iter().enumerate() {
            if edge.is_empty() {
                return Err(Error::EmptyEdge { index });
            }
            let mut sorted = edge.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != edge.len() {
                return Err(Error::BadParameters(format!(
                    "hyperedge {edge:?} lists a node more than once"
                )));
            }
            if sorted[0] < 1 || *sorted.last().unwrap() > q {
                return Err(Error::BadParameters(format!(
                    "hyperedge {edge:?} mentions a node outside 1..={q}"
                )));
            }
            edges.push(sorted);
        }
        edges.sort();

        // Simplicity: after sorting, duplicates are adjacent; containment
        // needs the full pairwise check (edge counts are desk-scale).
        let masks: Vec<u32> = edges.iter().map(|e| mask_of(e)).collect();
        for i in 0..edges.len() {
            for j in 0..edges.len() {
                if i != j && masks[i] & masks[j] == masks[i] {
                    return Err(Error::NotSimple {
                        inner: edges[i].clone(),
                        outer: edges[j].clone(),
                    });
                }
            }
        }

        // Covering.
        let mut degrees = vec![0usize; q];
        let mut incidence = vec![Vec::new(); q];
        for (idx, edge) in edges.iter().enumerate() {
            for &v in edge {
                degrees[v - 1] += 1;
                incidence[v - 1].push(idx);
            }
        }
        if let Some(node) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::NotCovering { node: node + 1 });
        }

        // Connectivity of the intersection graph, by BFS over edges.
        let mut seen = vec![false; edges.len()];
        let mut queue = vec![0usize];
        seen[0] = true;
        while let Some(e) = queue.pop() {
            for &v in &edges[e] {
                for &f in &incidence[v - 1] {
                    if !seen[f] {
                        seen[f] = true;
                        queue.push(f);
                    }
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            let component = (0..edges.len()).filter(|&e| seen[e]).collect();
            return Err(Error::NotConnected { component });
        }

        Ok(Hypergraph {
            q,
            edges,
            masks,
            degrees,
            incidence,
        })
    }

    /// Number of nodes.
    #[must_use]
    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of hyperedges.
    #[must_use]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list.
    #[must_use]
    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// Edge at canonical index `idx`.
    #[must_use]
    pub fn edge(&self, idx: usize) -> &[usize] {
        &self.edges[idx]
    }

    /// Bitmasks aligned with [`Hypergraph::edges`].
    #[must_use]
    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    /// Per-node degrees (`degrees()[i - 1]` is the degree of node `i`).
    #[must_use]
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Indices of the edges containing `node`, in canonical order.
    #[must_use]
    pub fn edges_containing(&self, node: usize) -> &[usize] {
        &self.incidence[node - 1]
    }

    /// Largest edge size.
    #[must_use]
    pub fn rank(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Smallest edge size.
    #[must_use]
    pub fn anti_rank(&self) -> usize {
        self.edges.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// `Some(r)` when every edge has exactly `r` nodes.
    #[must_use]
    pub fn uniform(&self) -> Option<usize> {
        let r = self.rank();
        (r == self.anti_rank()).then_some(r)
    }

    /// Requires uniformity and returns the common edge size.
    pub fn require_uniform(&self) -> Result<usize> {
        self.uniform().ok_or(Error::NotUniform {
            min: self.anti_rank(),
            max: self.rank(),
        })
    }

    /// Size of a smallest transversal.
    ///
    /// Scans node subsets by ascending size, skipping sizes whose largest
    /// possible coverage (sum of the top degrees) cannot reach the edge
    /// count.
    pub fn transversal_number(&self) -> Result<usize> {
        self.check_exhaustive_guard()?;
        let m = self.edges.len();
        let mut top_degrees: Vec<usize> = self.degrees.clone();
        top_degrees.sort_unstable_by(|a, b| b.cmp(a));
        let mut prefix = 0usize;
        for k in 1..=self.q {
            prefix += top_degrees[k - 1];
            if prefix < m {
                continue;
            }
            if self.has_transversal_of_size(k) {
                return Ok(k);
            }
        }
        // The full node set is always a transversal of a covering
        // hypergraph, so the loop returns before reaching this point.
        unreachable!("full node set must be a transversal")
    }

    fn has_transversal_of_size(&self, k: usize) -> bool {
        subsets_of_size(self.q, k).any(|mask| self.is_transversal(mask))
    }

    fn is_transversal(&self, mask: u32) -> bool {
        self.masks.iter().all(|&em| em & mask != 0)
    }

    /// All inclusion-minimal transversals, in ascending bitmask order.
    pub fn minimal_transversals(&self) -> Result<Vec<Vec<usize>>> {
        self.check_exhaustive_guard()?;
        let mut out = Vec::new();
        for mask in 1u32..(1u32 << self.q) {
            if !self.is_transversal(mask) {
                continue;
            }
            // Inclusion-minimal iff every member has a private edge:
            // an edge whose only intersection with the set is that node.
            let mut private = 0u32;
            for &em in &self.masks {
                let inter = em & mask;
                if inter.count_ones() == 1 {
                    private |= inter;
                }
            }
            if private == mask {
                out.push(nodes_of_mask(mask));
            }
        }
        Ok(out)
    }

    /// Full structural summary.
    pub fn profile(&self) -> Result<StructuralProfile> {
        let degrees = self.degrees.clone();
        let d0 = degrees[0];
        Ok(StructuralProfile {
            q: self.q,
            edge_count: self.edges.len(),
            rank: self.rank(),
            anti_rank: self.anti_rank(),
            uniform: self.uniform(),
            regular: degrees.iter().all(|&d| d == d0).then_some(d0),
            transversal_number: self.transversal_number()?,
            degrees,
            connected: true,
        })
    }

    /// Searches for a partition witness, trying the bipartite structure
    /// first and the `k`-partite structure second.
    ///
    /// Requires uniformity (both structures are defined for `r`-uniform
    /// hypergraphs). Witnesses are deterministic: the bipartite side `V1`
    /// is the first qualifying subset in ascending bitmask order, and the
    /// `k`-partite witness is the least feasible color assignment over
    /// nodes `1..=q`.
    pub fn detect_partitions(&self) -> Result<PartitionWitness> {
        let r = self.require_uniform()?;
        self.check_exhaustive_guard()?;
        if r < 2 {
            return Ok(PartitionWitness::None);
        }

        // Bipartite: V1 meets every edge exactly once.
        for mask in 1u32..(1u32 << self.q) - 1 {
            if self
                .masks
                .iter()
                .all(|&em| (em & mask).count_ones() == 1)
            {
                let v1 = nodes_of_mask(mask);
                let v2 = nodes_of_mask(!mask & ((1u32 << self.q) - 1));
                return Ok(PartitionWitness::RUniformBipartite { v1, v2 });
            }
        }

        if let Some(witness) = self.detect_k_partite()? {
            return Ok(witness);
        }
        Ok(PartitionWitness::None)
    }

    /// Runs only the `k`-partite half of the partition search, for
    /// callers that want both structures reported independently.
    ///
    /// Looks for a proper coloring with `r` colors where no two nodes
    /// sharing an edge share a color; for `r`-uniform edges this makes
    /// every edge meet every color class exactly once.
    pub fn detect_k_partite(&self) -> Result<Option<PartitionWitness>> {
        let r = self.require_uniform()?;
        self.check_exhaustive_guard()?;
        if r < 2 {
            return Ok(None);
        }
        Ok(self.rainbow_coloring(r).map(|colors| {
            let mut parts = vec![Vec::new(); r];
            for (i, &c) in colors.iter().enumerate() {
                parts[c].push(i + 1);
            }
            PartitionWitness::KPartite { k: r, parts }
        }))
    }

    /// Backtracking search for the lexicographically least proper
    /// `r`-coloring in which edge-mates get distinct colors. Color `c`
    /// may only be introduced after colors `0..c` are in use, which makes
    /// the first solution canonical.
    fn rainbow_coloring(&self, r: usize) -> Option<Vec<usize>> {
        fn assign(
            h: &Hypergraph,
            r: usize,
            node: usize,
            used: usize,
            colors: &mut Vec<usize>,
        ) -> bool {
            if node > h.q {
                return true;
            }
            let cap = (used + 1).min(r);
            for c in 0..cap {
                let conflict = h.incidence[node - 1].iter().any(|&e| {
                    h.edges[e]
                        .iter()
                        .any(|&v| v < node && colors[v - 1] == c)
                });
                if conflict {
                    continue;
                }
                colors[node - 1] = c;
                let next_used = used.max(c + 1);
                if assign(h, r, node + 1, next_used, colors) {
                    return true;
                }
            }
            false
        }

        let mut colors = vec![0usize; self.q];
        assign(self, r, 1, 0, &mut colors).then_some(colors)
    }

    /// Checks the cardinality comparison over disjoint subset pairs:
    /// whenever every edge meets `V2` at least as often as `V1`, then
    /// `V2` must be at least as large as `V1`.
    ///
    /// Scans `V1` ascending (outer) and `V2` ascending (inner) and
    /// returns the first violating pair.
    pub fn check_hall(&self) -> Result<HallVerdict> {
        if self.q > MAX_HALL_NODES {
            return Err(Error::TooLarge {
                what: "node count q for the subset-pair scan",
                value: self.q,
                limit: MAX_HALL_NODES,
            });
        }
        let full = (1u32 << self.q) - 1;
        for v1 in 1u32..=full {
            let c1 = v1.count_ones();
            for v2 in 1u32..=full {
                if v1 & v2 != 0 || v2.count_ones() >= c1 {
                    continue;
                }
                let dominated = self
                    .masks
                    .iter()
                    .all(|&em| (em & v2).count_ones() >= (em & v1).count_ones());
                if dominated {
                    return Ok(HallVerdict::Violated {
                        v1: nodes_of_mask(v1),
                        v2: nodes_of_mask(v2),
                    });
                }
            }
        }
        Ok(HallVerdict::Satisfied)
    }

    /// Checks whether this hypergraph is exactly the cyclic window family
    /// induced by `ordering`: the edges are the `q / (r - overlap)`
    /// windows of `r` circularly consecutive nodes, consecutive windows
    /// overlapping in `overlap` nodes.
    ///
    /// `ordering` lists the nodes in circular order. Returns `false` when
    /// the window family does not tile (`(r - overlap)` does not divide
    /// `q`) or when the edge sets differ.
    pub fn verify_cycle(&self, ordering: &[usize], overlap: usize) -> Result<bool> {
        let r = self.require_uniform()?;
        if ordering.len() != self.q {
            return Err(Error::BadParameters(format!(
                "ordering has {} entries, expected {}",
                ordering.len(),
                self.q
            )));
        }
        let mut seen = vec![false; self.q];
        for &v in ordering {
            if v < 1 || v > self.q || seen[v - 1] {
                return Err(Error::BadParameters(format!(
                    "ordering {ordering:?} is not a permutation of 1..={}",
                    self.q
                )));
            }
            seen[v - 1] = true;
        }
        if overlap == 0 || overlap >= r {
            return Err(Error::BadParameters(format!(
                "window overlap {overlap} is outside 1..={}",
                r - 1
            )));
        }
        if self.q <= r {
            return Ok(false);
        }
        let step = r - overlap;
        if self.q % step != 0 {
            return Ok(false);
        }
        let count = self.q / step;
        let mut expected = BTreeSet::new();
        for j in 0..count {
            let mut window: Vec<usize> =
                (0..r).map(|t| ordering[(j * step + t) % self.q]).collect();
            window.sort_unstable();
            expected.insert(window);
        }
        let actual: BTreeSet<Vec<usize>> = self.edges.iter().cloned().collect();
        Ok(expected == actual)
    }

    /// Recognizes a complete `r`-uniform hypergraph with pairwise-disjoint
    /// edges removed. Returns `None` when the edge set is not of that
    /// shape (including when the removed edges overlap).
    #[must_use]
    pub fn complete_minus_shape(&self) -> Option<CompleteMinusShape> {
        let r = self.uniform()?;
        let present: BTreeSet<&[usize]> = self.edges.iter().map(Vec::as_slice).collect();
        let mut removed: Vec<Vec<usize>> = Vec::new();
        let mut removed_mask = 0u32;
        for subset in subsets_of_size(self.q, r) {
            let nodes = nodes_of_mask(subset);
            if !present.contains(nodes.as_slice()) {
                if removed_mask & subset != 0 {
                    return None;
                }
                removed_mask |= subset;
                removed.push(nodes);
            }
        }
        removed.sort();
        Some(CompleteMinusShape {
            q: self.q,
            r,
            removed,
        })
    }

    /// Bitmask of the degree-one nodes.
    #[must_use]
    pub fn degree_one_mask(&self) -> u32 {
        let mut mask = 0u32;
        for (i, &d) in self.degrees.iter().enumerate() {
            if d == 1 {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Guard for operations that scan all `2^q` node subsets.
    pub fn check_exhaustive_guard(&self) -> Result<()> {
        if self.q > MAX_EXHAUSTIVE_NODES {
            return Err(Error::TooLarge {
                what: "node count q for subset-exhaustive analysis",
                value: self.q,
                limit: MAX_EXHAUSTIVE_NODES,
            });
        }
        Ok(())
    }
}

/// Bitmask of a sorted node list.
#[must_use]
pub fn mask_of(nodes: &[usize]) -> u32 {
    nodes.iter().fold(0u32, |m, &v| m | (1 << (v - 1)))
}

/// Sorted node list of a bitmask.
#[must_use]
pub fn nodes_of_mask(mask: u32) -> Vec<usize> {
    (0..32)
        .filter(|&b| mask & (1 << b) != 0)
        .map(|b| b + 1)
        .collect()
}

/// Iterator over all bitmasks of `k`-subsets of `1..=q`, ascending.
pub fn subsets_of_size(q: usize, k: usize) -> impl Iterator<Item = u32> {
    // Gosper's hack: from one k-subset mask to the numerically next.
    let first = if k == 0 { 0 } else { (1u32 << k) - 1 };
    let limit = 1u32 << q;
    std::iter::successors(Some(first), move |&m| {
        if m == 0 {
            return None;
        }
        let c = m & m.wrapping_neg();
        let r = m + c;
        let next = (((r ^ m) >> 2) / c) | r;
        Some(next)
    })
    .take_while(move |&m| m < limit)
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

/// Parametric hypergraph families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// All `r`-subsets of `1..=q`.
    Complete {
        /// Node count.
        q: usize,
        /// Edge size.
        r: usize,
    },
    /// All `r`-subsets except a given pairwise-disjoint list.
    CompleteMinus {
        /// Node count.
        q: usize,
        /// Edge size.
        r: usize,
        /// Removed edges; must be pairwise disjoint `r`-sets.
        removed: Vec<Vec<usize>>,
    },
    /// Windows of `r` circularly consecutive nodes with consecutive
    /// windows overlapping in `l` nodes, over the identity ordering.
    Cycle {
        /// Node count; `r - l` must divide `q`.
        q: usize,
        /// Edge size.
        r: usize,
        /// Overlap of consecutive windows, in `1..r`.
        l: usize,
    },
    /// The seven-point plane: seven 3-node edges on seven nodes in which
    /// every pair of nodes lies in exactly one edge.
    Fano,
    /// Edges all passing through node 1.
    Star {
        /// Node count.
        q: usize,
        /// The edges; each must contain node 1.
        edges: Vec<Vec<usize>>,
    },
}

/// Builds the hypergraph of a family description.
pub fn generate(family: &Family) -> Result<Hypergraph> {
    match family {
        Family::Complete { q, r } => {
            check_complete_params(*q, *r)?;
            let edges: Vec<Vec<usize>> = subsets_of_size(*q, *r).map(nodes_of_mask).collect();
            Hypergraph::validate(*q, &edges)
        }
        Family::CompleteMinus { q, r, removed } => {
            check_complete_params(*q, *r)?;
            let mut removed_masks = Vec::new();
            let mut union = 0u32;
            for edge in removed {
                if edge.len() != *r {
                    return Err(Error::BadParameters(format!(
                        "removed edge {edge:?} does not have size {r}"
                    )));
                }
                if edge.iter().any(|&v| v < 1 || v > *q) {
                    return Err(Error::BadParameters(format!(
                        "removed edge {edge:?} mentions a node outside 1..={q}"
                    )));
                }
                let mask = mask_of(edge);
                if mask.count_ones() as usize != *r {
                    return Err(Error::BadParameters(format!(
                        "removed edge {edge:?} lists a node more than once"
                    )));
                }
                if union & mask != 0 {
                    return Err(Error::BadParameters(
                        "removed edges are not pairwise disjoint".to_string(),
                    ));
                }
                union |= mask;
                removed_masks.push(mask);
            }
            let edges: Vec<Vec<usize>> = subsets_of_size(*q, *r)
                .filter(|m| !removed_masks.contains(m))
                .map(nodes_of_mask)
                .collect();
            Hypergraph::validate(*q, &edges)
        }
        Family::Cycle { q, r, l } => {
            if *r < 2 || *q <= *r {
                return Err(Error::BadParameters(format!(
                    "cycle needs 2 <= r < q, got q={q}, r={r}"
                )));
            }
            if *l == 0 || *l >= *r {
                return Err(Error::BadParameters(format!(
                    "cycle overlap l={l} is outside 1..={}",
                    r - 1
                )));
            }
            let step = r - l;
            if q % step != 0 {
                return Err(Error::BadParameters(format!(
                    "cycle needs (r - l) = {step} to divide q = {q}"
                )));
            }
            let mut edges = Vec::new();
            for j in 0..(q / step) {
                let window: Vec<usize> =
                    (0..*r).map(|t| (j * step + t) % q + 1).collect();
                edges.push(window);
            }
            Hypergraph::validate(*q, &edges)
        }
        Family::Fano => {
            let edges = vec![
                vec![1, 2, 4],
                vec![1, 5, 6],
                vec![1, 3, 7],
                vec![2, 3, 5],
                vec![4, 5, 7],
                vec![3, 4, 6],
                vec![2, 6, 7],
            ];
            Hypergraph::validate(7, &edges)
        }
        Family::Star { q, edges } => {
            for edge in edges {
                if !edge.contains(&1) {
                    return Err(Error::BadParameters(format!(
                        "star edge {edge:?} does not contain node 1"
                    )));
                }
            }
            Hypergraph::validate(*q, edges)
        }
    }
}

fn check_complete_params(q: usize, r: usize) -> Result<()> {
    if r < 2 || r > q {
        return Err(Error::BadParameters(format!(
            "complete family needs 2 <= r <= q, got q={q}, r={r}"
        )));
    }
    Ok(())
}

impl FromStr for Family {
    type Err = Error;

    /// Parses family strings such as `complete:q=4,r=3`,
    /// `complete-minus:q=6,r=3,J=[[1,2,3],[4,5,6]]`, `cycle:q=12,r=3,l=2`,
    /// `fano`, and `star:q=5,edges=[[1,2,3],[1,4,5]]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (s.trim(), None),
        };
        let params = rest.map(parse_params).transpose()?.unwrap_or_default();
        let get_usize = |key: &str| -> Result<usize> {
            let raw = params
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Parse(format!("family `{name}` needs `{key}=`")))?;
            raw.parse()
                .map_err(|_| Error::Parse(format!("`{key}={raw}` is not an integer")))
        };
        let get_edges = |key: &str| -> Result<Vec<Vec<usize>>> {
            let raw = params
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Parse(format!("family `{name}` needs `{key}=`")))?;
            serde_json::from_str(raw)
                .map_err(|e| Error::Parse(format!("`{key}={raw}` is not an edge list: {e}")))
        };
        match name {
            "complete" => Ok(Family::Complete {
                q: get_usize("q")?,
                r: get_usize("r")?,
            }),
            "complete-minus" => Ok(Family::CompleteMinus {
                q: get_usize("q")?,
                r: get_usize("r")?,
                removed: get_edges("J")?,
            }),
            "cycle" => Ok(Family::Cycle {
                q: get_usize("q")?,
                r: get_usize("r")?,
                l: get_usize("l")?,
            }),
            "fano" => Ok(Family::Fano),
            "star" => Ok(Family::Star {
                q: get_usize("q")?,
                edges: get_edges("edges")?,
            }),
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

/// Splits `key=value` pairs on top-level commas (commas inside brackets
/// belong to the value).
fn parse_params(s: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'[' => depth += 1,
            b']' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::Parse(format!("unbalanced brackets in `{s}`")))?;
            }
            b',' if depth == 0 => {
                push_param(&s[start..i], &mut out)?;
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in `{s}`")));
    }
    push_param(&s[start..], &mut out)?;
    Ok(out)
}

fn push_param(piece: &str, out: &mut Vec<(String, String)>) -> Result<()> {
    let piece = piece.trim();
    if piece.is_empty() {
        return Ok(());
    }
    let (k, v) = piece
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("expected key=value, got `{piece}`")))?;
    out.push((k.trim().to_string(), v.trim().to_string()));
    Ok(())
}
