//! Chimera hardware connectivity graphs.
//!
//! A Chimera graph is an `M`-by-`N` lattice of complete bipartite K(L,L)
//! unit cells. Each cell holds `2L` qubits in two orientations; orientation
//! 0 qubits couple to the same-index qubit of the vertically adjacent cell,
//! orientation 1 qubits to the horizontally adjacent cell. Fabrication
//! faults are applied as a [`FaultMask`] that deactivates qubits and
//! couplers; graphs are immutable once built, so fault application returns
//! a new graph.
//!
//! Qubit ids are assigned as
//! `id = ((row * N + col) * 2 + orientation) * L + index`,
//! which keeps ids stable across serialization.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hardware qubit identifier.
pub type QubitId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChimeraError {
    #[error("chimera dimensions must all be at least 1 (got m={m}, n={n}, l={l})")]
    InvalidDimensions { m: usize, n: usize, l: usize },
    #[error("qubit id {0} is out of range for this graph")]
    QubitOutOfRange(QubitId),
}

/// Deactivated qubits and couplers, as identified during calibration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultMask {
    #[serde(default)]
    pub dead_qubits: BTreeSet<QubitId>,
    #[serde(default)]
    pub dead_couplers: BTreeSet<(QubitId, QubitId)>,
}

impl FaultMask {
    pub fn is_empty(&self) -> bool {
        self.dead_qubits.is_empty() && self.dead_couplers.is_empty()
    }
}

/// Node count, edge count and degree histogram of the active graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    /// degree -> number of active nodes with that degree
    pub degree_histogram: BTreeMap<usize, usize>,
}

/// An immutable Chimera connectivity graph with faults applied.
///
/// Serializes as `{"m":…,"n":…,"l":…,"dead_qubits":[…],"dead_couplers":[[a,b],…]}`;
/// edges are regenerated on load, never stored.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ChimeraSpec", into = "ChimeraSpec")]
pub struct ChimeraGraph {
    m: usize,
    n: usize,
    l: usize,
    dead_qubits: BTreeSet<QubitId>,
    dead_couplers: BTreeSet<(QubitId, QubitId)>,
    nodes: BTreeSet<QubitId>,
    adjacency: BTreeMap<QubitId, BTreeSet<QubitId>>,
}

#[derive(Serialize, Deserialize)]
struct ChimeraSpec {
    m: usize,
    n: usize,
    #[serde(default = "default_l")]
    l: usize,
    #[serde(default)]
    dead_qubits: BTreeSet<QubitId>,
    #[serde(default)]
    dead_couplers: BTreeSet<(QubitId, QubitId)>,
}

fn default_l() -> usize {
    4
}

impl From<ChimeraGraph> for ChimeraSpec {
    fn from(g: ChimeraGraph) -> Self {
        ChimeraSpec {
            m: g.m,
            n: g.n,
            l: g.l,
            dead_qubits: g.dead_qubits,
            dead_couplers: g.dead_couplers,
        }
    }
}

impl TryFrom<ChimeraSpec> for ChimeraGraph {
    type Error = ChimeraError;

    fn try_from(s: ChimeraSpec) -> Result<Self, ChimeraError> {
        let base = build_chimera(s.m, s.n, s.l)?;
        base.apply_faults(&FaultMask {
            dead_qubits: s.dead_qubits,
            dead_couplers: s.dead_couplers,
        })
    }
}

impl PartialEq for ChimeraGraph {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
            && self.n == other.n
            && self.l == other.l
            && self.nodes == other.nodes
            && self.adjacency == other.adjacency
    }
}

impl Eq for ChimeraGraph {}

/// Build a fault-free `m`-by-`n` Chimera graph with K(`l`,`l`) cells.
pub fn build_chimera(m: usize, n: usize, l: usize) -> Result<ChimeraGraph, ChimeraError> {
    if m < 1 || n < 1 || l < 1 {
        return Err(ChimeraError::InvalidDimensions { m, n, l });
    }
    let mut g = ChimeraGraph {
        m,
        n,
        l,
        dead_qubits: BTreeSet::new(),
        dead_couplers: BTreeSet::new(),
        nodes: BTreeSet::new(),
        adjacency: BTreeMap::new(),
    };
    g.rebuild();
    Ok(g)
}

impl ChimeraGraph {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Size of the qubit id space, `2*l*m*n`. Ids of dead qubits still count.
    pub fn id_slots(&self) -> usize {
        2 * self.l * self.m * self.n
    }

    /// Id of the qubit at (`row`, `col`, `orientation`, `index`).
    pub fn qubit_id(&self, row: usize, col: usize, orientation: usize, index: usize) -> QubitId {
        ((row * self.n + col) * 2 + orientation) * self.l + index
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn contains_node(&self, q: QubitId) -> bool {
        self.nodes.contains(&q)
    }

    pub fn has_edge(&self, a: QubitId, b: QubitId) -> bool {
        self.adjacency.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn nodes(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.nodes.iter().copied()
    }

    /// Active edges as unordered pairs with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (QubitId, QubitId)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&a, nbrs)| nbrs.iter().copied().filter(move |&b| a < b).map(move |b| (a, b)))
    }

    /// Active neighbors of `q`; empty for dead or out-of-range ids.
    pub fn neighbors(&self, q: QubitId) -> impl Iterator<Item = QubitId> + '_ {
        self.adjacency.get(&q).into_iter().flatten().copied()
    }

    pub fn degree(&self, q: QubitId) -> usize {
        self.adjacency.get(&q).map_or(0, |s| s.len())
    }

    /// Return a new graph with `mask` applied on top of the existing faults.
    pub fn apply_faults(&self, mask: &FaultMask) -> Result<ChimeraGraph, ChimeraError> {
        let slots = self.id_slots();
        for &q in &mask.dead_qubits {
            if q >= slots {
                return Err(ChimeraError::QubitOutOfRange(q));
            }
        }
        for &(a, b) in &mask.dead_couplers {
            if a >= slots {
                return Err(ChimeraError::QubitOutOfRange(a));
            }
            if b >= slots {
                return Err(ChimeraError::QubitOutOfRange(b));
            }
        }
        let mut next = self.clone();
        next.dead_qubits.extend(mask.dead_qubits.iter().copied());
        next.dead_couplers
            .extend(mask.dead_couplers.iter().map(|&(a, b)| (a.min(b), a.max(b))));
        next.rebuild();
        Ok(next)
    }

    pub fn graph_stats(&self) -> GraphStats {
        let mut degree_histogram = BTreeMap::new();
        for nbrs in self.adjacency.values() {
            *degree_histogram.entry(nbrs.len()).or_insert(0) += 1;
        }
        GraphStats {
            nodes: self.num_nodes(),
            edges: self.num_edges(),
            degree_histogram,
        }
    }

    fn rebuild(&mut self) {
        self.nodes = (0..self.id_slots())
            .filter(|q| !self.dead_qubits.contains(q))
            .collect();
        self.adjacency = self.nodes.iter().map(|&q| (q, BTreeSet::new())).collect();
        for (a, b) in self.candidate_edges() {
            let key = (a.min(b), a.max(b));
            if self.dead_qubits.contains(&a)
                || self.dead_qubits.contains(&b)
                || self.dead_couplers.contains(&key)
            {
                continue;
            }
            self.adjacency.get_mut(&a).unwrap().insert(b);
            self.adjacency.get_mut(&b).unwrap().insert(a);
        }
    }

    /// All couplers of the fault-free lattice.
    fn candidate_edges(&self) -> Vec<(QubitId, QubitId)> {
        let (m, n, l) = (self.m, self.n, self.l);
        let mut edges = Vec::new();
        for row in 0..m {
            for col in 0..n {
                // in-cell complete bipartite couplers
                for i in 0..l {
                    for j in 0..l {
                        edges.push((self.qubit_id(row, col, 0, i), self.qubit_id(row, col, 1, j)));
                    }
                }
                // orientation 0 couples vertically, orientation 1 horizontally
                if row + 1 < m {
                    for i in 0..l {
                        edges.push((
                            self.qubit_id(row, col, 0, i),
                            self.qubit_id(row + 1, col, 0, i),
                        ));
                    }
                }
                if col + 1 < n {
                    for i in 0..l {
                        edges.push((
                            self.qubit_id(row, col, 1, i),
                            self.qubit_id(row, col + 1, 1, i),
                        ));
                    }
                }
            }
        }
        edges
    }
}

/// Closed-form node count of a fault-free graph: `2*l*m*n`.
pub fn node_count_formula(m: usize, n: usize, l: usize) -> usize {
    2 * l * m * n
}

/// Closed-form edge count of a fault-free graph with `l = 4`:
/// `4*(2*m*n - m - n) + 16*m*n`.
pub fn edge_count_formula_l4(m: usize, n: usize) -> usize {
    4 * (2 * m * n - m - n) + 16 * m * n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn production_lattice_sizes() {
        let g8 = build_chimera(8, 8, 4).unwrap();
        assert_eq!(g8.num_nodes(), 512);
        assert_eq!(g8.num_edges(), 1472);
        assert_eq!(g8.num_edges(), edge_count_formula_l4(8, 8));

        let g12 = build_chimera(12, 12, 4).unwrap();
        assert_eq!(g12.num_nodes(), 1152);
        assert_eq!(g12.num_edges(), 3360);
    }

    #[test]
    fn single_cell() {
        let g = build_chimera(1, 1, 4).unwrap();
        assert_eq!(g.num_nodes(), 8);
        assert_eq!(g.num_edges(), 16);
        let stats = g.graph_stats();
        assert_eq!(stats.degree_histogram, BTreeMap::from([(4, 8)]));
    }

    #[test]
    fn degree_histogram_12x12() {
        let g = build_chimera(12, 12, 4).unwrap();
        let stats = g.graph_stats();
        assert_eq!(stats.degree_histogram, BTreeMap::from([(5, 192), (6, 960)]));
        // boundary-orientation node count is 8*m + 8*n
        assert_eq!(stats.degree_histogram[&5], 8 * 12 + 8 * 12);
    }

    #[test]
    fn closed_forms_hold_up_to_16() {
        for m in 1..=16 {
            for n in 1..=16 {
                let g = build_chimera(m, n, 4).unwrap();
                assert_eq!(g.num_nodes(), node_count_formula(m, n, 4), "m={m} n={n}");
                assert_eq!(g.num_edges(), edge_count_formula_l4(m, n), "m={m} n={n}");
                let degree_sum: usize = g.nodes().map(|q| g.degree(q)).sum();
                assert_eq!(degree_sum, 2 * g.num_edges());
            }
        }
    }

    #[test]
    fn rejects_zero_dimension() {
        assert_eq!(
            build_chimera(0, 8, 4).unwrap_err(),
            ChimeraError::InvalidDimensions { m: 0, n: 8, l: 4 }
        );
        assert!(build_chimera(1, 1, 0).is_err());
    }

    #[test]
    fn empty_mask_is_identity() {
        let g = build_chimera(1, 1, 4).unwrap();
        let h = g.apply_faults(&FaultMask::default()).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn dead_qubit_removes_incident_edges() {
        let g = build_chimera(1, 1, 4).unwrap();
        let mask = FaultMask {
            dead_qubits: BTreeSet::from([0]),
            dead_couplers: BTreeSet::new(),
        };
        let h = g.apply_faults(&mask).unwrap();
        assert_eq!(h.num_nodes(), 7);
        assert_eq!(h.num_edges(), 12);
        // original untouched
        assert_eq!(g.num_nodes(), 8);
    }

    #[test]
    fn dead_intercell_coupler() {
        let g = build_chimera(2, 1, 4).unwrap();
        assert_eq!(g.num_edges(), 36);
        let a = g.qubit_id(0, 0, 0, 0);
        let b = g.qubit_id(1, 0, 0, 0);
        assert!(g.has_edge(a, b));
        let mask = FaultMask {
            dead_qubits: BTreeSet::new(),
            dead_couplers: BTreeSet::from([(b, a)]),
        };
        let h = g.apply_faults(&mask).unwrap();
        assert_eq!(h.num_nodes(), 16);
        assert_eq!(h.num_edges(), 35);
        assert!(!h.has_edge(a, b));
    }

    #[test]
    fn out_of_range_fault_rejected() {
        let g = build_chimera(1, 1, 4).unwrap();
        let mask = FaultMask {
            dead_qubits: BTreeSet::from([8]),
            dead_couplers: BTreeSet::new(),
        };
        assert_eq!(g.apply_faults(&mask).unwrap_err(), ChimeraError::QubitOutOfRange(8));
    }

    #[test]
    fn fault_application_idempotent_and_commutative() {
        let g = build_chimera(3, 2, 4).unwrap();
        let a = FaultMask {
            dead_qubits: BTreeSet::from([1, 17]),
            dead_couplers: BTreeSet::from([(4, 12)]),
        };
        let b = FaultMask {
            dead_qubits: BTreeSet::from([30]),
            dead_couplers: BTreeSet::new(),
        };
        let once = g.apply_faults(&a).unwrap();
        let twice = once.apply_faults(&a).unwrap();
        assert_eq!(once, twice);
        let ab = g.apply_faults(&a).unwrap().apply_faults(&b).unwrap();
        let ba = g.apply_faults(&b).unwrap().apply_faults(&a).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn json_round_trip() {
        let g = build_chimera(2, 2, 4).unwrap();
        let mask = FaultMask {
            dead_qubits: BTreeSet::from([5]),
            dead_couplers: BTreeSet::from([(0, 16)]),
        };
        let g = g.apply_faults(&mask).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.contains("\"dead_qubits\":[5]"));
        let back: ChimeraGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(g, back);
    }
}
