//! Minor embedding of logical problem graphs into Chimera hardware.
//!
//! An embedding maps every logical vertex to a nonempty, connected,
//! pairwise-disjoint set of hardware qubits (its vertex model) such that
//! every logical edge is realized by at least one physical coupler between
//! the corresponding models. [`validate_embedding`] checks exactly these
//! conditions and reports all violations; [`find_embedding_cmr`] searches
//! for an embedding with the randomized shortest-path heuristic of Cai,
//! Macready and Roy, and only returns embeddings that pass the validator.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chimera::{ChimeraGraph, QubitId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("logical graph must have at least one vertex")]
    EmptyGraph,
    #[error("edge ({0},{1}) is invalid for this vertex count")]
    BadEdge(usize, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("hardware graph has no active qubits")]
    EmptyHardware,
    #[error("vertex model for {0} is empty")]
    EmptyModel(usize),
    #[error("invalid input: {0}")]
    Parse(String),
}

/// Logical problem graph: vertices `0..n` and undirected edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<BTreeSet<usize>>,
}

impl LogicalGraph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, EmbeddingError> {
        if n == 0 {
            return Err(EmbeddingError::EmptyGraph);
        }
        let mut set = BTreeSet::new();
        let mut adjacency = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            if u == v {
                return Err(EmbeddingError::SelfLoop(u));
            }
            if u >= n || v >= n {
                return Err(EmbeddingError::BadEdge(u, v));
            }
            set.insert((u.min(v), u.max(v)));
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
        Ok(LogicalGraph {
            n,
            edges: set,
            adjacency,
        })
    }

    /// Parse edge-list text, one `u v` pair per line. Vertex count is the
    /// largest index seen plus one; `#` comments and blank lines ignored.
    pub fn from_edge_list_text(text: &str) -> Result<Self, EmbeddingError> {
        let mut edges = Vec::new();
        let mut max_index = 0usize;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(EmbeddingError::Parse(format!(
                    "expected 'u v' edge line, got: {line}"
                )));
            }
            let u: usize = fields[0]
                .parse()
                .map_err(|_| EmbeddingError::Parse(format!("bad vertex: {}", fields[0])))?;
            let v: usize = fields[1]
                .parse()
                .map_err(|_| EmbeddingError::Parse(format!("bad vertex: {}", fields[1])))?;
            max_index = max_index.max(u).max(v);
            edges.push((u, v));
        }
        if edges.is_empty() {
            return Err(EmbeddingError::Parse("no edges in input".into()));
        }
        LogicalGraph::new(max_index + 1, edges)
    }

    pub fn complete(n: usize) -> Result<Self, EmbeddingError> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        LogicalGraph::new(n, edges)
    }

    pub fn path(n: usize) -> Result<Self, EmbeddingError> {
        LogicalGraph::new(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().copied()
    }
}

/// Map from each logical vertex to its hardware vertex model.
///
/// Serializes as `{"vertex_models": {"0": [q, …], …}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    vertex_models: BTreeMap<usize, BTreeSet<QubitId>>,
}

impl Embedding {
    pub fn new(
        models: impl IntoIterator<Item = (usize, Vec<QubitId>)>,
    ) -> Result<Self, EmbeddingError> {
        let mut vertex_models = BTreeMap::new();
        for (v, qubits) in models {
            if qubits.is_empty() {
                return Err(EmbeddingError::EmptyModel(v));
            }
            vertex_models.insert(v, qubits.into_iter().collect());
        }
        Ok(Embedding { vertex_models })
    }

    pub fn vertex_models(&self) -> impl Iterator<Item = (&usize, &BTreeSet<QubitId>)> {
        self.vertex_models.iter()
    }

    pub fn model(&self, v: usize) -> Option<&BTreeSet<QubitId>> {
        self.vertex_models.get(&v)
    }

    /// Number of distinct hardware qubits used.
    pub fn qubits_used(&self) -> usize {
        self.vertex_models
            .values()
            .flatten()
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Size of the largest vertex model.
    pub fn max_chain(&self) -> usize {
        self.vertex_models.values().map(|m| m.len()).max().unwrap_or(0)
    }
}

/// A single validation failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    EmptyModel { vertex: usize },
    InactiveQubit { vertex: usize, qubit: QubitId },
    Overlap { a: usize, b: usize, qubit: QubitId },
    DisconnectedModel { vertex: usize },
    UncoveredEdge { u: usize, v: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyModel { vertex } => write!(f, "empty-model: vertex {vertex}"),
            Violation::InactiveQubit { vertex, qubit } => {
                write!(f, "inactive-qubit: vertex {vertex} uses dead/unknown qubit {qubit}")
            }
            Violation::Overlap { a, b, qubit } => {
                write!(f, "overlap: vertices {a} and {b} share qubit {qubit}")
            }
            Violation::DisconnectedModel { vertex } => {
                write!(f, "disconnected-model: vertex {vertex}")
            }
            Violation::UncoveredEdge { u, v } => {
                write!(f, "uncovered-edge: logical edge ({u},{v}) has no physical coupler")
            }
        }
    }
}

/// Result of checking an embedding against the defining conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    pub qubits_used: usize,
    pub max_chain: usize,
}

impl EmbeddingReport {
    pub fn describe(&self) -> String {
        if self.valid {
            "valid".to_string()
        } else {
            self.violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        }
    }
}

/// Check that every logical vertex has a nonempty, connected, disjoint
/// vertex model of active qubits and that every logical edge is realized.
/// All violations are reported, not just the first.
pub fn validate_embedding(g: &LogicalGraph, hw: &ChimeraGraph, e: &Embedding) -> EmbeddingReport {
    let mut violations = Vec::new();
    let mut owner: BTreeMap<QubitId, usize> = BTreeMap::new();

    for v in 0..g.n() {
        match e.model(v) {
            None => violations.push(Violation::EmptyModel { vertex: v }),
            Some(model) if model.is_empty() => {
                violations.push(Violation::EmptyModel { vertex: v })
            }
            Some(model) => {
                let mut active: BTreeSet<QubitId> = BTreeSet::new();
                for &q in model {
                    if !hw.contains_node(q) {
                        violations.push(Violation::InactiveQubit { vertex: v, qubit: q });
                    } else {
                        active.insert(q);
                    }
                    match owner.get(&q) {
                        Some(&prev) => violations.push(Violation::Overlap {
                            a: prev,
                            b: v,
                            qubit: q,
                        }),
                        None => {
                            owner.insert(q, v);
                        }
                    }
                }
                if !active.is_empty() && !is_connected_subset(hw, &active) {
                    violations.push(Violation::DisconnectedModel { vertex: v });
                }
            }
        }
    }

    for (u, v) in g.edges() {
        let covered = match (e.model(u), e.model(v)) {
            (Some(mu), Some(mv)) => mu.iter().any(|&a| {
                mv.iter()
                    .any(|&b| hw.contains_node(a) && hw.contains_node(b) && hw.has_edge(a, b))
            }),
            _ => false,
        };
        if !covered {
            violations.push(Violation::UncoveredEdge { u, v });
        }
    }

    EmbeddingReport {
        valid: violations.is_empty(),
        violations,
        qubits_used: e.qubits_used(),
        max_chain: e.max_chain(),
    }
}

fn is_connected_subset(hw: &ChimeraGraph, subset: &BTreeSet<QubitId>) -> bool {
    let start = match subset.iter().next() {
        Some(&q) => q,
        None => return true,
    };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(q) = stack.pop() {
        for nbr in hw.neighbors(q) {
            if subset.contains(&nbr) && seen.insert(nbr) {
                stack.push(nbr);
            }
        }
    }
    seen.len() == subset.len()
}

/// Total number of physical edges internal to vertex models.
pub fn chain_edge_count(e: &Embedding, hw: &ChimeraGraph) -> usize {
    e.vertex_models()
        .map(|(_, model)| {
            model
                .iter()
                .flat_map(|&a| model.iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| a < b && hw.has_edge(a, b))
                .count()
        })
        .sum()
}

/// Search parameters for [`find_embedding_cmr`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmrParams {
    pub seed: u64,
    pub max_tries: u32,
    pub max_passes: u32,
    /// Base of the usage penalty: a qubit held by `k` models costs
    /// `penalty_base^k` to route through.
    pub penalty_base: f64,
}

impl Default for CmrParams {
    fn default() -> Self {
        CmrParams {
            seed: 0,
            max_tries: 10,
            max_passes: 10,
            penalty_base: 10.0,
        }
    }
}

#[derive(PartialEq)]
struct Cost(f64);

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

type SearchState = (Vec<BTreeSet<QubitId>>, HashMap<QubitId, u32>);

/// settled qubit -> (path cost, parent toward the source model)
type DistanceMap = HashMap<QubitId, (f64, QubitId)>;

struct CmrSearch<'a> {
    g: &'a LogicalGraph,
    hw: &'a ChimeraGraph,
    penalty_base: f64,
    models: Vec<BTreeSet<QubitId>>,
    usage: HashMap<QubitId, u32>,
}

impl<'a> CmrSearch<'a> {
    fn new(g: &'a LogicalGraph, hw: &'a ChimeraGraph, penalty_base: f64) -> Self {
        CmrSearch {
            g,
            hw,
            penalty_base,
            models: vec![BTreeSet::new(); g.n()],
            usage: HashMap::new(),
        }
    }

    fn weight(&self, q: QubitId) -> f64 {
        let count = self.usage.get(&q).copied().unwrap_or(0);
        self.penalty_base.powi(count as i32)
    }

    fn clear_model(&mut self, v: usize) {
        for q in std::mem::take(&mut self.models[v]) {
            if let Some(c) = self.usage.get_mut(&q) {
                *c -= 1;
                if *c == 0 {
                    self.usage.remove(&q);
                }
            }
        }
    }

    fn set_model(&mut self, v: usize, model: BTreeSet<QubitId>) {
        for &q in &model {
            *self.usage.entry(q).or_insert(0) += 1;
        }
        self.models[v] = model;
    }

    /// Usage-weighted multi-source Dijkstra from a vertex model. Returned
    /// distances include the weight of the settled qubit itself; source
    /// qubits have distance zero.
    fn dijkstra(&self, sources: &BTreeSet<QubitId>) -> DistanceMap {
        let mut settled: DistanceMap = HashMap::new();
        let mut heap: BinaryHeap<Reverse<(Cost, QubitId, QubitId)>> = BinaryHeap::new();
        for &s in sources {
            heap.push(Reverse((Cost(0.0), s, s)));
        }
        while let Some(Reverse((Cost(dist), q, parent))) = heap.pop() {
            if settled.contains_key(&q) {
                continue;
            }
            settled.insert(q, (dist, parent));
            for nbr in self.hw.neighbors(q) {
                if !settled.contains_key(&nbr) {
                    heap.push(Reverse((Cost(dist + self.weight(nbr)), nbr, q)));
                }
            }
        }
        settled
    }

    /// Build a vertex model for `v` from shortest paths to every
    /// already-placed neighbor, rooted where the summed distance is least.
    fn find_vertex_model(&self, v: usize, rng: &mut ChaCha8Rng) -> Option<BTreeSet<QubitId>> {
        let placed: Vec<usize> = self
            .g
            .neighbors(v)
            .filter(|&u| !self.models[u].is_empty())
            .collect();

        if placed.is_empty() {
            // fresh start: random qubit among the least-used
            let min_usage = self
                .hw
                .nodes()
                .map(|q| self.usage.get(&q).copied().unwrap_or(0))
                .min()?;
            let candidates: Vec<QubitId> = self
                .hw
                .nodes()
                .filter(|q| self.usage.get(q).copied().unwrap_or(0) == min_usage)
                .collect();
            let q = candidates[rng.gen_range(0..candidates.len())];
            return Some(BTreeSet::from([q]));
        }

        let searches: Vec<(usize, DistanceMap)> = placed
            .iter()
            .map(|&u| (u, self.dijkstra(&self.models[u])))
            .collect();

        // root minimizing the summed path distance, ties to the lowest id;
        // roots inside a placed neighbor's model are skipped
        let mut best: Option<(f64, QubitId)> = None;
        'roots: for q in self.hw.nodes() {
            let mut total = 0.0;
            for (u, dist) in &searches {
                if self.models[*u].contains(&q) {
                    continue 'roots;
                }
                match dist.get(&q) {
                    Some((d, _)) => total += d,
                    None => continue 'roots,
                }
            }
            if best.is_none_or(|(bt, _)| total < bt) {
                best = Some((total, q));
            }
        }
        let (_, root) = best?;

        let mut model = BTreeSet::from([root]);
        for (u, dist) in &searches {
            let mut q = root;
            loop {
                let &(_, parent) = dist.get(&q)?;
                if parent == q {
                    break; // q is a source inside model(u)
                }
                if self.models[*u].contains(&parent) {
                    break;
                }
                model.insert(parent);
                q = parent;
            }
        }
        Some(model)
    }

    fn overfill(&self) -> u32 {
        self.usage.values().map(|&c| c.saturating_sub(1)).sum()
    }

    fn total_size(&self) -> usize {
        self.models.iter().map(|m| m.len()).sum()
    }

    fn snapshot(&self) -> SearchState {
        (self.models.clone(), self.usage.clone())
    }

    fn restore(&mut self, state: SearchState) {
        self.models = state.0;
        self.usage = state.1;
    }

    /// Resolve qubits shared by several models by releasing them from
    /// models that stay connected and edge-covering without them.
    fn resolve_shared(&mut self) -> bool {
        loop {
            let shared: Vec<QubitId> = {
                let mut keys: Vec<QubitId> =
                    self.usage.iter().filter(|(_, &c)| c > 1).map(|(&q, _)| q).collect();
                keys.sort_unstable();
                keys
            };
            if shared.is_empty() {
                return true;
            }
            let mut progress = false;
            for q in shared {
                while self.usage.get(&q).copied().unwrap_or(0) > 1 {
                    // release from the largest model first; ties by vertex id
                    let mut owners: Vec<usize> = (0..self.g.n())
                        .filter(|&v| self.models[v].contains(&q))
                        .collect();
                    owners.sort_by_key(|&v| (std::cmp::Reverse(self.models[v].len()), v));
                    let mut released = false;
                    for &v in &owners {
                        if self.can_release(v, q) {
                            self.models[v].remove(&q);
                            if let Some(c) = self.usage.get_mut(&q) {
                                *c -= 1;
                            }
                            released = true;
                            progress = true;
                            break;
                        }
                    }
                    if !released {
                        break;
                    }
                }
            }
            if !progress {
                return false;
            }
        }
    }

    /// Whether model(v) minus `q` is still nonempty, connected, and covers
    /// every logical edge at `v` whose other endpoint is placed.
    fn can_release(&self, v: usize, q: QubitId) -> bool {
        let mut reduced = self.models[v].clone();
        reduced.remove(&q);
        if reduced.is_empty() || !is_connected_subset(self.hw, &reduced) {
            return false;
        }
        for u in self.g.neighbors(v) {
            if self.models[u].is_empty() {
                continue;
            }
            let covered = reduced
                .iter()
                .any(|&a| self.models[u].iter().any(|&b| self.hw.has_edge(a, b)));
            if !covered {
                return false;
            }
        }
        true
    }

    fn to_embedding(&self) -> Result<Embedding, EmbeddingError> {
        Embedding::new(
            self.models
                .iter()
                .enumerate()
                .map(|(v, m)| (v, m.iter().copied().collect())),
        )
    }
}

/// Find a minor embedding of `g` into `hw` with the randomized
/// usage-penalized shortest-path heuristic. Returns `Ok(None)` when no
/// embedding was found within `max_tries` restarts; any returned embedding
/// passes [`validate_embedding`]. Deterministic for a fixed seed.
pub fn find_embedding_cmr(
    g: &LogicalGraph,
    hw: &ChimeraGraph,
    params: &CmrParams,
) -> Result<Option<Embedding>, EmbeddingError> {
    if g.n() == 0 {
        return Err(EmbeddingError::EmptyGraph);
    }
    if hw.num_nodes() == 0 {
        return Err(EmbeddingError::EmptyHardware);
    }

    for try_index in 0..params.max_tries.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(
            params
                .seed
                .wrapping_add((try_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.shuffle(&mut rng);

        let mut search = CmrSearch::new(g, hw, params.penalty_base);
        let mut placement_failed = false;
        for &v in &order {
            match search.find_vertex_model(v, &mut rng) {
                Some(model) => search.set_model(v, model),
                None => {
                    placement_failed = true;
                    break;
                }
            }
        }
        if placement_failed {
            continue;
        }

        // improvement passes re-route one vertex at a time; whenever the
        // sharing is gone (or small enough for cleanup) attempt to finish
        let mut best: Option<(u32, usize, SearchState)> = None;
        for pass in 0..=params.max_passes {
            if pass > 0 {
                let mut rerouted = true;
                for &v in &order {
                    search.clear_model(v);
                    match search.find_vertex_model(v, &mut rng) {
                        Some(model) => search.set_model(v, model),
                        None => {
                            rerouted = false;
                            break;
                        }
                    }
                }
                if !rerouted {
                    break;
                }
            }
            let overfill = search.overfill();
            let size = search.total_size();
            if overfill == 0 {
                if let Some(found) = finalize(&search, g, hw)? {
                    return Ok(Some(found));
                }
            } else if overfill <= 2 * g.n() as u32 {
                let saved = search.snapshot();
                if search.resolve_shared() {
                    if let Some(found) = finalize(&search, g, hw)? {
                        return Ok(Some(found));
                    }
                }
                search.restore(saved);
            }
            if best
                .as_ref()
                .is_none_or(|(bo, bs, _)| overfill < *bo || (overfill == *bo && size < *bs))
            {
                best = Some((overfill, size, search.snapshot()));
            }
        }

        // last chance for this try: clean up the best state seen
        if let Some((overfill, _, state)) = best {
            if overfill > 0 {
                search.restore(state);
                if search.resolve_shared() {
                    if let Some(found) = finalize(&search, g, hw)? {
                        return Ok(Some(found));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn finalize(
    search: &CmrSearch<'_>,
    g: &LogicalGraph,
    hw: &ChimeraGraph,
) -> Result<Option<Embedding>, EmbeddingError> {
    if search.overfill() > 0 {
        return Ok(None);
    }
    let candidate = search.to_embedding()?;
    if validate_embedding(g, hw, &candidate).valid {
        Ok(Some(candidate))
    } else {
        Ok(None)
    }
}

/// Worst-case operation count of the embedding search on a logical graph
/// with `nh` vertices and `eh` edges against hardware with `ng` qubits and
/// `eg` couplers: `(EG + NG*log(NG)) * (2*EH) * NH * NG` with natural log.
pub fn worst_case_embedding_ops(nh: f64, eh: f64, ng: f64, eg: f64) -> f64 {
    let ng_log = if ng > 0.0 { ng * ng.ln() } else { 0.0 };
    (eg + ng_log) * (2.0 * eh) * nh * ng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chimera::{build_chimera, FaultMask};

    #[test]
    fn validator_accepts_identity_subgraph() {
        let hw = build_chimera(1, 1, 4).unwrap();
        let g = LogicalGraph::new(2, [(0, 1)]).unwrap();
        let e = Embedding::new([(0, vec![0]), (1, vec![4])]).unwrap();
        let report = validate_embedding(&g, &hw, &e);
        assert!(report.valid, "{}", report.describe());
        assert_eq!(report.qubits_used, 2);
        assert_eq!(report.max_chain, 1);
    }

    #[test]
    fn validator_flags_disconnected_model() {
        let hw = build_chimera(1, 1, 4).unwrap();
        let g = LogicalGraph::new(1, []).unwrap();
        // same-orientation qubits in one cell are not adjacent
        let e = Embedding::new([(0, vec![0, 1])]).unwrap();
        let report = validate_embedding(&g, &hw, &e);
        assert!(!report.valid);
        assert_eq!(
            report.violations,
            vec![Violation::DisconnectedModel { vertex: 0 }]
        );
    }

    #[test]
    fn validator_flags_uncovered_edge_and_overlap() {
        let hw = build_chimera(1, 1, 4).unwrap();
        let g = LogicalGraph::new(2, [(0, 1)]).unwrap();
        let e = Embedding::new([(0, vec![0]), (1, vec![1])]).unwrap();
        let report = validate_embedding(&g, &hw, &e);
        assert_eq!(report.violations, vec![Violation::UncoveredEdge { u: 0, v: 1 }]);

        let shared = Embedding::new([(0, vec![0]), (1, vec![0])]).unwrap();
        let report = validate_embedding(&g, &hw, &shared);
        assert!(report
            .violations
            .contains(&Violation::Overlap { a: 0, b: 1, qubit: 0 }));
    }

    #[test]
    fn validator_reports_inactive_qubit_as_violation() {
        let hw = build_chimera(1, 1, 4)
            .unwrap()
            .apply_faults(&FaultMask {
                dead_qubits: BTreeSet::from([4]),
                dead_couplers: BTreeSet::new(),
            })
            .unwrap();
        let g = LogicalGraph::new(1, []).unwrap();
        let e = Embedding::new([(0, vec![4])]).unwrap();
        let report = validate_embedding(&g, &hw, &e);
        assert_eq!(
            report.violations,
            vec![Violation::InactiveQubit { vertex: 0, qubit: 4 }]
        );
    }

    #[test]
    fn single_edge_embeds_without_chains() {
        let hw = build_chimera(1, 1, 4).unwrap();
        let g = LogicalGraph::new(2, [(0, 1)]).unwrap();
        let e = find_embedding_cmr(&g, &hw, &CmrParams::default())
            .unwrap()
            .expect("an edge embeds into one cell");
        let report = validate_embedding(&g, &hw, &e);
        assert!(report.valid, "{}", report.describe());
        assert_eq!(report.qubits_used, 2);
        assert_eq!(chain_edge_count(&e, &hw), 0);
    }

    #[test]
    fn triangle_forces_a_chain() {
        // K(4,4) is bipartite, so K3 needs at least one multi-qubit model
        let hw = build_chimera(1, 1, 4).unwrap();
        let g = LogicalGraph::complete(3).unwrap();
        let e = find_embedding_cmr(&g, &hw, &CmrParams::default())
            .unwrap()
            .expect("K3 embeds into one cell");
        let report = validate_embedding(&g, &hw, &e);
        assert!(report.valid, "{}", report.describe());
        assert!(report.max_chain >= 2);
    }

    #[test]
    fn path_embeds_into_2x2() {
        let hw = build_chimera(2, 2, 4).unwrap();
        let g = LogicalGraph::path(4).unwrap();
        let e = find_embedding_cmr(&g, &hw, &CmrParams::default())
            .unwrap()
            .expect("P4 is a subgraph of chimera");
        let report = validate_embedding(&g, &hw, &e);
        assert!(report.valid, "{}", report.describe());
        assert!(report.qubits_used >= 4);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let hw = build_chimera(4, 4, 4).unwrap();
        let g = LogicalGraph::complete(5).unwrap();
        let params = CmrParams {
            seed: 42,
            ..CmrParams::default()
        };
        let a = find_embedding_cmr(&g, &hw, &params).unwrap();
        let b = find_embedding_cmr(&g, &hw, &params).unwrap();
        assert_eq!(a, b);
        assert!(a.is_some());
    }

    #[test]
    fn respects_fault_masks() {
        let base = build_chimera(2, 2, 4).unwrap();
        let mask = FaultMask {
            dead_qubits: BTreeSet::from([0, 5, 9, 20]),
            dead_couplers: BTreeSet::from([(4, 12), (1, 6)]),
        };
        let hw = base.apply_faults(&mask).unwrap();
        let g = LogicalGraph::complete(4).unwrap();
        for seed in 0..5 {
            let params = CmrParams {
                seed,
                ..CmrParams::default()
            };
            if let Some(e) = find_embedding_cmr(&g, &hw, &params).unwrap() {
                let report = validate_embedding(&g, &hw, &e);
                assert!(report.valid, "seed {seed}: {}", report.describe());
                for (_, model) in e.vertex_models() {
                    for q in model {
                        assert!(!mask.dead_qubits.contains(q));
                    }
                }
            }
        }
    }

    #[test]
    fn unsatisfiable_target_returns_not_found() {
        let hw = build_chimera(1, 1, 4).unwrap();
        // K9 cannot fit in 8 qubits
        let g = LogicalGraph::complete(9).unwrap();
        let params = CmrParams {
            max_tries: 3,
            max_passes: 3,
            ..CmrParams::default()
        };
        assert_eq!(find_embedding_cmr(&g, &hw, &params).unwrap(), None);
    }

    #[test]
    fn worst_case_ops_examples() {
        assert_eq!(worst_case_embedding_ops(5.0, 0.0, 1152.0, 3360.0), 0.0);

        let v = worst_case_embedding_ops(2.0, 1.0, 1152.0, 3360.0);
        assert!((v - 5.291e7).abs() / v < 1e-3, "{v}");

        let k30 = worst_case_embedding_ops(30.0, 435.0, 1152.0, 3360.0);
        let by_hand = (3360.0 + 1152.0 * 1152f64.ln()) * (2.0 * 435.0) * 30.0 * 1152.0;
        assert_eq!(k30, by_hand);
        assert!((k30 - 3.452e11).abs() / k30 < 1e-3, "{k30}");
    }

    #[test]
    fn edge_list_text_round_trip() {
        let g = LogicalGraph::from_edge_list_text("0 1\n1 2\n# comment\n2 0\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.num_edges(), 3);
        assert!(LogicalGraph::from_edge_list_text("0\n").is_err());
    }

    #[test]
    fn embedding_json_shape() {
        let e = Embedding::new([(0, vec![3, 1]), (1, vec![7])]).unwrap();
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"vertex_models":{"0":[1,3],"1":[7]}}"#);
        let back: Embedding = serde_json::from_str(&text).unwrap();
        assert_eq!(e, back);
    }
}
