//! QUBO and Ising problem representations and the translation between them.
//!
//! A [`QuboInstance`] holds a symmetric matrix `Q`; its energy is the full
//! quadratic form `b^T Q b` over binary vectors. An [`IsingModel`] holds
//! per-spin biases `h`, one coupling per unordered pair `J`, and a constant
//! offset; its energy is `offset - sum_i h_i z_i - sum_{i<j} J_ij z_i z_j`
//! over spin vectors.
//!
//! # Variable convention
//!
//! [`qubo_to_ising`] uses the spin map `z = 1 - 2b` (binary 0 maps to spin
//! +1) and the coefficients
//!
//! ```text
//! h_i    = Q_ii / 2 + (1/2) * sum_{j != i} Q_ij
//! J_ij   = -Q_ij / 2                      for i < j
//! offset = (1/2) * sum_i Q_ii + (1/2) * sum_{i<j} Q_ij
//! ```
//!
//! Under this convention `qubo_energy(q, b) == ising_energy(m, spin(b))`
//! holds exactly for every binary vector, so the minimizing sets of the two
//! problems correspond one-to-one under the variable map. The factor on the
//! pair sum reflects that both `Q_ij` and `Q_ji` contribute to the quadratic
//! form while `J` carries a single entry per pair.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chimera::ChimeraGraph;
use crate::embedding::{validate_embedding, Embedding, LogicalGraph};

/// Largest variable count accepted by the exhaustive minimizers.
pub const BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Debug, Error)]
pub enum QuboIsingError {
    #[error("matrix is not symmetric at ({i},{j}): {a} vs {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("problem must have at least one variable")]
    Empty,
    #[error("configuration length {got} does not match variable count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("coupling index ({i},{j}) invalid for {n} spins")]
    BadCoupling { i: usize, j: usize, n: usize },
    #[error("exhaustive scan refused for n={n}: limit is {limit} variables")]
    TooLargeForBruteForce { n: usize, limit: usize },
    #[error("quantization requires bits >= 1")]
    BadBits,
    #[error("chain strength must be positive (got {0})")]
    BadChainStrength(f64),
    #[error("embedding rejected: {0}")]
    InvalidEmbedding(String),
    #[error("hardware config does not cover qubit {0}")]
    MissingQubitValue(usize),
    #[error("invalid input: {0}")]
    Parse(String),
}

/// Spin values, one of -1 or +1 per variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinConfig(pub Vec<i8>);

/// Binary values, one of 0 or 1 per variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BinaryConfig(pub Vec<u8>);

impl SpinConfig {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl BinaryConfig {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Map a binary vector to spins with `z = 1 - 2b`.
pub fn spin_from_binary(b: &BinaryConfig) -> SpinConfig {
    SpinConfig(b.0.iter().map(|&x| 1 - 2 * (x as i8)).collect())
}

/// Inverse of [`spin_from_binary`].
pub fn binary_from_spin(z: &SpinConfig) -> BinaryConfig {
    BinaryConfig(z.0.iter().map(|&x| ((1 - x) / 2) as u8).collect())
}

/// A QUBO instance: minimize `b^T Q b` over binary vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    n: usize,
    q: Vec<f64>, // row-major n*n, symmetric
}

impl QuboInstance {
    /// Build from a row-major matrix; rejects asymmetric input.
    pub fn from_matrix(n: usize, entries: Vec<f64>) -> Result<Self, QuboIsingError> {
        if n == 0 {
            return Err(QuboIsingError::Empty);
        }
        if entries.len() != n * n {
            return Err(QuboIsingError::Parse(format!(
                "expected {} matrix entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (entries[i * n + j], entries[j * n + i]);
                if a != b {
                    return Err(QuboIsingError::NotSymmetric { i, j, a, b });
                }
            }
        }
        Ok(QuboInstance { n, q: entries })
    }

    /// Build from sparse triplets; each (i, j, v) sets both `Q_ij` and `Q_ji`.
    pub fn from_triplets(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, QuboIsingError> {
        if n == 0 {
            return Err(QuboIsingError::Empty);
        }
        let mut q = vec![0.0; n * n];
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(QuboIsingError::BadCoupling { i, j, n });
            }
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
        Ok(QuboInstance { n, q })
    }

    /// Parse the plain-text input format: either `n` followed by `n*n`
    /// row-major entries, or sparse triplet lines `i j value`. Blank lines
    /// and `#` comments are ignored.
    pub fn parse_text(text: &str) -> Result<Self, QuboIsingError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .peekable();
        let first = lines
            .peek()
            .ok_or_else(|| QuboIsingError::Parse("empty input".into()))?;
        let first_fields: Vec<&str> = first.split_whitespace().collect();
        if first_fields.len() == 3 {
            // sparse triplets
            let mut triplets = Vec::new();
            let mut max_index = 0usize;
            for line in lines {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 3 {
                    return Err(QuboIsingError::Parse(format!(
                        "expected 'i j value' triplet, got: {line}"
                    )));
                }
                let i: usize = parse_field(fields[0])?;
                let j: usize = parse_field(fields[1])?;
                let v: f64 = parse_field(fields[2])?;
                max_index = max_index.max(i).max(j);
                triplets.push((i, j, v));
            }
            QuboInstance::from_triplets(max_index + 1, triplets)
        } else {
            let mut numbers = lines.flat_map(|l| l.split_whitespace());
            let n: usize = parse_field(
                numbers
                    .next()
                    .ok_or_else(|| QuboIsingError::Parse("missing variable count".into()))?,
            )?;
            let entries: Vec<f64> = numbers
                .map(parse_field::<f64>)
                .collect::<Result<_, _>>()?;
            QuboInstance::from_matrix(n, entries)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }
}

fn parse_field<T: std::str::FromStr>(s: &str) -> Result<T, QuboIsingError> {
    s.parse()
        .map_err(|_| QuboIsingError::Parse(format!("bad number: {s}")))
}

/// Full symmetric quadratic form `b^T Q b`.
pub fn qubo_energy(q: &QuboInstance, b: &BinaryConfig) -> Result<f64, QuboIsingError> {
    if b.len() != q.n {
        return Err(QuboIsingError::LengthMismatch {
            expected: q.n,
            got: b.len(),
        });
    }
    let mut total = 0.0;
    for i in 0..q.n {
        if b.0[i] == 0 {
            continue;
        }
        for j in 0..q.n {
            if b.0[j] != 0 {
                total += q.entry(i, j);
            }
        }
    }
    Ok(total)
}

/// An Ising model: biases `h`, couplings `J` keyed by pairs `i < j`, and a
/// constant energy offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IsingJson", into = "IsingJson")]
pub struct IsingModel {
    n: usize,
    h: Vec<f64>,
    j: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

/// Wire form: `{"n":…,"h":[…],"j":[[i,j,v],…],"offset":…}`.
#[derive(Serialize, Deserialize)]
struct IsingJson {
    n: usize,
    h: Vec<f64>,
    j: Vec<(usize, usize, f64)>,
    #[serde(default)]
    offset: f64,
}

impl From<IsingModel> for IsingJson {
    fn from(m: IsingModel) -> Self {
        IsingJson {
            n: m.n,
            h: m.h,
            j: m.j.into_iter().map(|((i, j), v)| (i, j, v)).collect(),
            offset: m.offset,
        }
    }
}

impl TryFrom<IsingJson> for IsingModel {
    type Error = QuboIsingError;

    fn try_from(w: IsingJson) -> Result<Self, QuboIsingError> {
        if w.h.len() != w.n {
            return Err(QuboIsingError::LengthMismatch {
                expected: w.n,
                got: w.h.len(),
            });
        }
        IsingModel::new(w.n, w.h, w.j, w.offset)
    }
}

impl IsingModel {
    /// Build a model; couplings may be given in either order and are stored
    /// with `i < j`. Zero couplings are dropped; self-couplings rejected.
    pub fn new(
        n: usize,
        h: Vec<f64>,
        couplings: impl IntoIterator<Item = (usize, usize, f64)>,
        offset: f64,
    ) -> Result<Self, QuboIsingError> {
        if n == 0 {
            return Err(QuboIsingError::Empty);
        }
        if h.len() != n {
            return Err(QuboIsingError::LengthMismatch {
                expected: n,
                got: h.len(),
            });
        }
        let mut j = BTreeMap::new();
        for (a, b, v) in couplings {
            if a == b || a >= n || b >= n {
                return Err(QuboIsingError::BadCoupling { i: a, j: b, n });
            }
            if v != 0.0 {
                *j.entry((a.min(b), a.max(b))).or_insert(0.0) += v;
            }
        }
        j.retain(|_, v| *v != 0.0);
        Ok(IsingModel { n, h, j, offset })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.j
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Logical connectivity graph: one vertex per spin, one edge per coupling.
    pub fn connectivity(&self) -> LogicalGraph {
        LogicalGraph::new(self.n, self.j.keys().copied())
            .expect("couplings are validated on construction")
    }

    /// Largest absolute bias or coupling.
    pub fn max_abs_parameter(&self) -> f64 {
        let h_max = self.h.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
        let j_max = self.j.values().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
        h_max.max(j_max)
    }
}

/// Ising energy `offset - sum_i h_i z_i - sum_{i<j} J_ij z_i z_j`.
pub fn ising_energy(m: &IsingModel, z: &SpinConfig) -> Result<f64, QuboIsingError> {
    if z.len() != m.n {
        return Err(QuboIsingError::LengthMismatch {
            expected: m.n,
            got: z.len(),
        });
    }
    let mut e = m.offset;
    for (i, &hi) in m.h.iter().enumerate() {
        e -= hi * (z.0[i] as f64);
    }
    for (&(i, j), &v) in &m.j {
        e -= v * (z.0[i] as f64) * (z.0[j] as f64);
    }
    Ok(e)
}

/// Translate a QUBO into the exactly energy-equivalent Ising model under
/// the `z = 1 - 2b` convention (see module docs for the coefficients).
pub fn qubo_to_ising(q: &QuboInstance) -> IsingModel {
    let n = q.n;
    let mut h = vec![0.0; n];
    let mut offset = 0.0;
    let mut couplings = Vec::new();
    for (i, bias) in h.iter_mut().enumerate() {
        let mut row_sum = 0.0;
        for j in 0..n {
            if j != i {
                row_sum += q.entry(i, j);
            }
        }
        *bias = 0.5 * q.entry(i, i) + 0.5 * row_sum;
        offset += 0.5 * q.entry(i, i);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let v = q.entry(i, j);
            offset += 0.5 * v;
            if v != 0.0 {
                couplings.push((i, j, -0.5 * v));
            }
        }
    }
    IsingModel::new(n, h, couplings, offset).expect("translation preserves validity")
}

/// Result of an exhaustive scan: the minimizing configuration (the
/// lexicographically smallest when degenerate), its energy, and how many
/// configurations attain that energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceResult<C> {
    pub best: C,
    pub best_energy: f64,
    pub multiplicity: usize,
}

fn check_brute_force_size(n: usize) -> Result<(), QuboIsingError> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(QuboIsingError::TooLargeForBruteForce {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    Ok(())
}

/// Exhaustive minimum of an Ising model over all `2^n` spin vectors.
pub fn brute_force_argmin_ising(
    m: &IsingModel,
) -> Result<BruteForceResult<SpinConfig>, QuboIsingError> {
    check_brute_force_size(m.n)?;
    let n = m.n;
    let mut best: Option<(SpinConfig, f64, usize)> = None;
    for mask in 0u64..(1u64 << n) {
        // bit of variable 0 is the most significant so that mask order is
        // lexicographic order with -1 < +1
        let z = SpinConfig(
            (0..n)
                .map(|i| if mask >> (n - 1 - i) & 1 == 1 { 1 } else { -1 })
                .collect(),
        );
        let e = ising_energy(m, &z)?;
        match &mut best {
            None => best = Some((z, e, 1)),
            Some((_, be, count)) if e == *be => *count += 1,
            Some((bz, be, count)) if e < *be => {
                *bz = z;
                *be = e;
                *count = 1;
            }
            _ => {}
        }
    }
    let (best, best_energy, multiplicity) = best.expect("n >= 1");
    Ok(BruteForceResult {
        best,
        best_energy,
        multiplicity,
    })
}

/// Exhaustive minimum of a QUBO over all `2^n` binary vectors.
pub fn brute_force_argmin_qubo(
    q: &QuboInstance,
) -> Result<BruteForceResult<BinaryConfig>, QuboIsingError> {
    check_brute_force_size(q.n)?;
    let n = q.n;
    let mut best: Option<(BinaryConfig, f64, usize)> = None;
    for mask in 0u64..(1u64 << n) {
        let b = BinaryConfig(
            (0..n)
                .map(|i| (mask >> (n - 1 - i) & 1) as u8)
                .collect(),
        );
        let e = qubo_energy(q, &b)?;
        match &mut best {
            None => best = Some((b, e, 1)),
            Some((_, be, count)) if e == *be => *count += 1,
            Some((bb, be, count)) if e < *be => {
                *bb = b;
                *be = e;
                *count = 1;
            }
            _ => {}
        }
    }
    let (best, best_energy, multiplicity) = best.expect("n >= 1");
    Ok(BruteForceResult {
        best,
        best_energy,
        multiplicity,
    })
}

/// Rescale parameters to max-abs 1 and round each to the nearest of
/// `2^bits` uniformly spaced levels in [-1, 1], ties away from zero.
/// The offset is unchanged; an all-zero model is returned as-is.
pub fn quantize_parameters(m: &IsingModel, bits: u32) -> Result<IsingModel, QuboIsingError> {
    if bits < 1 {
        return Err(QuboIsingError::BadBits);
    }
    let scale = m.max_abs_parameter();
    if scale == 0.0 {
        return Ok(m.clone());
    }
    let levels = 2f64.powi(bits as i32);
    let h = m.h.iter().map(|&v| snap_to_grid(v / scale, levels)).collect();
    let couplings: Vec<(usize, usize, f64)> = m
        .j
        .iter()
        .map(|(&(i, j), &v)| (i, j, snap_to_grid(v / scale, levels)))
        .collect();
    IsingModel::new(m.n, h, couplings, m.offset)
}

/// Nearest of `levels` uniformly spaced points in [-1, 1]; exact ties pick
/// the level of larger magnitude (and +1 over -1 at zero).
fn snap_to_grid(v: f64, levels: f64) -> f64 {
    let step = 2.0 / (levels - 1.0);
    let idx = ((v + 1.0) / step).floor();
    let lo = (-1.0 + idx * step).clamp(-1.0, 1.0);
    let hi = (-1.0 + (idx + 1.0) * step).clamp(-1.0, 1.0);
    let (dl, dh) = ((v - lo).abs(), (v - hi).abs());
    if dl < dh {
        lo
    } else if dh < dl {
        hi
    } else if lo.abs() > hi.abs() {
        lo
    } else {
        hi
    }
}

/// `k * max(|h|_max, |J|_max, 1e-12)`; the floor keeps the value positive
/// for all-zero models.
pub fn default_chain_strength(m: &IsingModel, k: f64) -> f64 {
    k * m.max_abs_parameter().max(1e-12)
}

/// Map a logical model onto hardware qubits through an embedding.
///
/// Biases are split equally across each vertex model, couplings equally
/// across all physical edges between the two vertex models, and every
/// physical edge inside a vertex model receives `+chain_strength`
/// (ferromagnetic under the `-J z z` sign convention). For chain-aligned
/// configurations the hardware energy equals the logical energy minus
/// `chain_strength *` (total chain edges) exactly.
pub fn embed_parameters(
    m: &IsingModel,
    e: &Embedding,
    hw: &ChimeraGraph,
    chain_strength: f64,
) -> Result<IsingModel, QuboIsingError> {
    if chain_strength.is_nan() || chain_strength <= 0.0 {
        return Err(QuboIsingError::BadChainStrength(chain_strength));
    }
    let report = validate_embedding(&m.connectivity(), hw, e);
    if !report.valid {
        return Err(QuboIsingError::InvalidEmbedding(report.describe()));
    }
    let slots = hw.id_slots();
    let mut h = vec![0.0; slots];
    let mut couplings: BTreeMap<(usize, usize), f64> = BTreeMap::new();

    for (v, model) in e.vertex_models() {
        let share = m.h[*v] / model.len() as f64;
        for &q in model {
            h[q] += share;
        }
        // chain couplers: every physical edge inside the vertex model
        for &a in model {
            for &b in model {
                if a < b && hw.has_edge(a, b) {
                    *couplings.entry((a, b)).or_insert(0.0) += chain_strength;
                }
            }
        }
    }
    for (&(u, v), &jv) in &m.j {
        let mu = e.model(u).expect("validated");
        let mv = e.model(v).expect("validated");
        let mut phys = Vec::new();
        for &a in mu {
            for &b in mv {
                if hw.has_edge(a, b) {
                    phys.push((a.min(b), a.max(b)));
                }
            }
        }
        let share = jv / phys.len() as f64;
        for key in phys {
            *couplings.entry(key).or_insert(0.0) += share;
        }
    }
    IsingModel::new(
        slots,
        h,
        couplings.into_iter().map(|((a, b), v)| (a, b, v)),
        m.offset,
    )
}

/// Extend a logical spin configuration to hardware by copying each logical
/// spin across its vertex model; qubits outside every model read +1.
pub fn chain_extend(
    logical: &SpinConfig,
    e: &Embedding,
    hw_slots: usize,
) -> Result<SpinConfig, QuboIsingError> {
    let mut out = vec![1i8; hw_slots];
    for (v, model) in e.vertex_models() {
        let value = *logical
            .0
            .get(*v)
            .ok_or(QuboIsingError::LengthMismatch {
                expected: v + 1,
                got: logical.len(),
            })?;
        for &q in model {
            if q >= hw_slots {
                return Err(QuboIsingError::MissingQubitValue(q));
            }
            out[q] = value;
        }
    }
    Ok(SpinConfig(out))
}
