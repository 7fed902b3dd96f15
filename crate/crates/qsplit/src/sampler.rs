//! Stochastic validation of the repetition model and post-processing of
//! annealer readouts: heapsort by energy, multiplicity grouping, and
//! majority-vote unembedding.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::Embedding;
use crate::qubo_ising::{ising_energy, IsingModel, SpinConfig};

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("success probability must lie strictly inside (0,1), got {0}")]
    BadProbability(f64),
    #[error("repetition count and trial count must be at least 1")]
    BadCounts,
    #[error("readout set is empty")]
    EmptyReadoutSet,
    #[error("readout energy is NaN")]
    NanEnergy,
    #[error("hardware config does not cover qubit {0}")]
    MissingQubitValue(usize),
    #[error("no vertex model for logical vertex {0}")]
    MissingVertexModel(usize),
    #[error("invalid readout line: {0}")]
    Parse(String),
}

/// One annealer readout: a hardware spin configuration and its energy.
///
/// Serialized one JSON object per line: `{"config":[±1,…],"energy":…}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Readout {
    pub config: SpinConfig,
    pub energy: f64,
}

pub fn readouts_from_json_lines(text: &str) -> Result<Vec<Readout>, SamplerError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| SamplerError::Parse(format!("{l}: {e}"))))
        .collect()
}

/// Check that every readout's energy matches the model's energy for its
/// configuration, to within `tol` absolute.
pub fn energies_consistent(readouts: &[Readout], model: &IsingModel, tol: f64) -> bool {
    readouts.iter().all(|r| {
        ising_energy(model, &r.config)
            .map(|e| (e - r.energy).abs() <= tol)
            .unwrap_or(false)
    })
}

pub fn readouts_to_json_lines(readouts: &[Readout]) -> String {
    readouts
        .iter()
        .map(|r| serde_json::to_string(r).expect("readout serializes"))
        .map(|mut l| {
            l.push('\n');
            l
        })
        .collect()
}

/// A distinct configuration with its energy and how often it was read out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionEntry {
    pub config: SpinConfig,
    pub energy: f64,
    pub multiplicity: usize,
}

/// Readouts grouped and sorted ascending by energy (ties broken
/// lexicographically by configuration); the best entry comes first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionSummary {
    pub entries: Vec<SolutionEntry>,
    pub best_config: SpinConfig,
    pub best_energy: f64,
}

/// Empirical probability that at least one of `s` Bernoulli(`p_s`) runs
/// succeeds, over `trials` independent trials. Deterministic per seed.
pub fn simulate_repetitions(
    p_s: f64,
    s: u64,
    trials: u64,
    seed: u64,
) -> Result<f64, SamplerError> {
    if !(p_s > 0.0 && p_s < 1.0) {
        return Err(SamplerError::BadProbability(p_s));
    }
    if s < 1 || trials < 1 {
        return Err(SamplerError::BadCounts);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0u64;
    for _ in 0..trials {
        for _ in 0..s {
            if rng.gen::<f64>() < p_s {
                successes += 1;
                break;
            }
        }
    }
    Ok(successes as f64 / trials as f64)
}

fn readout_order(a: &Readout, b: &Readout) -> Ordering {
    a.energy
        .total_cmp(&b.energy)
        .then_with(|| a.config.cmp(&b.config))
}

/// In-place binary-heap selection sort over the readouts.
fn heapsort(data: &mut [Readout]) {
    let len = data.len();
    for start in (0..len / 2).rev() {
        sift_down(data, start, len);
    }
    for end in (1..len).rev() {
        data.swap(0, end);
        sift_down(data, 0, end);
    }
}

fn sift_down(data: &mut [Readout], mut root: usize, end: usize) {
    loop {
        let mut child = 2 * root + 1;
        if child >= end {
            return;
        }
        if child + 1 < end && readout_order(&data[child], &data[child + 1]) == Ordering::Less {
            child += 1;
        }
        if readout_order(&data[root], &data[child]) == Ordering::Less {
            data.swap(root, child);
            root = child;
        } else {
            return;
        }
    }
}

/// Sort readouts ascending by energy with heapsort and group equal
/// configurations with their multiplicity.
pub fn heapsort_readouts(readouts: &[Readout]) -> Result<SolutionSummary, SamplerError> {
    if readouts.is_empty() {
        return Err(SamplerError::EmptyReadoutSet);
    }
    if readouts.iter().any(|r| r.energy.is_nan()) {
        return Err(SamplerError::NanEnergy);
    }
    let mut sorted = readouts.to_vec();
    heapsort(&mut sorted);

    let mut entries: Vec<SolutionEntry> = Vec::new();
    for readout in sorted {
        match entries.last_mut() {
            Some(last) if last.energy == readout.energy && last.config == readout.config => {
                last.multiplicity += 1;
            }
            _ => entries.push(SolutionEntry {
                config: readout.config,
                energy: readout.energy,
                multiplicity: 1,
            }),
        }
    }
    let best = &entries[0];
    Ok(SolutionSummary {
        best_config: best.config.clone(),
        best_energy: best.energy,
        entries,
    })
}

/// Collapse a hardware readout to a logical configuration: each logical
/// spin is the majority vote over its vertex model, exact ties resolve
/// to +1. Vertex models must exist for every vertex `0..n`.
pub fn unembed_readout(
    hw_config: &SpinConfig,
    e: &Embedding,
) -> Result<SpinConfig, SamplerError> {
    let n = e
        .vertex_models()
        .map(|(&v, _)| v + 1)
        .max()
        .unwrap_or(0);
    let mut logical = Vec::with_capacity(n);
    for v in 0..n {
        let model = e.model(v).ok_or(SamplerError::MissingVertexModel(v))?;
        let mut balance = 0i64;
        for &q in model {
            let value = hw_config
                .0
                .get(q)
                .copied()
                .ok_or(SamplerError::MissingQubitValue(q))?;
            balance += value as i64;
        }
        logical.push(if balance >= 0 { 1 } else { -1 });
    }
    Ok(SpinConfig(logical))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chimera::build_chimera;
    use crate::embedding::{find_embedding_cmr, CmrParams, LogicalGraph};
    use crate::qubo_ising::chain_extend;
    use rand::Rng;

    #[test]
    fn simulation_tracks_binomial_expectation() {
        let trials = 100_000u64;
        let empirical = simulate_repetitions(0.7, 4, trials, 17).unwrap();
        let expected = 1.0 - 0.3f64.powi(4);
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!(
            (empirical - expected).abs() <= 3.0 * sigma,
            "{empirical} vs {expected} (3s = {})",
            3.0 * sigma
        );

        let single = simulate_repetitions(0.7, 1, trials, 18).unwrap();
        let sigma1 = (0.7 * 0.3 / trials as f64).sqrt();
        assert!((single - 0.7).abs() <= 3.0 * sigma1);

        let near_certain = simulate_repetitions(0.5, 20, trials, 19).unwrap();
        assert!(near_certain >= 0.99999);
    }

    #[test]
    fn simulation_is_deterministic_per_seed() {
        let a = simulate_repetitions(0.3, 5, 10_000, 7).unwrap();
        let b = simulate_repetitions(0.3, 5, 10_000, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn simulation_rejects_bad_input() {
        assert!(simulate_repetitions(0.0, 1, 10, 0).is_err());
        assert!(simulate_repetitions(1.0, 1, 10, 0).is_err());
        assert!(simulate_repetitions(0.5, 0, 10, 0).is_err());
        assert!(simulate_repetitions(0.5, 1, 0, 0).is_err());
    }

    fn readout(values: &[i8], energy: f64) -> Readout {
        Readout {
            config: SpinConfig(values.to_vec()),
            energy,
        }
    }

    #[test]
    fn heapsort_single_readout() {
        let summary = heapsort_readouts(&[readout(&[1, -1], 0.5)]).unwrap();
        assert_eq!(summary.entries.len(), 1);
        assert_eq!(summary.entries[0].multiplicity, 1);
        assert_eq!(summary.best_energy, 0.5);
    }

    #[test]
    fn heapsort_groups_ties() {
        let summary = heapsort_readouts(&[
            readout(&[1], 3.0),
            readout(&[1], 1.0),
            readout(&[-1], 2.0),
            readout(&[1], 1.0),
        ])
        .unwrap();
        assert_eq!(summary.best_energy, 1.0);
        assert_eq!(summary.entries[0].multiplicity, 2);
        let energies: Vec<f64> = summary.entries.iter().map(|e| e.energy).collect();
        assert_eq!(energies, vec![1.0, 2.0, 3.0]);
        let total: usize = summary.entries.iter().map(|e| e.multiplicity).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn heapsort_matches_reference_sort_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let readouts: Vec<Readout> = (0..1000)
            .map(|_| {
                let config: Vec<i8> =
                    (0..5).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
                // coarse energies so ties actually occur
                let energy = (rng.gen_range(-4.0f64..4.0) * 2.0).round() / 2.0;
                readout(&config, energy)
            })
            .collect();

        // reference oracle: library comparison sort plus grouping
        let mut reference = readouts.clone();
        reference.sort_by(readout_order);
        let mut expected: Vec<SolutionEntry> = Vec::new();
        for r in reference {
            match expected.last_mut() {
                Some(last) if last.energy == r.energy && last.config == r.config => {
                    last.multiplicity += 1
                }
                _ => expected.push(SolutionEntry {
                    config: r.config,
                    energy: r.energy,
                    multiplicity: 1,
                }),
            }
        }

        let summary = heapsort_readouts(&readouts).unwrap();
        assert_eq!(summary.entries, expected);
        for pair in summary.entries.windows(2) {
            assert!(pair[0].energy <= pair[1].energy);
        }
    }

    #[test]
    fn heapsort_rejects_empty_input() {
        assert_eq!(heapsort_readouts(&[]).unwrap_err(), SamplerError::EmptyReadoutSet);
    }

    #[test]
    fn unembed_majority_and_tie_rules() {
        let e = Embedding::new([(0, vec![0, 4, 5]), (1, vec![2, 6])]).unwrap();
        let mut hw = vec![0i8; 8];
        hw[0] = 1;
        hw[4] = 1;
        hw[5] = -1; // majority +1
        hw[2] = 1;
        hw[6] = -1; // tie resolves to +1
        let logical = unembed_readout(&SpinConfig(hw), &e).unwrap();
        assert_eq!(logical, SpinConfig(vec![1, 1]));

        let unanimous = Embedding::new([(0, vec![0, 4])]).unwrap();
        let mut hw = vec![1i8; 8];
        hw[0] = -1;
        hw[4] = -1;
        assert_eq!(
            unembed_readout(&SpinConfig(hw), &unanimous).unwrap(),
            SpinConfig(vec![-1])
        );
    }

    #[test]
    fn unembed_inverts_chain_extension() {
        let hw = build_chimera(2, 2, 4).unwrap();
        let g = LogicalGraph::complete(4).unwrap();
        let e = find_embedding_cmr(&g, &hw, &CmrParams::default())
            .unwrap()
            .expect("K4 embeds into 2x2");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let z = SpinConfig(
                (0..4)
                    .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
                    .collect(),
            );
            let extended = chain_extend(&z, &e, hw.id_slots()).unwrap();
            assert_eq!(unembed_readout(&extended, &e).unwrap(), z);
        }
    }

    #[test]
    fn energy_consistency_check() {
        let model = IsingModel::new(2, vec![0.0, 0.0], [(0, 1, 1.0)], 0.0).unwrap();
        let good = vec![readout(&[1, 1], -1.0), readout(&[1, -1], 1.0)];
        assert!(energies_consistent(&good, &model, 1e-12));
        let bad = vec![readout(&[1, 1], 0.5)];
        assert!(!energies_consistent(&bad, &model, 1e-12));
        let wrong_len = vec![readout(&[1], 0.0)];
        assert!(!energies_consistent(&wrong_len, &model, 1e-12));
    }

    #[test]
    fn readout_json_lines_round_trip() {
        let rows = vec![readout(&[1, -1], -2.5), readout(&[-1, -1], 0.0)];
        let text = readouts_to_json_lines(&rows);
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("{\"config\":[1,-1],\"energy\":-2.5}"));
        let back = readouts_from_json_lines(&text).unwrap();
        assert_eq!(rows, back);
        assert!(readouts_from_json_lines("not json").is_err());
    }
}
