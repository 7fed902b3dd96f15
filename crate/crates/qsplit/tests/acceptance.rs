//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured values (run with `--nocapture` to see them
//! on success).

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsplit::aspen::{self, EvalOptions, MachineRates};
use qsplit::chimera::{build_chimera, FaultMask};
use qsplit::embedding::{
    chain_edge_count, find_embedding_cmr, validate_embedding, CmrParams, Embedding, LogicalGraph,
};
use qsplit::perf::{
    log_log_slope, repetitions, stage1_time, stage2_time, stage3_time, StageParams,
};
use qsplit::qubo_ising::{
    brute_force_argmin_ising, brute_force_argmin_qubo, chain_extend, default_chain_strength,
    embed_parameters, ising_energy, qubo_energy, qubo_to_ising, spin_from_binary, BinaryConfig,
    IsingModel, QuboInstance, SpinConfig,
};
use qsplit::sampler::{heapsort_readouts, simulate_repetitions, unembed_readout, Readout};

fn fixture(name: &str) -> String {
    let path = format!("{}/models/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {path}: {e}"))
}

fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    let denom = a.abs().max(b.abs());
    if denom == 0.0 {
        return true;
    }
    (a - b).abs() / denom <= tol
}

/// Criterion 1: hardware node and edge counts, exact.
#[test]
fn criterion_01_hardware_counts() {
    let g8 = build_chimera(8, 8, 4).unwrap();
    assert_eq!(g8.num_nodes(), 512);

    let g12 = build_chimera(12, 12, 4).unwrap();
    assert_eq!(g12.num_nodes(), 1152);
    assert_eq!(g12.num_edges(), 3360);
    let degree_sum: usize = g12.nodes().map(|q| g12.degree(q)).sum();
    assert_eq!(degree_sum, 2 * 3360);

    println!(
        "criterion 1 PASS: chimera(8,8) = 512 nodes; chimera(12,12) = 1152 nodes / 3360 edges \
         (degree sum {degree_sum})"
    );
}

/// Criterion 2: the stage-1 fixed-latency component is 319573 us at every
/// problem size, from both the built-in and the model file.
#[test]
fn criterion_02_initialization_constant() {
    let rates = MachineRates::default();
    for lps in [1usize, 10, 50, 100, 250] {
        let report = stage1_time(&StageParams::new(lps), &rates).unwrap();
        assert!(
            (report.fixed_seconds() * 1e6 - 319_573.0).abs() < 1e-9,
            "builtin lps={lps}: {}",
            report.fixed_seconds() * 1e6
        );
    }
    let ast = aspen::link(&aspen::parse(&fixture("stage1.aspen")).unwrap(), &[]).unwrap();
    for lps in [1.0, 64.0] {
        let report = aspen::evaluate_model_with_rates(
            &ast,
            "Stage1",
            &rates,
            &BTreeMap::from([("LPS".to_string(), lps)]),
            &EvalOptions::default(),
        )
        .unwrap();
        assert!((report.fixed_seconds() * 1e6 - 319_573.0).abs() < 1e-9);
    }
    println!("criterion 2 PASS: stage-1 fixed component = 319573 us at every LPS");
}

/// Criterion 3: repetition counts and the stage-2 charge, exact.
#[test]
fn criterion_03_repetition_formula() {
    assert_eq!(repetitions(0.99, 0.7).unwrap(), 4);
    assert_eq!(repetitions(0.9999, 0.7).unwrap(), 8);
    let mut p = StageParams::new(1);
    p.p_a = 0.99;
    p.p_s = 0.7;
    let total_us = stage2_time(&p).unwrap().total_seconds() * 1e6;
    assert!(
        (total_us - 405.0).abs() < 1e-9,
        "stage2(0.99, 0.7) = {total_us} us"
    );
    println!("criterion 3 PASS: reps(0.99,0.7)=4, reps(0.9999,0.7)=8, stage2 = {total_us} us");
}

/// Criterion 4: stage 1 dominates by at least 100x for every LPS in
/// [1,100], and stage 2 stays within [345, 545] us across the whole
/// (p_s, p_a) flatness grid.
#[test]
fn criterion_04_bottleneck_and_flatness() {
    let rates = MachineRates::default();
    let mut worst_ratio = f64::INFINITY;
    for lps in 1..=100 {
        let p = StageParams::new(lps);
        let s1 = stage1_time(&p, &rates).unwrap().total_seconds();
        let s2 = stage2_time(&p).unwrap().total_seconds();
        let s3 = stage3_time(&p, &rates).unwrap().total_seconds();
        let ratio = s1 / (s2 + s3);
        worst_ratio = worst_ratio.min(ratio);
        assert!(ratio >= 100.0, "lps {lps}: ratio {ratio}");
    }

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut p_s = 0.60;
    while p_s <= 0.9500001 {
        for p_a in [0.9, 0.93, 0.97, 0.99, 0.995, 0.999, 0.9995, 0.9999] {
            let mut p = StageParams::new(10);
            p.p_a = p_a;
            p.p_s = p_s;
            let us = stage2_time(&p).unwrap().total_seconds() * 1e6;
            lo = lo.min(us);
            hi = hi.max(us);
            assert!(
                (345.0 - 1e-9..=545.0 + 1e-9).contains(&us),
                "p_s={p_s} p_a={p_a}: {us} us"
            );
        }
        p_s += 0.01;
    }
    println!(
        "criterion 4 PASS: min stage1/(stage2+stage3) = {worst_ratio:.1}; \
         stage2 range [{lo}, {hi}] us"
    );
}

/// Criterion 5: the stage-1 compute component scales cubically (log-log
/// slope within [2.85, 3.01] over LPS in [100,300]) and the stage-1 total
/// is monotone nondecreasing over [1,100].
#[test]
fn criterion_05_scaling_shape() {
    let rates = MachineRates::default();
    let points: Vec<(f64, f64)> = (100..=300)
        .map(|lps| {
            let report = stage1_time(&StageParams::new(lps), &rates).unwrap();
            (lps as f64, report.compute_seconds())
        })
        .collect();
    let slope = log_log_slope(&points);
    assert!((2.85..=3.01).contains(&slope), "slope {slope}");

    let mut prev = 0.0;
    for lps in 1..=100 {
        let total = stage1_time(&StageParams::new(lps), &rates).unwrap().total_seconds();
        assert!(total >= prev, "lps {lps}: {total} < {prev}");
        prev = total;
    }
    println!("criterion 5 PASS: log-log slope {slope:.4}; stage-1 total monotone on [1,100]");
}

/// Criterion 6: translation correctness on 100 random QUBOs via the
/// exhaustive oracle: exact affine energy equivalence and argmin
/// bijection.
#[test]
fn criterion_06_translation_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    for round in 0..100 {
        let n = rng.gen_range(1..=10);
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        let q = QuboInstance::from_matrix(n, entries).unwrap();
        let m = qubo_to_ising(&q);

        let mut qubo_minima: Vec<SpinConfig> = Vec::new();
        let mut qubo_min = f64::INFINITY;
        for mask in 0u64..(1 << n) {
            let b = BinaryConfig((0..n).map(|i| (mask >> (n - 1 - i) & 1) as u8).collect());
            let z = spin_from_binary(&b);
            let eq = qubo_energy(&q, &b).unwrap();
            let ei = ising_energy(&m, &z).unwrap();
            assert!(
                (eq - ei).abs() <= 1e-9,
                "round {round}: energy mismatch {eq} vs {ei}"
            );
            if eq < qubo_min - 1e-12 {
                qubo_min = eq;
                qubo_minima = vec![z];
            } else if (eq - qubo_min).abs() <= 1e-12 {
                qubo_minima.push(z);
            }
        }

        let mut ising_minima: Vec<SpinConfig> = Vec::new();
        let mut ising_min = f64::INFINITY;
        for mask in 0u64..(1 << n) {
            let z = SpinConfig(
                (0..n)
                    .map(|i| if mask >> (n - 1 - i) & 1 == 1 { 1 } else { -1 })
                    .collect(),
            );
            let e = ising_energy(&m, &z).unwrap();
            if e < ising_min - 1e-12 {
                ising_min = e;
                ising_minima = vec![z];
            } else if (e - ising_min).abs() <= 1e-12 {
                ising_minima.push(z);
            }
        }

        assert!((qubo_min - ising_min).abs() <= 1e-9, "round {round}");
        let mapped: BTreeSet<Vec<i8>> = qubo_minima.into_iter().map(|z| z.0).collect();
        let native: BTreeSet<Vec<i8>> = ising_minima.into_iter().map(|z| z.0).collect();
        assert_eq!(mapped, native, "round {round}: argmin sets differ");

        // the dedicated scanners agree with the manual scan
        let bq = brute_force_argmin_qubo(&q).unwrap();
        let bi = brute_force_argmin_ising(&m).unwrap();
        assert!((bq.best_energy - qubo_min).abs() <= 1e-12);
        assert!((bi.best_energy - ising_min).abs() <= 1e-12);
    }
    println!("criterion 6 PASS: 100 random QUBOs, exact equivalence and argmin bijection");
}

fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize) -> LogicalGraph {
    let mut edges = BTreeSet::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        let v = order[i];
        edges.insert((parent.min(v), parent.max(v)));
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(0.25) {
                edges.insert((u, v));
            }
        }
    }
    LogicalGraph::new(n, edges).unwrap()
}

/// Criterion 7: embedding soundness. Every embedding of 100 seeded random
/// connected graphs validates (hard); faulted hardware is respected; K_n
/// footprints stay within n^2 qubits in at least 90% of seeds (soft).
#[test]
fn criterion_07_embedding_soundness() {
    let hw = build_chimera(4, 4, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    for round in 0..100u64 {
        let n = rng.gen_range(2..=10);
        let g = random_connected_graph(&mut rng, n);
        let e = find_embedding_cmr(
            &g,
            &hw,
            &CmrParams {
                seed: 9_000 + round,
                ..CmrParams::default()
            },
        )
        .unwrap()
        .unwrap_or_else(|| panic!("round {round}: no embedding for n={n}"));
        let report = validate_embedding(&g, &hw, &e);
        assert!(report.valid, "round {round}: {}", report.describe());
    }

    // random fault masks: embeddings never touch dead qubits or rely on
    // dead couplers
    let base = build_chimera(4, 4, 4).unwrap();
    for round in 0..20u64 {
        let mut mask_rng = ChaCha8Rng::seed_from_u64(7_700 + round);
        let dead_qubits: BTreeSet<usize> = (0..10)
            .map(|_| mask_rng.gen_range(0..base.id_slots()))
            .collect();
        let dead_couplers: BTreeSet<(usize, usize)> = base
            .edges()
            .filter(|_| mask_rng.gen_bool(0.05))
            .collect();
        let mask = FaultMask {
            dead_qubits: dead_qubits.clone(),
            dead_couplers: dead_couplers.clone(),
        };
        let faulted = base.apply_faults(&mask).unwrap();
        let g = random_connected_graph(&mut mask_rng, 6);
        if let Some(e) = find_embedding_cmr(
            &g,
            &faulted,
            &CmrParams {
                seed: 7_800 + round,
                ..CmrParams::default()
            },
        )
        .unwrap()
        {
            let report = validate_embedding(&g, &faulted, &e);
            assert!(report.valid, "round {round}: {}", report.describe());
            for (_, model) in e.vertex_models() {
                for q in model {
                    assert!(!dead_qubits.contains(q), "round {round}: dead qubit {q} used");
                }
            }
        }
    }

    // complete-graph footprint, soft at 90% of seeds; a seed whose search
    // comes back empty counts against the footprint rate, while validity
    // of anything returned stays a hard requirement
    let big = build_chimera(8, 8, 4).unwrap();
    let mut footprint_summary = Vec::new();
    for n in 3..=8usize {
        let g = LogicalGraph::complete(n).unwrap();
        let mut within = 0;
        for seed in 0..50u64 {
            let found = find_embedding_cmr(
                &g,
                &big,
                &CmrParams {
                    seed: 50_000 + seed,
                    ..CmrParams::default()
                },
            )
            .unwrap();
            if let Some(e) = found {
                let report = validate_embedding(&g, &big, &e);
                assert!(report.valid, "K{n} seed {seed}: {}", report.describe());
                if report.qubits_used <= n * n {
                    within += 1;
                }
            }
        }
        assert!(within >= 45, "K{n}: only {within}/50 within n^2 qubits");
        footprint_summary.push(format!("K{n}: {within}/50"));
    }
    println!(
        "criterion 7 PASS: 100/100 random graphs valid; faults respected; footprints {}",
        footprint_summary.join(", ")
    );
}

/// Criterion 8: embedded parameter setting preserves chain-aligned
/// energies up to the exact chain constant.
#[test]
fn criterion_08_embedded_parameter_faithfulness() {
    let hw = build_chimera(2, 2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(800);
    for round in 0..10u64 {
        let n = rng.gen_range(2..=6);
        let mut couplings = Vec::new();
        for i in 1..n {
            couplings.push((0, i, rng.gen_range(-1.0..1.0)));
        }
        for i in 1..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.5) {
                    couplings.push((i, j, rng.gen_range(-1.0..1.0)));
                }
            }
        }
        let h: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = IsingModel::new(n, h, couplings, rng.gen_range(-0.5..0.5)).unwrap();
        let e = find_embedding_cmr(
            &m.connectivity(),
            &hw,
            &CmrParams {
                seed: 80_000 + round,
                ..CmrParams::default()
            },
        )
        .unwrap()
        .expect("n <= 6 embeds into chimera(2,2)");
        let cs = default_chain_strength(&m, 2.0);
        let hw_model = embed_parameters(&m, &e, &hw, cs).unwrap();
        let chains = chain_edge_count(&e, &hw) as f64;
        for mask in 0u64..(1 << n) {
            let z = SpinConfig(
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
                    .collect(),
            );
            let extended = chain_extend(&z, &e, hw.id_slots()).unwrap();
            let logical = ising_energy(&m, &z).unwrap();
            let hardware = ising_energy(&hw_model, &extended).unwrap();
            assert!(
                (hardware - (logical - cs * chains)).abs() <= 1e-9,
                "round {round} mask {mask}: {hardware} vs {logical} - {cs}*{chains}"
            );
        }
    }
    println!("criterion 8 PASS: chain-aligned hardware energies exact for 10 random models");
}

/// Criterion 9: the four shipped model listings parse from their verbatim
/// files, and the built-in stage models agree with DSL evaluation to 1e-9
/// relative on 20 random parameter sets.
#[test]
fn criterion_09_dsl_fidelity() {
    let stage1 = aspen::parse(&fixture("stage1.aspen")).unwrap();
    let stage2 = aspen::parse(&fixture("stage2.aspen")).unwrap();
    let stage3 = aspen::parse(&fixture("stage3.aspen")).unwrap();
    let machine = aspen::parse(&fixture("simple_node.aspen")).unwrap();
    assert!(stage1.find_model("Stage1").is_some());
    assert!(stage2.find_model("Stage2").is_some());
    assert!(stage3.find_model("Stage3").is_some());
    assert_eq!(machine.machines.len(), 1);
    assert_eq!(machine.cores.len(), 1);

    let rates = MachineRates::default();
    let opts = EvalOptions::default();
    let ast1 = aspen::link(&stage1, &[]).unwrap();
    let ast2 = aspen::link(&stage2, &[]).unwrap();
    let ast3 = aspen::link(&stage3, &[]).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(900);
    for round in 0..20 {
        let lps = rng.gen_range(1..=150usize);
        let m_dim = rng.gen_range(1..=16usize);
        let n_dim = rng.gen_range(1..=16usize);
        let p_a: f64 = rng.gen_range(0.5..0.9999);
        let p_s: f64 = rng.gen_range(0.05..0.95);

        let mut p = StageParams::new(lps);
        p.m = m_dim;
        p.n = n_dim;
        p.p_a = p_a;
        p.p_s = p_s;

        let s1 = stage1_time(&p, &rates).unwrap();
        let d1 = aspen::evaluate_model_with_rates(
            &ast1,
            "Stage1",
            &rates,
            &BTreeMap::from([
                ("LPS".to_string(), lps as f64),
                ("M".to_string(), m_dim as f64),
                ("N".to_string(), n_dim as f64),
            ]),
            &opts,
        )
        .unwrap();
        assert!(
            relative_close(s1.total_seconds(), d1.total_seconds(), 1e-9),
            "round {round} stage1: {} vs {}",
            s1.total_seconds(),
            d1.total_seconds()
        );
        assert!(relative_close(s1.compute_seconds(), d1.compute_seconds(), 1e-9));
        assert!(relative_close(s1.memory_seconds(), d1.memory_seconds(), 1e-9));
        assert!(relative_close(s1.fixed_seconds(), d1.fixed_seconds(), 1e-9));

        let s2 = stage2_time(&p).unwrap();
        let d2 = aspen::evaluate_model_with_rates(
            &ast2,
            "Stage2",
            &rates,
            &BTreeMap::from([
                ("Accuracy".to_string(), 100.0 * p_a),
                ("Success".to_string(), p_s),
            ]),
            &opts,
        )
        .unwrap();
        assert!(
            relative_close(s2.total_seconds(), d2.total_seconds(), 1e-9),
            "round {round} stage2: {} vs {}",
            s2.total_seconds(),
            d2.total_seconds()
        );

        let s3 = stage3_time(&p, &rates).unwrap();
        let d3 = aspen::evaluate_model_with_rates(
            &ast3,
            "Stage3",
            &rates,
            &BTreeMap::from([
                ("LPS".to_string(), lps as f64),
                ("Accuracy".to_string(), p_a),
                ("Success".to_string(), p_s),
            ]),
            &opts,
        )
        .unwrap();
        assert!(
            relative_close(s3.total_seconds(), d3.total_seconds(), 1e-9),
            "round {round} stage3: {} vs {}",
            s3.total_seconds(),
            d3.total_seconds()
        );
    }
    println!("criterion 9 PASS: fixtures parse verbatim; built-ins match DSL on 20 random sets");
}

/// Criterion 10: running `repetitions(p_a, p_s)` rounds empirically
/// reaches the accuracy target within 3 sigma on the whole grid.
#[test]
fn criterion_10_stochastic_model() {
    let trials = 100_000u64;
    let mut cells = 0;
    for (i, &p_s) in [0.3, 0.5, 0.7, 0.9].iter().enumerate() {
        for (j, &p_a) in [0.9, 0.99, 0.999].iter().enumerate() {
            let s = repetitions(p_a, p_s).unwrap();
            let empirical =
                simulate_repetitions(p_s, s, trials, 10_000 + (i * 3 + j) as u64).unwrap();
            let p_true = 1.0 - (1.0 - p_s).powi(s as i32);
            let sigma = (p_true * (1.0 - p_true) / trials as f64).sqrt();
            assert!(
                empirical >= p_a - 3.0 * sigma,
                "p_s={p_s} p_a={p_a} s={s}: empirical {empirical} < {p_a} - 3*{sigma}"
            );
            cells += 1;
        }
    }
    println!("criterion 10 PASS: {cells} grid cells at {trials} trials each");
}

/// Criterion 11: heapsort agrees with a reference sort on 1000 random
/// readouts, and unembedding inverts chain extension.
#[test]
fn criterion_11_post_processing() {
    let mut rng = ChaCha8Rng::seed_from_u64(1100);
    let readouts: Vec<Readout> = (0..1000)
        .map(|_| Readout {
            config: SpinConfig((0..6).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect()),
            energy: (rng.gen_range(-8.0f64..8.0) * 4.0).round() / 4.0,
        })
        .collect();
    let summary = heapsort_readouts(&readouts).unwrap();

    let mut reference = readouts.clone();
    reference.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.config.cmp(&b.config)));
    let mut flattened = Vec::new();
    for entry in &summary.entries {
        for _ in 0..entry.multiplicity {
            flattened.push(Readout {
                config: entry.config.clone(),
                energy: entry.energy,
            });
        }
    }
    assert_eq!(flattened, reference);
    assert_eq!(summary.best_energy, reference[0].energy);
    let total: usize = summary.entries.iter().map(|e| e.multiplicity).sum();
    assert_eq!(total, 1000);

    let hw = build_chimera(4, 4, 4).unwrap();
    let g = LogicalGraph::complete(5).unwrap();
    let e: Embedding = find_embedding_cmr(&g, &hw, &CmrParams::default())
        .unwrap()
        .expect("K5 embeds into chimera(4,4)");
    for _ in 0..100 {
        let z = SpinConfig((0..5).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect());
        let extended = chain_extend(&z, &e, hw.id_slots()).unwrap();
        assert_eq!(unembed_readout(&extended, &e).unwrap(), z);
    }
    println!("criterion 11 PASS: heapsort matches reference on 1000 readouts; unembed inverts");
}
