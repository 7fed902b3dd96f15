//! Built-in, closed-form implementations of the three application stages
//! and the scaling sweep.
//!
//! The built-ins mirror the bundled stage model files statement for
//! statement, so their reports agree with DSL evaluation of those files to
//! float accuracy; that agreement is itself under test. Probabilities are
//! fractions here; the stage-2 model file takes accuracy in percent, so
//! drive it with `Accuracy = 100 * p_a`.

use serde::Serialize;
use thiserror::Error;

use crate::aspen::{Category, EvalError, EvalOptions, MachineRates, StatementTiming, TimingReport};
use crate::chimera::{edge_count_formula_l4, node_count_formula};
use crate::embedding::worst_case_embedding_ops;

#[derive(Debug, Error)]
pub enum PerfError {
    #[error("accuracy target p_a must lie strictly inside (0,1), got {0}")]
    BadAccuracy(f64),
    #[error("per-run success p_s must lie in (0,1], got {0}")]
    BadSuccess(f64),
    #[error("lattice dimensions and problem size must be at least 1")]
    BadCounts,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Fixed electronics-initialization latencies in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitConstants {
    pub state_con_us: f64,
    pub pmm_sw_us: f64,
    pub pmm_elec_us: f64,
    pub pmm_chip_us: f64,
    pub pmm_therm_us: f64,
    pub sw_run_us: f64,
    pub elec_run_us: f64,
}

impl Default for InitConstants {
    fn default() -> Self {
        InitConstants {
            state_con_us: 252_162.0,
            pmm_sw_us: 33_095.0,
            pmm_elec_us: 0.0,
            pmm_chip_us: 11_264.0,
            pmm_therm_us: 10_000.0,
            sw_run_us: 4_000.0,
            elec_run_us: 9_052.0,
        }
    }
}

impl InitConstants {
    pub fn total_us(&self) -> f64 {
        self.state_con_us
            + self.pmm_sw_us
            + self.pmm_elec_us
            + self.pmm_chip_us
            + self.pmm_therm_us
            + self.sw_run_us
            + self.elec_run_us
    }
}

/// Inputs shared by the three stage models.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageParams {
    /// logical problem size: spins/vertices in the logical model
    pub lps: usize,
    /// hardware lattice dimensions
    pub m: usize,
    pub n: usize,
    /// desired accuracy of the sampled solution, as a fraction in (0,1)
    pub p_a: f64,
    /// per-run success probability, as a fraction in (0,1]
    pub p_s: f64,
    pub anneal_us: f64,
    pub readout_us: f64,
    pub therm_us: f64,
    /// charge readout once per repetition instead of once per call; the
    /// stage model files charge it once, so this is off by default
    pub readout_per_rep: bool,
    pub init: InitConstants,
}

impl StageParams {
    pub fn new(lps: usize) -> Self {
        StageParams {
            lps,
            m: 12,
            n: 12,
            p_a: 0.99,
            p_s: 0.7,
            anneal_us: 20.0,
            readout_us: 320.0,
            therm_us: 5.0,
            readout_per_rep: false,
            init: InitConstants::default(),
        }
    }

    pub fn validate(&self) -> Result<(), PerfError> {
        if self.lps < 1 || self.m < 1 || self.n < 1 {
            return Err(PerfError::BadCounts);
        }
        check_probabilities(self.p_a, self.p_s)
    }
}

fn check_probabilities(p_a: f64, p_s: f64) -> Result<(), PerfError> {
    if !(p_a > 0.0 && p_a < 1.0) {
        return Err(PerfError::BadAccuracy(p_a));
    }
    if !(p_s > 0.0 && p_s <= 1.0) {
        return Err(PerfError::BadSuccess(p_s));
    }
    Ok(())
}

/// Smallest repetition count such that at least one of the runs succeeds
/// with probability at least `p_a`: `ceil(ln(1-p_a) / ln(1-p_s))`, and 1
/// when `p_s` is 1.
pub fn repetitions(p_a: f64, p_s: f64) -> Result<u64, PerfError> {
    check_probabilities(p_a, p_s)?;
    if p_s == 1.0 {
        return Ok(1);
    }
    let s = ((1.0 - p_a).ln() / (1.0 - p_s).ln()).ceil();
    Ok((s as u64).max(1))
}

fn entry(
    kernel: &str,
    block: &str,
    resource: &str,
    category: Category,
    amount: f64,
    seconds: f64,
) -> StatementTiming {
    StatementTiming {
        kernel: kernel.to_string(),
        block: block.to_string(),
        resource: resource.to_string(),
        category,
        amount,
        seconds,
    }
}

/// Pre-processing stage: logical model generation, worst-case embedding
/// work, parameter setting, and the fixed electronics initialization.
pub fn stage1_time(p: &StageParams, rates: &MachineRates) -> Result<TimingReport, PerfError> {
    p.validate()?;
    let opts = EvalOptions::default();
    let flops = rates
        .resource("flops")
        .ok_or_else(|| EvalError::MissingRate("flops".into()))?;
    let mem_bw = rates
        .memory_bytes_per_sec
        .ok_or_else(|| EvalError::MissingRate("loads".into()))?;
    let link_bw = rates
        .link_bytes_per_sec
        .ok_or_else(|| EvalError::MissingRate("intracomm".into()))?;

    let lps = p.lps as f64;
    let nh = lps;
    let eh = nh * (nh - 1.0) / 2.0;
    let ng = node_count_formula(p.m, p.n, 4) as f64;
    let eg = edge_count_formula_l4(p.m, p.n) as f64;
    let ising_flops = lps.powf(2.0);
    let parameter_setting_flops = lps.powf(3.0);
    let embedding_flops = worst_case_embedding_ops(nh, eh, ng, eg);

    let fmad_traits: Vec<String> = vec!["sp".into(), "fmad".into(), "simd".into()];
    let simd_traits: Vec<String> = vec!["sp".into(), "simd".into()];

    let entries = vec![
        entry(
            "InitializeData",
            "#0",
            "flops",
            Category::Compute,
            ising_flops,
            flops.seconds(ising_flops, &fmad_traits, &opts)?,
        ),
        entry(
            "InitializeData",
            "#0",
            "stores",
            Category::Memory,
            nh * 4.0,
            (nh * 4.0) / mem_bw,
        ),
        entry(
            "InitializeData",
            "#1",
            "flops",
            Category::Compute,
            parameter_setting_flops,
            flops.seconds(parameter_setting_flops, &fmad_traits, &opts)?,
        ),
        entry(
            "EmbedData",
            "embed",
            "loads",
            Category::Memory,
            eh * 4.0,
            (eh * 4.0) / mem_bw,
        ),
        entry(
            "EmbedData",
            "embed",
            "flops",
            Category::Compute,
            embedding_flops,
            flops.seconds(embedding_flops, &simd_traits, &opts)?,
        ),
        entry(
            "EmbedData",
            "embed",
            "stores",
            Category::Memory,
            eg * 4.0,
            (eg * 4.0) / mem_bw,
        ),
        entry(
            "EmbedData",
            "embed",
            "intracomm",
            Category::Memory,
            eg * 4.0,
            (eg * 4.0) / link_bw,
        ),
        entry(
            "InitializeProcessor",
            "#0",
            "microseconds",
            Category::Fixed,
            p.init.total_us(),
            p.init.total_us() * 1e-6,
        ),
    ];
    Ok(TimingReport {
        model: "Stage1".to_string(),
        entries,
    })
}

/// Quantum execution stage: repeated anneals plus one readout and one
/// thermalization charge.
pub fn stage2_time(p: &StageParams) -> Result<TimingReport, PerfError> {
    check_probabilities(p.p_a, p.p_s)?;
    let reps = repetitions(p.p_a, p.p_s)? as f64;
    let readout_amount = if p.readout_per_rep {
        reps * p.readout_us
    } else {
        p.readout_us
    };
    let entries = vec![
        entry(
            "Stage2Processing",
            "mainblock2",
            "QuOps",
            Category::Quantum,
            reps,
            (reps * p.anneal_us) / 1_000_000.0,
        ),
        entry(
            "Stage2Processing",
            "mainblock3",
            "microseconds",
            Category::Fixed,
            readout_amount,
            readout_amount * 1e-6,
        ),
        entry(
            "Stage2Processing",
            "mainblock4",
            "microseconds",
            Category::Fixed,
            p.therm_us,
            p.therm_us * 1e-6,
        ),
    ];
    Ok(TimingReport {
        model: "Stage2".to_string(),
        entries,
    })
}

/// Post-processing stage: heapsort of the sampled readouts.
pub fn stage3_time(p: &StageParams, rates: &MachineRates) -> Result<TimingReport, PerfError> {
    check_probabilities(p.p_a, p.p_s)?;
    let opts = EvalOptions::default();
    let flops = rates
        .resource("flops")
        .ok_or_else(|| EvalError::MissingRate("flops".into()))?;
    let mem_bw = rates
        .memory_bytes_per_sec
        .ok_or_else(|| EvalError::MissingRate("loads".into()))?;

    let results = repetitions(p.p_a, p.p_s)? as f64;
    let length = p.lps as f64;
    let sort_ops = results.ln() * results;
    let sp_traits: Vec<String> = vec!["sp".into()];

    let entries = vec![
        entry(
            "FindSolution",
            "sort",
            "loads",
            Category::Memory,
            results,
            (results * (4.0 * length)) / mem_bw,
        ),
        entry(
            "FindSolution",
            "sort",
            "flops",
            Category::Compute,
            sort_ops,
            flops.seconds(sort_ops, &sp_traits, &opts)?,
        ),
        entry(
            "FindSolution",
            "sort",
            "stores",
            Category::Memory,
            results,
            results / mem_bw,
        ),
    ];
    Ok(TimingReport {
        model: "Stage3".to_string(),
        entries,
    })
}

/// One line of the scaling sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lps: usize,
    pub p_a: f64,
    pub p_s: f64,
    pub stage1_s: f64,
    pub stage2_s: f64,
    pub stage3_s: f64,
    pub total_s: f64,
    pub repetitions: u64,
    pub embedding_ops: f64,
}

/// Evaluate all three stages for every problem size in `lps_min..=lps_max`.
pub fn sweep(
    lps_min: usize,
    lps_max: usize,
    p: &StageParams,
    rates: &MachineRates,
) -> Result<Vec<SweepRow>, PerfError> {
    if lps_min < 1 || lps_min > lps_max {
        return Err(PerfError::BadCounts);
    }
    let mut rows = Vec::with_capacity(lps_max - lps_min + 1);
    for lps in lps_min..=lps_max {
        let params = StageParams { lps, ..p.clone() };
        let s1 = stage1_time(&params, rates)?;
        let s2 = stage2_time(&params)?;
        let s3 = stage3_time(&params, rates)?;
        let (stage1_s, stage2_s, stage3_s) =
            (s1.total_seconds(), s2.total_seconds(), s3.total_seconds());
        let nh = lps as f64;
        rows.push(SweepRow {
            lps,
            p_a: params.p_a,
            p_s: params.p_s,
            stage1_s,
            stage2_s,
            stage3_s,
            total_s: stage1_s + stage2_s + stage3_s,
            repetitions: repetitions(params.p_a, params.p_s)?,
            embedding_ops: worst_case_embedding_ops(
                nh,
                nh * (nh - 1.0) / 2.0,
                node_count_formula(params.m, params.n, 4) as f64,
                edge_count_formula_l4(params.m, params.n) as f64,
            ),
        });
    }
    Ok(rows)
}

pub const SWEEP_CSV_HEADER: &str =
    "lps,p_a,p_s,stage1_s,stage2_s,stage3_s,total_s,repetitions,embedding_ops";

/// CSV rendering: decimal points, no thousands separators.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.lps,
            r.p_a,
            r.p_s,
            r.stage1_s,
            r.stage2_s,
            r.stage3_s,
            r.total_s,
            r.repetitions,
            r.embedding_ops
        ));
    }
    out
}

/// gnuplot-friendly whitespace-separated rendering with a `#` header.
pub fn sweep_dat(rows: &[SweepRow]) -> String {
    let mut out = String::from("# ");
    out.push_str(&SWEEP_CSV_HEADER.replace(',', " "));
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{} {} {} {} {} {} {} {} {}\n",
            r.lps,
            r.p_a,
            r.p_s,
            r.stage1_s,
            r.stage2_s,
            r.stage3_s,
            r.total_s,
            r.repetitions,
            r.embedding_ops
        ));
    }
    out
}

/// Least-squares slope of `ln(y)` against `ln(x)`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
