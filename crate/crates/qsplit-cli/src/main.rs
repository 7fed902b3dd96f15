//! Batch command-line surface over the qsplit library.
//!
//! Exit codes: 0 on success, 1 on runtime/domain errors (including
//! embedding not-found), 2 on usage errors. Flags override values from the
//! `--config` key=value file; `QSPLIT_RATES` may point to a machine-rates
//! model file used when `--rates` is absent.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsplit::aspen::{self, EvalOptions, MachineRates};
use qsplit::chimera::{build_chimera, ChimeraGraph, FaultMask};
use qsplit::embedding::{find_embedding_cmr, validate_embedding, CmrParams, LogicalGraph};
use qsplit::perf::{
    repetitions, stage1_time, stage2_time, stage3_time, sweep, sweep_csv, sweep_dat, StageParams,
};
use qsplit::qubo_ising::{quantize_parameters, qubo_to_ising, QuboInstance};
use qsplit::sampler::simulate_repetitions;

#[derive(Parser)]
#[command(
    name = "qsplit",
    version,
    about = "Model the time-to-solution of split CPU/annealer programs"
)]
struct Cli {
    /// key=value configuration file (# comments); flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a Chimera hardware graph and report its stats
    Chimera(ChimeraArgs),
    /// Translate a QUBO file into the equivalent Ising model
    Translate(TranslateArgs),
    /// Find a minor embedding of a logical graph into Chimera hardware
    Embed(EmbedArgs),
    /// Predict per-stage times for one problem size
    Predict(PredictArgs),
    /// Sweep problem sizes and emit per-stage timing rows
    Sweep(SweepArgs),
    /// Evaluate a model file against a machine file
    Eval(EvalArgs),
    /// Compare the repetition formula against Bernoulli sampling
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct ChimeraArgs {
    /// cell rows
    #[arg(long)]
    m: Option<usize>,
    /// cell columns
    #[arg(long)]
    n: Option<usize>,
    /// half-cell size
    #[arg(long)]
    l: Option<usize>,
    /// JSON fault mask `{"dead_qubits":[...],"dead_couplers":[[a,b],...]}`
    #[arg(long, value_name = "FILE")]
    faults: Option<PathBuf>,
    /// write the graph JSON here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TranslateArgs {
    /// QUBO input: "n" plus row-major entries, or "i j value" triplets
    qubo_file: PathBuf,
    /// quantize parameters to this many bits of precision
    #[arg(long)]
    bits: Option<u32>,
    /// write the Ising JSON here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    /// logical graph as edge-list text, one "u v" pair per line
    graph_file: PathBuf,
    /// hardware cell rows (default 12)
    #[arg(long)]
    m: Option<usize>,
    /// hardware cell columns (default 12)
    #[arg(long)]
    n: Option<usize>,
    /// half-cell size (default 4)
    #[arg(long)]
    l: Option<usize>,
    /// random seed for the search (default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// complete restarts before giving up (default 10)
    #[arg(long)]
    tries: Option<u32>,
    /// improvement passes per restart (default 10)
    #[arg(long)]
    passes: Option<u32>,
    /// base of the qubit-reuse penalty (default 10)
    #[arg(long)]
    penalty_base: Option<f64>,
    /// JSON fault mask applied to the hardware graph
    #[arg(long, value_name = "FILE")]
    faults: Option<PathBuf>,
    /// write the embedding and validation report here
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    /// logical problem size (spins in the logical model)
    #[arg(long)]
    lps: Option<usize>,
    /// desired solution accuracy, a fraction in (0,1)
    #[arg(long)]
    p_a: Option<f64>,
    /// per-run success probability, a fraction in (0,1]
    #[arg(long)]
    p_s: Option<f64>,
    /// hardware cell rows (default 12)
    #[arg(long)]
    m: Option<usize>,
    /// hardware cell columns (default 12)
    #[arg(long)]
    n: Option<usize>,
    /// machine-rates model file (default: $QSPLIT_RATES or built-ins)
    #[arg(long, value_name = "FILE")]
    rates: Option<PathBuf>,
    /// emit machine-readable JSON instead of tables
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// smallest problem size, inclusive
    #[arg(long)]
    lps_min: Option<usize>,
    /// largest problem size, inclusive
    #[arg(long)]
    lps_max: Option<usize>,
    /// desired solution accuracy (default 0.99)
    #[arg(long)]
    p_a: Option<f64>,
    /// per-run success probability (default 0.7)
    #[arg(long)]
    p_s: Option<f64>,
    /// hardware cell rows (default 12)
    #[arg(long)]
    m: Option<usize>,
    /// hardware cell columns (default 12)
    #[arg(long)]
    n: Option<usize>,
    /// machine-rates model file (default: $QSPLIT_RATES or built-ins)
    #[arg(long, value_name = "FILE")]
    rates: Option<PathBuf>,
    /// write CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// also write a gnuplot-friendly .dat file
    #[arg(long, value_name = "FILE")]
    dat: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// application model file
    model_file: PathBuf,
    /// machine model file providing the rates
    #[arg(long, value_name = "FILE")]
    machine_file: Option<PathBuf>,
    /// model name (defaults to the only model in the file)
    #[arg(long)]
    model: Option<String>,
    /// machine name (defaults to the only machine in the machine file)
    #[arg(long)]
    machine: Option<String>,
    /// parameter override NAME=VALUE; repeatable
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// emit machine-readable JSON instead of tables
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// per-run success probability, a fraction in (0,1)
    #[arg(long)]
    p_s: Option<f64>,
    /// desired solution accuracy, a fraction in (0,1)
    #[arg(long)]
    p_a: Option<f64>,
    /// Bernoulli trials to draw (default 100000)
    #[arg(long)]
    trials: Option<u64>,
    /// random seed (default 0)
    #[arg(long)]
    seed: Option<u64>,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn runtime(msg: impl std::fmt::Display) -> Self {
        CliError::Runtime(msg.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let overlay = Overlay::load(cli.config.as_deref())?;
    match cli.command {
        Command::Chimera(args) => cmd_chimera(args, &overlay),
        Command::Translate(args) => cmd_translate(args, &overlay),
        Command::Embed(args) => cmd_embed(args, &overlay),
        Command::Predict(args) => cmd_predict(args, &overlay),
        Command::Sweep(args) => cmd_sweep(args, &overlay),
        Command::Eval(args) => cmd_eval(args),
        Command::Simulate(args) => cmd_simulate(args, &overlay),
    }
}

/// Values from the key=value configuration file.
struct Overlay(BTreeMap<String, String>);

const CONFIG_KEYS: &[&str] = &[
    "m",
    "n",
    "l",
    "lps",
    "lps_min",
    "lps_max",
    "p_a",
    "p_s",
    "anneal_us",
    "readout_us",
    "therm_us",
    "readout_per_rep",
    "seed",
    "tries",
    "passes",
    "penalty_base",
    "trials",
    "bits",
    "rates",
];

impl Overlay {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        let Some(path) = path else {
            return Ok(Overlay(map));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "{}:{}: expected key=value, got `{line}`",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(CliError::usage(format!(
                    "{}:{}: unknown config key `{key}`",
                    path.display(),
                    lineno + 1
                )));
            }
            map.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Overlay(map))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                CliError::usage(format!("config key `{key}` has invalid value `{raw}`"))
            }),
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.0.get(key).map(PathBuf::from)
    }
}

fn pick<T>(flag: Option<T>, config: Option<T>, default: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(config)
        .or(default)
        .ok_or_else(|| CliError::usage(format!("missing required --{name}")))
}

fn require_at_least_one(value: usize, name: &str) -> Result<usize, CliError> {
    if value < 1 {
        return Err(CliError::usage(format!("--{name} must be at least 1")));
    }
    Ok(value)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_fault_mask(path: Option<&Path>) -> Result<FaultMask, CliError> {
    match path {
        None => Ok(FaultMask::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::runtime(format!("cannot read faults {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::runtime(format!("bad fault mask {}: {e}", path.display())))
        }
    }
}

fn build_hardware(
    m: usize,
    n: usize,
    l: usize,
    faults: Option<&Path>,
) -> Result<ChimeraGraph, CliError> {
    let graph = build_chimera(m, n, l).map_err(CliError::runtime)?;
    let mask = load_fault_mask(faults)?;
    graph.apply_faults(&mask).map_err(CliError::runtime)
}

/// Parse and link a model file, searching its own directory, the working
/// directory, and the bundled catalog for includes.
fn load_model_file(path: &Path) -> Result<aspen::ModelAst, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    let ast = aspen::parse(&text)
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    let mut search = Vec::new();
    if let Some(dir) = path.parent() {
        search.push(dir.to_path_buf());
    }
    search.push(PathBuf::from("."));
    aspen::link(&ast, &search).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

/// Rates come from --rates, the config file, `QSPLIT_RATES`, or built-ins.
fn resolve_rates(
    flag: Option<&Path>,
    overlay: &Overlay,
    machine: Option<&str>,
) -> Result<MachineRates, CliError> {
    let from_env = std::env::var_os("QSPLIT_RATES").map(PathBuf::from);
    let path = flag
        .map(Path::to_path_buf)
        .or_else(|| overlay.path("rates"))
        .or(from_env);
    let Some(path) = path else {
        return Ok(MachineRates::default());
    };
    let ast = load_model_file(&path)?;
    let machine_name = match machine {
        Some(name) => name.to_string(),
        None => match ast.machines.as_slice() {
            [only] => only.name.clone(),
            [] => {
                return Err(CliError::runtime(format!(
                    "{}: no machine declared",
                    path.display()
                )))
            }
            several => {
                return Err(CliError::usage(format!(
                    "{}: several machines declared ({}); pass --machine",
                    path.display(),
                    several
                        .iter()
                        .map(|m| m.name.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                )))
            }
        },
    };
    aspen::extract_rates(&ast, &machine_name, &EvalOptions::default()).map_err(CliError::runtime)
}

fn cmd_chimera(args: ChimeraArgs, overlay: &Overlay) -> Result<(), CliError> {
    let m = require_at_least_one(pick(args.m, overlay.parse("m")?, None, "m")?, "m")?;
    let n = require_at_least_one(pick(args.n, overlay.parse("n")?, None, "n")?, "n")?;
    let l = require_at_least_one(pick(args.l, overlay.parse("l")?, Some(4), "l")?, "l")?;
    let graph = build_hardware(m, n, l, args.faults.as_deref())?;
    let stats = graph.graph_stats();
    println!(
        "chimera {m}x{n} (L={l}): {} nodes, {} edges",
        stats.nodes, stats.edges
    );
    println!(
        "degree histogram: {}",
        serde_json::to_string(&stats.degree_histogram).expect("stats serialize")
    );
    if let Some(out) = &args.out {
        let text = serde_json::to_string_pretty(&graph).expect("graph serializes");
        std::fs::write(out, text)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(())
}

fn cmd_translate(args: TranslateArgs, overlay: &Overlay) -> Result<(), CliError> {
    let bits = args.bits.or(overlay.parse("bits")?);
    let text = std::fs::read_to_string(&args.qubo_file).map_err(|e| {
        CliError::runtime(format!("cannot read {}: {e}", args.qubo_file.display()))
    })?;
    let qubo = QuboInstance::parse_text(&text).map_err(CliError::runtime)?;
    let mut model = qubo_to_ising(&qubo);
    if let Some(bits) = bits {
        if bits < 1 {
            return Err(CliError::usage("--bits must be at least 1"));
        }
        model = quantize_parameters(&model, bits).map_err(CliError::runtime)?;
    }
    let mut value = serde_json::to_value(&model).expect("model serializes");
    if let Some(bits) = bits {
        value["bits"] = serde_json::json!(bits);
    }
    write_or_print(
        args.out.as_deref(),
        &serde_json::to_string_pretty(&value).expect("json renders"),
    )
}

fn cmd_embed(args: EmbedArgs, overlay: &Overlay) -> Result<(), CliError> {
    let m = require_at_least_one(pick(args.m, overlay.parse("m")?, Some(12), "m")?, "m")?;
    let n = require_at_least_one(pick(args.n, overlay.parse("n")?, Some(12), "n")?, "n")?;
    let l = require_at_least_one(pick(args.l, overlay.parse("l")?, Some(4), "l")?, "l")?;
    let params = CmrParams {
        seed: pick(args.seed, overlay.parse("seed")?, Some(0), "seed")?,
        max_tries: pick(args.tries, overlay.parse("tries")?, Some(10), "tries")?,
        max_passes: pick(args.passes, overlay.parse("passes")?, Some(10), "passes")?,
        penalty_base: pick(
            args.penalty_base,
            overlay.parse("penalty_base")?,
            Some(10.0),
            "penalty-base",
        )?,
    };
    if params.max_tries < 1 {
        return Err(CliError::usage("--tries must be at least 1"));
    }
    if params.penalty_base.is_nan() || params.penalty_base <= 1.0 {
        return Err(CliError::usage("--penalty-base must exceed 1"));
    }

    let text = std::fs::read_to_string(&args.graph_file).map_err(|e| {
        CliError::runtime(format!("cannot read {}: {e}", args.graph_file.display()))
    })?;
    let logical = LogicalGraph::from_edge_list_text(&text).map_err(CliError::runtime)?;
    let hw = build_hardware(m, n, l, args.faults.as_deref())?;

    match find_embedding_cmr(&logical, &hw, &params).map_err(CliError::runtime)? {
        Some(embedding) => {
            let report = validate_embedding(&logical, &hw, &embedding);
            let value = serde_json::json!({
                "embedding": embedding,
                "report": report,
                "seed": params.seed,
            });
            write_or_print(
                args.out.as_deref(),
                &serde_json::to_string_pretty(&value).expect("json renders"),
            )
        }
        None => Err(CliError::runtime(format!(
            "no embedding found after {} tries (seed {})",
            params.max_tries, params.seed
        ))),
    }
}

fn stage_params_from(
    lps: usize,
    p_a: f64,
    p_s: f64,
    m: usize,
    n: usize,
    overlay: &Overlay,
) -> Result<StageParams, CliError> {
    let mut p = StageParams::new(lps);
    p.p_a = p_a;
    p.p_s = p_s;
    p.m = m;
    p.n = n;
    if let Some(v) = overlay.parse("anneal_us")? {
        p.anneal_us = v;
    }
    if let Some(v) = overlay.parse("readout_us")? {
        p.readout_us = v;
    }
    if let Some(v) = overlay.parse("therm_us")? {
        p.therm_us = v;
    }
    if let Some(v) = overlay.parse("readout_per_rep")? {
        p.readout_per_rep = v;
    }
    p.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(p)
}

fn cmd_predict(args: PredictArgs, overlay: &Overlay) -> Result<(), CliError> {
    let lps = require_at_least_one(pick(args.lps, overlay.parse("lps")?, None, "lps")?, "lps")?;
    let p_a = pick(args.p_a, overlay.parse("p_a")?, None, "p-a")?;
    let p_s = pick(args.p_s, overlay.parse("p_s")?, None, "p-s")?;
    let m = pick(args.m, overlay.parse("m")?, Some(12), "m")?;
    let n = pick(args.n, overlay.parse("n")?, Some(12), "n")?;
    let params = stage_params_from(lps, p_a, p_s, m, n, overlay)?;
    let rates = resolve_rates(args.rates.as_deref(), overlay, None)?;

    let s1 = stage1_time(&params, &rates).map_err(CliError::runtime)?;
    let s2 = stage2_time(&params).map_err(CliError::runtime)?;
    let s3 = stage3_time(&params, &rates).map_err(CliError::runtime)?;
    let total = s1.total_seconds() + s2.total_seconds() + s3.total_seconds();

    if args.json {
        let value = serde_json::json!({
            "lps": lps,
            "p_a": p_a,
            "p_s": p_s,
            "repetitions": repetitions(p_a, p_s).map_err(CliError::runtime)?,
            "stage1": s1.to_json(),
            "stage2": s2.to_json(),
            "stage3": s3.to_json(),
            "totals": {
                "stage1_s": s1.total_seconds(),
                "stage2_s": s2.total_seconds(),
                "stage3_s": s3.total_seconds(),
                "total_s": total,
            }
        });
        println!("{}", serde_json::to_string_pretty(&value).expect("json renders"));
    } else {
        for report in [&s1, &s2, &s3] {
            println!("{report}");
            println!();
        }
        println!(
            "stage totals: stage1 {:.6e} s, stage2 {:.6e} s, stage3 {:.6e} s, total {:.6e} s",
            s1.total_seconds(),
            s2.total_seconds(),
            s3.total_seconds(),
            total
        );
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs, overlay: &Overlay) -> Result<(), CliError> {
    let lps_min = pick(args.lps_min, overlay.parse("lps_min")?, None, "lps-min")?;
    let lps_max = pick(args.lps_max, overlay.parse("lps_max")?, None, "lps-max")?;
    if lps_min < 1 || lps_min > lps_max {
        return Err(CliError::usage(format!(
            "empty sweep range: --lps-min {lps_min} --lps-max {lps_max}"
        )));
    }
    let p_a = pick(args.p_a, overlay.parse("p_a")?, Some(0.99), "p-a")?;
    let p_s = pick(args.p_s, overlay.parse("p_s")?, Some(0.7), "p-s")?;
    let m = pick(args.m, overlay.parse("m")?, Some(12), "m")?;
    let n = pick(args.n, overlay.parse("n")?, Some(12), "n")?;
    let params = stage_params_from(1, p_a, p_s, m, n, overlay)?;
    let rates = resolve_rates(args.rates.as_deref(), overlay, None)?;

    let rows = sweep(lps_min, lps_max, &params, &rates).map_err(CliError::runtime)?;
    if let Some(dat) = &args.dat {
        std::fs::write(dat, sweep_dat(&rows))
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", dat.display())))?;
    }
    let csv = sweep_csv(&rows);
    match &args.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let mut overrides = BTreeMap::new();
    for raw in &args.params {
        let Some((name, value)) = raw.split_once('=') else {
            return Err(CliError::usage(format!(
                "--param expects NAME=VALUE, got `{raw}`"
            )));
        };
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("--param {name}: bad number `{value}`")))?;
        overrides.insert(name.trim().to_string(), value);
    }

    let mut ast = load_model_file(&args.model_file)?;
    let rates = match &args.machine_file {
        Some(machine_file) => {
            let machine_ast = load_model_file(machine_file)?;
            let machine_name = match &args.machine {
                Some(name) => name.clone(),
                None => match machine_ast.machines.as_slice() {
                    [only] => only.name.clone(),
                    _ => {
                        return Err(CliError::usage(format!(
                            "{}: pass --machine to choose a machine",
                            machine_file.display()
                        )))
                    }
                },
            };
            let rates =
                aspen::extract_rates(&machine_ast, &machine_name, &EvalOptions::default())
                    .map_err(CliError::runtime)?;
            // keep any models the machine file carries reachable
            ast.models.extend(machine_ast.models);
            rates
        }
        None => MachineRates::default(),
    };

    let model_name = match &args.model {
        Some(name) => name.clone(),
        None => match ast.models.as_slice() {
            [only] => only.name.clone(),
            [] => {
                return Err(CliError::runtime(format!(
                    "{}: no model declared",
                    args.model_file.display()
                )))
            }
            several => {
                return Err(CliError::usage(format!(
                    "{}: several models declared ({}); pass --model",
                    args.model_file.display(),
                    several
                        .iter()
                        .map(|m| m.name.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                )))
            }
        },
    };

    let report = aspen::evaluate_model_with_rates(
        &ast,
        &model_name,
        &rates,
        &overrides,
        &EvalOptions::default(),
    )
    .map_err(CliError::runtime)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report.to_json()).expect("json renders")
        );
    } else {
        println!("{report}");
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs, overlay: &Overlay) -> Result<(), CliError> {
    let p_s = pick(args.p_s, overlay.parse("p_s")?, None, "p-s")?;
    let p_a = pick(args.p_a, overlay.parse("p_a")?, None, "p-a")?;
    let trials = pick(args.trials, overlay.parse("trials")?, Some(100_000), "trials")?;
    let seed = pick(args.seed, overlay.parse("seed")?, Some(0), "seed")?;
    if trials < 1 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    if !(p_s > 0.0 && p_s < 1.0) {
        return Err(CliError::usage("--p-s must lie strictly inside (0,1)"));
    }
    if !(p_a > 0.0 && p_a < 1.0) {
        return Err(CliError::usage("--p-a must lie strictly inside (0,1)"));
    }
    let reps = repetitions(p_a, p_s).map_err(CliError::runtime)?;
    let empirical = simulate_repetitions(p_s, reps, trials, seed).map_err(CliError::runtime)?;
    let target = 1.0 - (1.0 - p_s).powi(reps as i32);
    let value = serde_json::json!({
        "p_s": p_s,
        "p_a": p_a,
        "reps": reps,
        "trials": trials,
        "seed": seed,
        "empirical": empirical,
        "target": target,
    });
    println!("{}", serde_json::to_string_pretty(&value).expect("json renders"));
    Ok(())
}
