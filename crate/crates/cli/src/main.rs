//! Command-line front end: generate instances, solve them offline, run
//! online algorithms with optional fairness wrappers, post-process schedules
//! with the swap transform, audit cost ledgers, and drive experiment grids.
//!
//! Artifacts are JSON (instances, schedules, ledgers, reports), JSONL
//! (traces) and CSV (experiment scalars and cumulative-cost curves). All
//! randomness comes from explicit seeds.

use clap::{Args, Parser, Subcommand};
use kfair_core::audit::{audit, FairnessReport};
use kfair_core::fair::fair_transform;
use kfair_core::instances::{
    gen_dca_hard, gen_finite, gen_line, gen_lru_hard, gen_tree, gen_uniform,
};
use kfair_core::online::balance::{BalanceAlg, Greedy};
use kfair_core::online::dca::Dca;
use kfair_core::online::paging::{EvictionRule, Fifo, Lru, Marking};
use kfair_core::online::{run, OnlineAlgorithm, RunOutput};
use kfair_core::opt::{opt_bruteforce, opt_solve};
use kfair_core::wrappers::{AccToMul, EndAligned, PhasedSwap, TwoDiamAdditive};
use kfair_core::{ledger_from_schedule, verify_schedule, CostLedger, Instance, Rat};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kfair", about = "Exact k-server simulation and fairness analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance from a seeded family
    Gen(GenArgs),
    /// Solve an instance offline (min-cost flow, optionally brute force)
    Opt(OptArgs),
    /// Run an online algorithm, optionally under a fairness wrapper
    Run(RunArgs),
    /// Apply the offline swap transform to the optimal schedule
    Transform(TransformArgs),
    /// Compute fairness metrics for one or more cost ledgers
    Audit(AuditArgs),
    /// Run a configured grid of (instance x algorithm x seed) cells
    Experiment(ExperimentArgs),
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct GenSpec {
    /// line | uniform | tree | finite | dca-hard | lru-hard
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// request count (random families)
    #[arg(long, default_value_t = 20)]
    #[serde(default = "default_t")]
    t: usize,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    seed: u64,
    /// site count (uniform/finite), vertex count (tree)
    #[arg(long, default_value_t = 8)]
    #[serde(default = "default_n")]
    n: usize,
    /// segment length (line)
    #[arg(long, default_value_t = 10)]
    #[serde(default = "default_len")]
    len: i64,
    /// subdivision length (dca-hard), e.g. 1/100
    #[arg(long, default_value = "1/100")]
    #[serde(default = "default_eps")]
    eps: String,
    /// sweep count (dca-hard)
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_one")]
    r: usize,
    /// cycle count (lru-hard)
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_one")]
    m: usize,
}

fn default_t() -> usize {
    20
}
fn default_n() -> usize {
    8
}
fn default_len() -> i64 {
    10
}
fn default_eps() -> String {
    "1/100".into()
}
fn default_one() -> usize {
    1
}

impl GenSpec {
    fn build(&self) -> Result<Instance, String> {
        let inst = match self.family.as_str() {
            "line" => gen_line(self.seed, self.k, self.t, self.len),
            "uniform" => gen_uniform(self.seed, self.k, self.t, self.n),
            "tree" => gen_tree(self.seed, self.k, self.t, self.n),
            "finite" => gen_finite(self.seed, self.k, self.t, self.n),
            "dca-hard" => {
                let eps: Rat = self.eps.parse().map_err(|e| format!("--eps: {e}"))?;
                gen_dca_hard(self.k, eps, self.r)
            }
            "lru-hard" => gen_lru_hard(self.k, self.m),
            other => return Err(format!("unknown family {other:?}")),
        };
        inst.validate()?;
        Ok(inst)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    spec: GenSpec,
    /// output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptArgs {
    /// instance JSON
    #[arg(long = "in")]
    input: PathBuf,
    /// solution JSON (cost, assignment, schedule)
    #[arg(long)]
    out: Option<PathBuf>,
    /// per-server cost ledger JSON
    #[arg(long)]
    ledger: Option<PathBuf>,
    /// also cross-check against the exhaustive solver
    #[arg(long)]
    brute: bool,
    /// state budget for the exhaustive solver
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// dca | fifo | lru | marking | marking-random | balance | greedy
    #[arg(long)]
    alg: String,
    /// phased:gamma=G[,seed=S] | acc-to-mul | two-diam | end-aligned
    #[arg(long)]
    wrap: Option<String>,
    #[arg(long = "in")]
    input: PathBuf,
    /// step-by-step JSONL trace
    #[arg(long)]
    trace: Option<PathBuf>,
    /// per-server cost ledger JSON
    #[arg(long)]
    ledger: Option<PathBuf>,
    /// schedule JSON
    #[arg(long)]
    out: Option<PathBuf>,
    /// seed for seeded-random eviction and as the default wrapper seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// fairness slack, e.g. 1 or 1/2
    #[arg(long)]
    epsilon: String,
    /// transform result JSON (schedule, ledger, swaps, bound)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// one or more cost-ledger JSON files
    #[arg(long, required = true, num_args = 1..)]
    ledger: Vec<PathBuf>,
    /// reference cost: a rational, or "alg-total" for the ledger's own total
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// with several ledgers: also report the fraction with
    /// max cost <= alpha * baseline / k + beta
    #[arg(long)]
    beta: Option<String>,
    /// report JSON (array when several ledgers)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// experiment configuration JSON
    #[arg(long)]
    config: PathBuf,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgSpec {
    alg: String,
    #[serde(default)]
    wrap: Option<String>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
enum InstanceSource {
    File { file: PathBuf },
    Generated(GenSpec),
}

/// Schema for `experiment --config`; unknown keys are rejected.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    instances: Vec<InstanceSource>,
    algorithms: Vec<AlgSpec>,
    #[serde(default)]
    seeds: Vec<u64>,
    #[serde(default)]
    alpha: Option<String>,
    #[serde(default)]
    beta: Option<String>,
    /// per-run scalar CSV
    csv: PathBuf,
    /// optional per-run cumulative-cost curves CSV
    #[serde(default)]
    curves: Option<PathBuf>,
}

/// Usage problems (bad flags, malformed config) exit 2; invariant
/// violations and runtime failures exit 1, matching clap's convention.
enum CliError {
    Usage(String),
    Failure(String),
}

impl From<String> for CliError {
    fn from(s: String) -> CliError {
        CliError::Failure(s)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))
}

fn emit<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), String> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value).map_err(|e| e.to_string())?);
            Ok(())
        }
    }
}

fn parse_rat(label: &str, s: &str) -> Result<Rat, CliError> {
    s.parse().map_err(|e| CliError::Usage(format!("{label}: {e}")))
}

fn base_alg(name: &str, seed: u64) -> Result<Box<dyn OnlineAlgorithm>, String> {
    Ok(match name {
        "dca" => Box::new(Dca::new()),
        "fifo" => Box::new(Fifo::new()),
        "lru" => Box::new(Lru::new()),
        "marking" => Box::new(Marking::new(EvictionRule::LowestIndex)),
        "marking-random" => Box::new(Marking::new(EvictionRule::SeededRandom(seed))),
        "balance" => Box::new(BalanceAlg::new()),
        "greedy" => Box::new(Greedy::new()),
        other => return Err(format!("unknown algorithm {other:?}")),
    })
}

fn wrapped_alg(
    alg: &str,
    wrap: Option<&str>,
    seed: u64,
) -> Result<Box<dyn OnlineAlgorithm>, String> {
    let base = base_alg(alg, seed)?;
    let Some(spec) = wrap else { return Ok(base) };
    let (kind, params) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "phased" => {
            let mut gamma = Rat::ONE;
            let mut wrap_seed = seed;
            for kv in params.split(',').filter(|s| !s.is_empty()) {
                match kv.split_once('=') {
                    Some(("gamma", v)) => gamma = v.parse().map_err(|e| format!("gamma: {e}"))?,
                    Some(("seed", v)) => {
                        wrap_seed = v.parse().map_err(|e| format!("seed: {e}"))?
                    }
                    _ => return Err(format!("bad wrapper parameter {kv:?}")),
                }
            }
            Ok(Box::new(PhasedSwap::new(base, gamma, wrap_seed)))
        }
        "acc-to-mul" if params.is_empty() => Ok(Box::new(AccToMul::new(base))),
        "two-diam" if params.is_empty() => Ok(Box::new(TwoDiamAdditive::new(base))),
        "end-aligned" if params.is_empty() => Ok(Box::new(EndAligned::new(base))),
        _ => Err(format!("unknown wrapper {spec:?}")),
    }
}

fn run_instance(
    alg: &str,
    wrap: Option<&str>,
    seed: u64,
    inst: &Instance,
) -> Result<RunOutput, String> {
    let mut boxed = wrapped_alg(alg, wrap, seed)?;
    let out = run(boxed.as_mut(), &inst.space, &inst.start, &inst.requests)?;
    verify_schedule(&inst.space, &out.schedule, &inst.requests)?;
    Ok(out)
}

fn summary(label: &str, ledger: &CostLedger) {
    let totals = ledger.totals();
    let rendered: Vec<String> = totals.iter().map(|c| format!("{c} ({})", c.decimal(4))).collect();
    println!("{label}: total {} ({})", ledger.total(), ledger.total().decimal(4));
    println!("  per server: {}", rendered.join(", "));
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let inst = args.spec.build()?;
    println!(
        "generated {} — k={}, {} requests",
        inst.provenance.as_deref().unwrap_or("instance"),
        inst.k(),
        inst.requests.len()
    );
    Ok(emit(&args.out, &inst)?)
}

fn cmd_opt(args: OptArgs) -> Result<(), CliError> {
    let inst: Instance = read_json(&args.input)?;
    inst.validate()?;
    let sol = opt_solve(&inst)?;
    verify_schedule(&inst.space, &sol.schedule, &inst.requests)?;
    if args.brute {
        let brute = opt_bruteforce(&inst, args.budget)?;
        if brute != sol.cost {
            return Err(format!("flow optimum {} disagrees with brute force {brute}", sol.cost).into());
        }
        println!("brute-force cross-check agreed");
    }
    let ledger = ledger_from_schedule(&inst.space, &sol.schedule)?;
    summary("optimum", &ledger);
    if let Some(path) = &args.ledger {
        write_json(path, &ledger)?;
    }
    Ok(emit(&args.out, &sol)?)
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let inst: Instance = read_json(&args.input)?;
    inst.validate()?;
    let out = run_instance(&args.alg, args.wrap.as_deref(), args.seed, &inst)?;
    summary(&args.alg, &out.ledger);
    for (k, v) in &out.trace.metrics {
        println!("  {k} = {v}");
    }
    if let Some(path) = &args.trace {
        fs::write(path, out.trace.to_jsonl()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(path) = &args.ledger {
        write_json(path, &out.ledger)?;
    }
    if let Some(path) = &args.out {
        write_json(path, &out.schedule)?;
    }
    Ok(())
}

fn cmd_transform(args: TransformArgs) -> Result<(), CliError> {
    let inst: Instance = read_json(&args.input)?;
    inst.validate()?;
    let eps = parse_rat("--epsilon", &args.epsilon)?;
    let sol = opt_solve(&inst)?;
    let out = fair_transform(&inst.space, &sol.schedule, sol.cost, eps)?;
    verify_schedule(&inst.space, &out.schedule, &inst.requests)?;
    summary("transformed", &out.ledger);
    println!(
        "  {} swaps; bound (1+eps) w/k + beta = {} ({})",
        out.swaps.len(),
        out.bound(),
        out.bound().decimal(4)
    );
    Ok(emit(&args.out, &out)?)
}

fn cmd_audit(args: AuditArgs) -> Result<(), CliError> {
    let alpha = args.alpha.as_deref().map(|s| parse_rat("--alpha", s)).transpose()?;
    let beta = args.beta.as_deref().map(|s| parse_rat("--beta", s)).transpose()?;
    let mut reports: Vec<FairnessReport> = Vec::new();
    let mut within = 0usize;
    for path in &args.ledger {
        let ledger: CostLedger = read_json(path)?;
        let baseline = match args.baseline.as_deref() {
            None => None,
            Some("alg-total") => Some(ledger.total()),
            Some(s) => Some(parse_rat("--baseline", s)?),
        };
        let report = audit(&ledger, baseline, alpha)?;
        if let (Some(w), Some(a), Some(b)) = (baseline, alpha, beta) {
            if report.egalitarian <= a * w / Rat::int(ledger.k as i64) + b {
                within += 1;
            }
        }
        println!(
            "{}: egalitarian {} ({}), gap {}{}",
            path.display(),
            report.egalitarian,
            report.egalitarian.decimal(4),
            report.additive_gap,
            report
                .residual
                .map(|r| format!(", residual {r}"))
                .unwrap_or_default()
        );
        reports.push(report);
    }
    if beta.is_some() && args.ledger.len() > 1 {
        println!(
            "ensemble: {within}/{} ledgers within alpha w/k + beta",
            args.ledger.len()
        );
    }
    match args.out {
        Some(ref path) if reports.len() == 1 => write_json(path, &reports[0])?,
        Some(ref path) => write_json(path, &reports)?,
        None => {}
    }
    Ok(())
}

fn csv_escape(s: &str) -> String {
    s.replace(',', ";")
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let config: ExperimentConfig = read_json(&args.config).map_err(CliError::Usage)?;
    let seeds = if config.seeds.is_empty() { vec![0u64] } else { config.seeds.clone() };
    let alpha = config.alpha.as_deref().map(|s| parse_rat("alpha", s)).transpose()?;
    let beta = config.beta.as_deref().map(|s| parse_rat("beta", s)).transpose()?;

    let mut csv = csv::Writer::from_path(&config.csv).map_err(|e| e.to_string())?;
    csv.write_record([
        "instance", "alg", "wrap", "seed", "k", "total", "max", "min", "residual",
        "phases", "permutations", "swaps",
    ])
    .map_err(|e| e.to_string())?;
    let mut curves = match &config.curves {
        Some(path) => {
            let mut w = csv::Writer::from_path(path).map_err(|e| e.to_string())?;
            w.write_record(["instance", "alg", "wrap", "seed", "step", "server", "cumulative"])
                .map_err(|e| e.to_string())?;
            Some(w)
        }
        None => None,
    };

    let mut rows = 0usize;
    let mut within = 0usize;
    for source in &config.instances {
        let inst = match source {
            InstanceSource::File { file } => {
                let inst: Instance = read_json(file)?;
                inst.validate()?;
                inst
            }
            InstanceSource::Generated(spec) => spec.build()?,
        };
        let label = inst.provenance.clone().unwrap_or_else(|| "instance".into());
        for alg in &config.algorithms {
            for &seed in &seeds {
                let out = run_instance(&alg.alg, alg.wrap.as_deref(), seed, &inst)?;
                let ledger = &out.ledger;
                let residual = match alpha {
                    Some(a) => {
                        let r = kfair_core::audit::alpha_beta_residual(ledger, ledger.total(), a)?;
                        if let Some(b) = beta {
                            if r <= b {
                                within += 1;
                            }
                        }
                        r.to_string()
                    }
                    None => String::new(),
                };
                let metric = |key: &str| {
                    out.trace.metrics.get(key).map(|v| v.to_string()).unwrap_or_default()
                };
                csv.write_record([
                    csv_escape(&label),
                    alg.alg.clone(),
                    alg.wrap.clone().unwrap_or_default(),
                    seed.to_string(),
                    ledger.k.to_string(),
                    ledger.total().to_string(),
                    ledger.max_server().to_string(),
                    ledger.min_server().to_string(),
                    residual,
                    metric("phases"),
                    metric("permutations"),
                    String::new(),
                ])
                .map_err(|e| e.to_string())?;
                rows += 1;
                if let Some(w) = curves.as_mut() {
                    for (step, row) in ledger.cumulative().iter().enumerate() {
                        for (server, c) in row.iter().enumerate() {
                            w.write_record([
                                csv_escape(&label),
                                alg.alg.clone(),
                                alg.wrap.clone().unwrap_or_default(),
                                seed.to_string(),
                                step.to_string(),
                                server.to_string(),
                                c.to_string(),
                            ])
                            .map_err(|e| e.to_string())?;
                        }
                    }
                }
            }
        }
    }
    csv.flush().map_err(|e| e.to_string())?;
    if let Some(w) = curves.as_mut() {
        w.flush().map_err(|e| e.to_string())?;
    }
    println!("{rows} runs written to {}", config.csv.display());
    if alpha.is_some() && beta.is_some() && rows > 0 {
        println!(
            "empirical frequency within alpha w/k + beta: {within}/{rows} = {:.3}",
            within as f64 / rows as f64
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Opt(a) => cmd_opt(a),
        Command::Run(a) => cmd_run(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
        Err(CliError::Usage(e)) => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
    }
}
