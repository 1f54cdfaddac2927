//! `pspin`: experiment harness CLI.
//!
//! Every subcommand resolves a config (from `--config` JSON or flags), runs
//! the corresponding library operation, and writes one directory of flat
//! files: `meta.json` (seed, generator, build, timestamp, config digest),
//! `report.json` (the payload; timestamp-free so reruns are byte-identical)
//! and plot-ready CSVs.
//!
//! Exit codes: 0 success, 1 usage error (schema printed), 2 budget or
//! assertion error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use pspin_core::amp::{run_iterations, sign_round};
use pspin_core::error::Error as CoreError;
use pspin_core::experiments::{
    run_concentration, run_ogp_experiment, run_overlap_path, run_stability, ConcentrationConfig,
    OgpExperimentConfig, PathConfig, StabilityConfig,
};
use pspin_core::oracle::{
    brute_force_ground_state, chaos_check, near_optimal_set, null_overlap_model,
};
use pspin_core::report::{
    chaos_csv_rows, concentration_csv_rows, overlap_csv_rows, path_csv_rows, residual_csv_rows,
    rounding_csv_rows, stability_csv_rows, trace_csv_rows, RunDir, RunMetadata, TraceSummary,
    CHAOS_CSV_HEADER, CONCENTRATION_CSV_HEADER, OVERLAP_CSV_HEADER, PATH_CSV_HEADER,
    RESIDUAL_CSV_HEADER, ROUNDING_CSV_HEADER, STABILITY_CSV_HEADER, TRACE_CSV_HEADER,
};
use pspin_core::schedules::{
    build_schedule, residual_norms, run_tap_data_driven, ScheduleConfig, TapConfig,
};
use pspin_core::tensor::save_tensor;
use pspin_core::CouplingTensor64;

const CONFIG_SCHEMA: &str = r#"config schema (JSON)

schedule object (shared by amp-run, round, path, stability, concentrate):
  {"schedule": "tap", "beta": <f64>, "q": <f64 in (0,1]>, "a": [f64...],
   "t": <int>, "m": <f64 >= 1>, "data_driven": <bool, default false>}
  {"schedule": "gd", "eta": [f64...], "direction": "descent"|"ascent",
   "t": <int>, "m": <f64 >= 1>, "u0": "zeros"|"uniform"}
  single-element "a"/"eta" lists broadcast across all steps.

amp-run / round --config:
  {"p": <int>, "n": <int>, "seed": <u64>, "schedule": {...},
   "include_vectors": <bool, default false>}

path --config (or flags --p --n --t --seed --beta --q --delta [--mu]):
  {"p": <int>, "n": <int>, "schedule": {...}, "delta": <f64, 1/delta integer>,
   "seed": <u64>, "mu_probe": <f64, optional>}

stability --config:
  {"p": <int>, "n": <int>, "schedule": {...}, "pair_count": <int>,
   "tau_small": <f64, optional: omit for independent pairs>, "seed": <u64>,
   "c2_samples": <int, default 32>}

concentrate --config:
  {"quantity": "eta_n"|"a_of_v", "p": <int>, "n_list": [int...],
   "replicas": <int>, "seed": <u64>, "schedule": {... required for a_of_v}}

ogp-scan --config:
  {"p": <int>, "n": <int>, "seed_a": <u64>, "seed_ahat": <u64>,
   "tau_grid": [f64...], "mu": <f64>, "min_width": <f64, default 0.05>,
   "bin_width": <f64, default 0.02>}

flag-only subcommands: sample --p --n --seed [--save-tensor];
ground-state --p --n --seed [--mu]; chaos --p --n --pairs --mu --seed.
Common: --out <dir> (default pspin-out), --threads <k>."#;

#[derive(Parser)]
#[command(
    name = "pspin",
    version,
    about = "p-spin coupling tensors, AMP runs and landscape experiments"
)]
struct Cli {
    /// Worker threads for parallel sections (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "pspin-out")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a Gaussian coupling tensor and report summary statistics.
    Sample(SampleArgs),
    /// Run the AMP engine and export the trace.
    AmpRun(RunArgs),
    /// Run the AMP engine, then sign-round V onto the binary cube.
    Round(RunArgs),
    /// Exhaustive ground state, optionally with the near-optimal set.
    GroundState(GroundStateArgs),
    /// Overlap scan over the interpolated tensor family.
    OgpScan(ConfigOnlyArgs),
    /// Ground-state overlaps across independent tensor pairs.
    Chaos(ChaosArgs),
    /// Overlap path along the tau grid.
    Path(PathArgs),
    /// Perturbation stability records and bound checks.
    Stability(ConfigOnlyArgs),
    /// Monte Carlo concentration of eta_N or A(V)/N.
    Concentrate(ConfigOnlyArgs),
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Also write the tensor container file (tensor.bin).
    #[arg(long)]
    save_tensor: bool,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run config; see the schema printed on usage errors.
    #[arg(long, conflicts_with_all = ["p", "n"])]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Horizon for the default TAP schedule built from flags.
    #[arg(long, default_value_t = 3)]
    t: usize,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    m: f64,
    /// Include the full iterate vectors in report.json.
    #[arg(long)]
    include_vectors: bool,
}

#[derive(Args)]
struct GroundStateArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Also enumerate the mu-near-optimal set.
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args)]
struct ChaosArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    pairs: u32,
    #[arg(long, default_value_t = 0.05)]
    mu: f64,
    #[arg(long)]
    seed: u64,
    /// Null-model simulation size.
    #[arg(long, default_value_t = 20_000)]
    sim_pairs: u32,
}

#[derive(Args)]
struct ConfigOnlyArgs {
    /// JSON config; see the schema printed on usage errors.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct PathArgs {
    /// JSON PathConfig; flags below build a default TAP run instead.
    #[arg(long, conflicts_with_all = ["p", "n"])]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    t: usize,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    m: f64,
    /// Grid spacing; 1/delta must be an integer.
    #[arg(long, default_value_t = 0.125)]
    delta: f64,
    /// Probe near-optimality of each output (needs brute-force budget).
    #[arg(long)]
    mu: Option<f64>,
}

fn resolve_path_config(args: &PathArgs) -> Result<PathConfig, CliError> {
    if let Some(path) = &args.config {
        return load_config(path);
    }
    let (p, n) = match (args.p, args.n) {
        (Some(p), Some(n)) => (p, n),
        _ => {
            return Err(CliError::Usage(
                "path needs --config or both --p and --n".into(),
            ))
        }
    };
    Ok(PathConfig {
        p,
        n,
        schedule: ScheduleConfig::Tap(TapConfig {
            beta: args.beta,
            q: args.q,
            a: vec![0.0],
            t: args.t,
            m: args.m,
            data_driven: false,
        }),
        delta: args.delta,
        seed: args.seed,
        mu_probe: args.mu,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RunConfig {
    p: usize,
    n: usize,
    seed: u64,
    schedule: ScheduleConfig,
    #[serde(default)]
    include_vectors: bool,
}

/// Usage problems exit 1 (with the schema); budget and assertion problems
/// exit 2.
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BudgetExceeded(_) | CoreError::NonFinite { .. } => {
                CliError::Runtime(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("config parse error: {e}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help/--version as "errors" with success status
            if e.use_stderr() {
                eprintln!("{e}");
                eprintln!("\n{CONFIG_SCHEMA}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    if let Some(threads) = cli.threads {
        // best effort; a pre-initialized global pool only affects speed
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("\n{CONFIG_SCHEMA}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_config<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn open_run_dir(cli: &Cli, seed: u64, config_json: &str) -> Result<RunDir, CliError> {
    let dir = RunDir::create(&cli.out)?;
    dir.write_meta(&RunMetadata::new(seed, config_json))?;
    Ok(dir)
}

fn resolve_run_config(args: &RunArgs) -> Result<RunConfig, CliError> {
    if let Some(path) = &args.config {
        return load_config(path);
    }
    let (p, n) = match (args.p, args.n) {
        (Some(p), Some(n)) => (p, n),
        _ => {
            return Err(CliError::Usage(
                "amp-run/round need --config or both --p and --n".into(),
            ))
        }
    };
    Ok(RunConfig {
        p,
        n,
        seed: args.seed,
        schedule: ScheduleConfig::Tap(TapConfig {
            beta: args.beta,
            q: args.q,
            a: vec![0.0],
            t: args.t,
            m: args.m,
            data_driven: false,
        }),
        include_vectors: args.include_vectors,
    })
}

fn run_from_config(
    tensor: &CouplingTensor64,
    cfg: &RunConfig,
) -> Result<pspin_core::IterationTrace64, CliError> {
    match &cfg.schedule {
        ScheduleConfig::Tap(tap) if tap.data_driven => Ok(run_tap_data_driven(tensor, tap)?),
        schedule => {
            let (schedule, u0) = build_schedule::<f64>(schedule, cfg.p, cfg.n, cfg.seed)?;
            Ok(run_iterations(tensor, &schedule, &u0)?)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Sample(args) => {
            let config_json = format!(
                "{{\"cmd\":\"sample\",\"p\":{},\"n\":{},\"seed\":{}}}",
                args.p, args.n, args.seed
            );
            let tensor = CouplingTensor64::sample_gaussian(args.p, args.n, args.seed)?;
            let dir = open_run_dir(cli, args.seed, &config_json)?;
            let entries = tensor.entries();
            let count = entries.len() as f64;
            let mean = entries.iter().sum::<f64>() / count;
            let variance = entries.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / count;
            #[derive(Serialize)]
            struct SampleReport<'a> {
                order: usize,
                dim: usize,
                entry_count: usize,
                frobenius: f64,
                entry_mean: f64,
                entry_variance: f64,
                provenance: Option<&'a pspin_core::tensor::Provenance>,
            }
            dir.write_json(
                "report.json",
                &SampleReport {
                    order: tensor.order(),
                    dim: tensor.dim(),
                    entry_count: entries.len(),
                    frobenius: tensor.frobenius(),
                    entry_mean: mean,
                    entry_variance: variance,
                    provenance: tensor.provenance(),
                },
            )?;
            if args.save_tensor {
                save_tensor(&tensor, dir.path().join("tensor.bin"))?;
            }
            Ok(())
        }
        Cmd::AmpRun(args) => {
            let cfg = resolve_run_config(args)?;
            let config_json = serde_json::to_string(&cfg)?;
            let tensor = CouplingTensor64::sample_gaussian(cfg.p, cfg.n, cfg.seed)?;
            let trace = run_from_config(&tensor, &cfg)?;
            let dir = open_run_dir(cli, cfg.seed, &config_json)?;
            dir.write_json(
                "report.json",
                &TraceSummary::from_trace(&trace, cfg.include_vectors),
            )?;
            dir.write_csv("trace.csv", TRACE_CSV_HEADER, trace_csv_rows(&trace))?;
            if let ScheduleConfig::Tap(tap) = &cfg.schedule {
                let residuals = residual_norms(&tensor, tap.beta, &trace)?;
                dir.write_csv(
                    "residuals.csv",
                    RESIDUAL_CSV_HEADER,
                    residual_csv_rows(&residuals),
                )?;
            }
            Ok(())
        }
        Cmd::Round(args) => {
            let cfg = resolve_run_config(args)?;
            let config_json = serde_json::to_string(&cfg)?;
            let tensor = CouplingTensor64::sample_gaussian(cfg.p, cfg.n, cfg.seed)?;
            let trace = run_from_config(&tensor, &cfg)?;
            let rounded = sign_round(&tensor, &trace.v)?;
            let dir = open_run_dir(cli, cfg.seed, &config_json)?;
            #[derive(Serialize)]
            struct RoundReport {
                schedule_name: String,
                objective_before: f64,
                objective_after: f64,
                sigma: Vec<i8>,
            }
            dir.write_json(
                "report.json",
                &RoundReport {
                    schedule_name: trace.schedule_name.clone(),
                    objective_before: rounded.objective_before,
                    objective_after: rounded.objective_after,
                    sigma: rounded.sigma.clone(),
                },
            )?;
            dir.write_csv(
                "rounding.csv",
                ROUNDING_CSV_HEADER,
                rounding_csv_rows(&rounded),
            )?;
            Ok(())
        }
        Cmd::GroundState(args) => {
            let config_json = format!(
                "{{\"cmd\":\"ground-state\",\"p\":{},\"n\":{},\"seed\":{},\"mu\":{:?}}}",
                args.p, args.n, args.seed, args.mu
            );
            let tensor = CouplingTensor64::sample_gaussian(args.p, args.n, args.seed)?;
            let ground = brute_force_ground_state(&tensor)?;
            let near = match args.mu {
                Some(mu) => Some(near_optimal_set(&tensor, mu)?),
                None => None,
            };
            let dir = open_run_dir(cli, args.seed, &config_json)?;
            #[derive(Serialize)]
            struct GroundStateReport {
                eta_n: f64,
                minimizers: Vec<Vec<i8>>,
                deduplicated_minimizers: Vec<Vec<i8>>,
                states_evaluated: u64,
                #[serde(skip_serializing_if = "Option::is_none")]
                near_optimal: Option<pspin_core::NearOptimalSet64>,
            }
            dir.write_json(
                "report.json",
                &GroundStateReport {
                    eta_n: ground.eta_n,
                    deduplicated_minimizers: ground.deduplicated_minimizers(),
                    minimizers: ground.minimizers.clone(),
                    states_evaluated: ground.states_evaluated,
                    near_optimal: near,
                },
            )?;
            Ok(())
        }
        Cmd::OgpScan(args) => {
            let cfg: OgpExperimentConfig = load_config(&args.config)?;
            let config_json = serde_json::to_string(&cfg)?;
            let report = run_ogp_experiment(&cfg)?;
            let dir = open_run_dir(cli, cfg.seed_a, &config_json)?;
            dir.write_json("report.json", &report)?;
            dir.write_csv("overlaps.csv", OVERLAP_CSV_HEADER, overlap_csv_rows(&report))?;
            Ok(())
        }
        Cmd::Chaos(args) => {
            let config_json = format!(
                "{{\"cmd\":\"chaos\",\"p\":{},\"n\":{},\"pairs\":{},\"mu\":{},\"seed\":{}}}",
                args.p, args.n, args.pairs, args.mu, args.seed
            );
            let null = null_overlap_model(args.n, args.pairs, args.sim_pairs, args.seed);
            let chaos = chaos_check::<f64>(args.p, args.n, args.pairs, args.mu, args.seed)?;
            let dir = open_run_dir(cli, args.seed, &config_json)?;
            #[derive(Serialize)]
            struct ChaosRunReport {
                mean_below_null_threshold: bool,
                chaos: pspin_core::oracle::ChaosReport,
                null: pspin_core::oracle::NullOverlapModel,
            }
            let below = chaos.mean_abs_overlap < null.threshold;
            dir.write_json(
                "report.json",
                &ChaosRunReport {
                    mean_below_null_threshold: below,
                    chaos: chaos.clone(),
                    null,
                },
            )?;
            dir.write_csv("chaos.csv", CHAOS_CSV_HEADER, chaos_csv_rows(&chaos))?;
            Ok(())
        }
        Cmd::Path(args) => {
            let cfg = resolve_path_config(args)?;
            let config_json = serde_json::to_string(&cfg)?;
            let records = run_overlap_path(&cfg)?;
            let dir = open_run_dir(cli, cfg.seed, &config_json)?;
            #[derive(Serialize)]
            struct PathReport {
                records: Vec<pspin_core::experiments::PathRecord>,
            }
            dir.write_json(
                "report.json",
                &PathReport {
                    records: records.clone(),
                },
            )?;
            dir.write_csv("path.csv", PATH_CSV_HEADER, path_csv_rows(&records))?;
            Ok(())
        }
        Cmd::Stability(args) => {
            let cfg: StabilityConfig = load_config(&args.config)?;
            let config_json = serde_json::to_string(&cfg)?;
            let outcome = run_stability(&cfg)?;
            let dir = open_run_dir(cli, cfg.seed, &config_json)?;
            dir.write_json("report.json", &outcome)?;
            dir.write_csv(
                "stability.csv",
                STABILITY_CSV_HEADER,
                stability_csv_rows(&outcome.records),
            )?;
            if !outcome.violations.is_empty() {
                return Err(CliError::Runtime(format!(
                    "stability bound violated: {}",
                    outcome.violations.join("; ")
                )));
            }
            Ok(())
        }
        Cmd::Concentrate(args) => {
            let cfg: ConcentrationConfig = load_config(&args.config)?;
            let config_json = serde_json::to_string(&cfg)?;
            let records = run_concentration(&cfg)?;
            let dir = open_run_dir(cli, cfg.seed, &config_json)?;
            #[derive(Serialize)]
            struct ConcentrationReport {
                records: Vec<pspin_core::experiments::ConcentrationRecord>,
            }
            dir.write_json(
                "report.json",
                &ConcentrationReport {
                    records: records.clone(),
                },
            )?;
            for record in &records {
                dir.write_csv(
                    &format!("concentration_n{}.csv", record.n),
                    CONCENTRATION_CSV_HEADER,
                    concentration_csv_rows(record),
                )?;
            }
            Ok(())
        }
    }
}
