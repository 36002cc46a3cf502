use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use latent_slice::discrete::{detailed_balance_residual, TabulatedPmf};
use latent_slice::io::{write_samples_csv, write_summary_json};
use latent_slice::{run_experiment, ExperimentConfig, ExperimentName, RngState, UniformSource};

/// Latent slice sampling experiments.
///
/// Every `run` flag can also be set through an environment variable with the
/// `LATENT_SLICE_` prefix (for example `LATENT_SLICE_SEED=7`) or through a
/// TOML file passed with `--config`, whose keys match the long flag names.
/// Flags override the environment, which overrides the file.
#[derive(Debug, Parser)]
#[command(name = "latent-slice", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write samples CSV and summary JSON.
    Run(RunArgs),
    /// Check detailed balance of the window kernel on a random pmf.
    DbCheck(DbCheckArgs),
    /// List the available experiments.
    List,
}

#[derive(Debug, Args, Default)]
struct RunArgs {
    #[arg(long, env = "LATENT_SLICE_EXPERIMENT")]
    experiment: Option<String>,
    #[arg(long, env = "LATENT_SLICE_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "LATENT_SLICE_ITERS")]
    iters: Option<usize>,
    #[arg(long, env = "LATENT_SLICE_BURNIN")]
    burnin: Option<usize>,
    #[arg(long, env = "LATENT_SLICE_THIN")]
    thin: Option<usize>,
    /// Rate of the scale prior p(s) ∝ s exp(-lambda s).
    #[arg(long, env = "LATENT_SLICE_LAMBDA")]
    lambda: Option<f64>,
    /// Window width of the discrete kernel.
    #[arg(long, env = "LATENT_SLICE_K")]
    k: Option<usize>,
    /// Output directory [default: out].
    #[arg(long, env = "LATENT_SLICE_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "LATENT_SLICE_CONFIG")]
    config: Option<PathBuf>,
    /// Independent chains, run in parallel, one CSV each.
    #[arg(long, env = "LATENT_SLICE_CHAINS")]
    chains: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    experiment: Option<String>,
    seed: Option<u64>,
    iters: Option<usize>,
    burnin: Option<usize>,
    thin: Option<usize>,
    lambda: Option<f64>,
    k: Option<usize>,
    out: Option<PathBuf>,
    chains: Option<usize>,
}

#[derive(Debug, Args)]
struct DbCheckArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    states: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Bad input from the user; exits with status 1.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

struct Plan {
    config: ExperimentConfig,
    out: PathBuf,
    chains: usize,
}

fn resolve(args: RunArgs) -> anyhow::Result<Plan> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let name = args.experiment.or(file.experiment).ok_or_else(|| {
        usage("no experiment given; pass --experiment NAME (see `latent-slice list`)")
    })?;
    let name: ExperimentName = name.parse().map_err(|_| {
        usage(format!(
            "unknown experiment `{name}` (see `latent-slice list`)"
        ))
    })?;

    let mut config = match args.iters.or(file.iters) {
        Some(n) => ExperimentConfig::with_iters(name, n),
        None => ExperimentConfig::defaults(name),
    };
    if let Some(v) = args.seed.or(file.seed) {
        config.seed = v;
    }
    if let Some(v) = args.burnin.or(file.burnin) {
        config.burn_in = v;
    }
    if let Some(v) = args.thin.or(file.thin) {
        config.thin = v;
    }
    if let Some(v) = args.lambda.or(file.lambda) {
        config.lambda = v;
    }
    if let Some(v) = args.k.or(file.k) {
        config.k = v;
    }
    config.validate().map_err(|e| usage(e.to_string()))?;
    let chains = args.chains.or(file.chains).unwrap_or(1);
    if chains == 0 {
        bail!(usage("--chains must be at least 1"));
    }
    Ok(Plan {
        config,
        out: args
            .out
            .or(file.out)
            .unwrap_or_else(|| PathBuf::from("out")),
        chains,
    })
}

fn output_paths(
    dir: &Path,
    name: ExperimentName,
    chain: usize,
    chains: usize,
) -> (PathBuf, PathBuf) {
    let stem = if chains == 1 {
        name.to_string()
    } else {
        format!("{name}.chain{chain}")
    };
    (
        dir.join(format!("{stem}.csv")),
        dir.join(format!("{stem}.summary.json")),
    )
}

fn run_one(plan: &Plan, chain: usize) -> anyhow::Result<String> {
    let cfg = &plan.config;
    let out =
        run_experiment(cfg, chain).with_context(|| format!("{} chain {chain} failed", cfg.name))?;
    let (csv_path, json_path) = output_paths(&plan.out, cfg.name, chain, plan.chains);
    let csv =
        File::create(&csv_path).with_context(|| format!("cannot write {}", csv_path.display()))?;
    write_samples_csv(BufWriter::new(csv), &out.columns, &out.samples)
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    let json = File::create(&json_path)
        .with_context(|| format!("cannot write {}", json_path.display()))?;
    write_summary_json(BufWriter::new(json), &out.summary(cfg, chain))
        .with_context(|| format!("cannot write {}", json_path.display()))?;
    Ok(format!(
        "{} chain {chain}: {} draws x {} columns in {:.3}s -> {}\n  {}",
        cfg.name,
        out.samples.n_kept(),
        out.columns.len(),
        out.wall_time(),
        csv_path.display(),
        out.extra
    ))
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let plan = resolve(args)?;
    fs::create_dir_all(&plan.out)
        .with_context(|| format!("cannot create {}", plan.out.display()))?;
    let reports: Vec<anyhow::Result<String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..plan.chains)
            .map(|c| {
                let plan = &plan;
                scope.spawn(move || run_one(plan, c))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(anyhow::anyhow!("chain panicked")))
            })
            .collect()
    });
    for report in reports {
        println!("{}", report?);
    }
    Ok(())
}

fn db_check(args: DbCheckArgs) -> anyhow::Result<bool> {
    if args.k == 0 || args.states == 0 {
        bail!(usage("--k and --states must be positive"));
    }
    let mut rng = RngState::new(args.seed);
    let mass: Vec<f64> = (0..args.states).map(|_| 0.01 + rng.next_unit()).collect();
    let residual = detailed_balance_residual(&TabulatedPmf::from_mass(0, &mass), args.k);
    println!(
        "max residual {residual:.3e} (k = {}, {} states)",
        args.k, args.states
    );
    Ok(residual < 1e-12)
}

fn list() {
    for name in ExperimentName::ALL {
        let d = ExperimentConfig::defaults(name);
        println!(
            "{:<22} {}\n{:<22} defaults: iters {}, burnin {}, thin {}, lambda {:.4}, k {}",
            name.as_str(),
            name.description(),
            "",
            d.n_iter,
            d.burn_in,
            d.thin,
            d.lambda,
            d.k
        );
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args).map(|_| true),
        Command::DbCheck(args) => db_check(args),
        Command::List => {
            list();
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
