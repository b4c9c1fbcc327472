use clap::{Parser, Subcommand};
use gvar::cli::{
    cmd_conditions, cmd_construct, cmd_oracle_check, cmd_variation, cmd_verify, CliError,
    ExperimentConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Witness-certified generalized-variation estimators, condition checkers,
/// and counterexample constructions.
#[derive(Parser)]
#[command(name = "gvar", version)]
struct Cli {
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the budget seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the budget grid depth.
    #[arg(long = "budget-depth", global = true)]
    budget_depth: Option<u32>,
    /// Override the construction truncation length.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Override the condition-table range.
    #[arg(long, global = true)]
    nmax: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the divergence/boundedness conditions and their verdicts.
    Conditions,
    /// Build a counterexample construction with its certificates.
    Construct,
    /// Run a named variation estimator on a function file.
    Variation,
    /// Run the assertion suite; exit 0 iff every assertion passes.
    Verify,
    /// Estimator-vs-oracle spot checks.
    #[command(hide = true)]
    OracleCheck,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.budget.seed = seed;
    }
    if let Some(depth) = cli.budget_depth {
        cfg.budget.grid_depth = depth;
    }
    if let Some(k) = cli.k {
        cfg.k = k;
    }
    if let Some(nmax) = cli.nmax {
        cfg.n_max = nmax;
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let cfg = load_config(cli)?;
    match cli.command {
        Command::Conditions => cmd_conditions(&cfg, &cli.out).map(|_| true),
        Command::Construct => cmd_construct(&cfg, &cli.out).map(|_| true),
        Command::Variation => cmd_variation(&cfg, &cli.out).map(|_| true),
        Command::Verify => cmd_verify(&cfg, &cli.out),
        Command::OracleCheck => cmd_oracle_check(&cfg, &cli.out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("GVAR_LOG")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed; see {}", cli.out.display());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
