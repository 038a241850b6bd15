use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use topamp_cli::config::{parse_config, schema, ExperimentConfig};
use topamp_cli::emit::{emit, TOOL_VERSION};
use topamp_cli::experiments::{run_experiment, RunError};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "topamp", version, about = "Directional amplification in driven-dissipative lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its tables.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output.directory`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for stochastic experiments; overrides the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Fail on the first grid point that cannot be evaluated.
        #[arg(long)]
        strict: bool,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Print the config JSON schema.
    Schema,
    /// Print the tool version.
    Version,
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_CONFIG)
    })?;
    parse_config(&text).map_err(|e| {
        eprintln!("error: invalid config {}:\n{e}", path.display());
        ExitCode::from(EXIT_CONFIG)
    })
}

fn run(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>, threads: Option<usize>, strict: bool) -> ExitCode {
    let mut cfg = match load(&config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Some(s) = seed {
        cfg.override_seed(s);
    }
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    let tables = match run_experiment(&cfg, strict) {
        Ok(t) => t,
        Err(RunError::Config(e)) => {
            eprintln!("error: invalid config {}:\n{e}", config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    let dir = out.unwrap_or_else(|| cfg.output.directory.clone());
    match emit(&cfg, &tables, &dir) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: writing results to {}: {e}", dir.display());
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    let failed: usize = tables.iter().map(|t| t.errors.len()).sum();
    if failed > 0 {
        eprintln!("warning: {failed} grid point(s) failed; results are partial");
        return ExitCode::from(EXIT_PARTIAL);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run { config, out, seed, threads, strict } => run(config, out, seed, threads, strict),
        Command::Validate { config } => match load(&config) {
            Ok(cfg) => {
                println!("ok: {} ({})", cfg.experiment.kind(), cfg.hash());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Schema => {
            println!("{}", serde_json::to_string_pretty(&schema()).expect("schema serializes"));
            ExitCode::SUCCESS
        }
        Command::Version => {
            println!("topamp {TOOL_VERSION}");
            ExitCode::SUCCESS
        }
    }
}
