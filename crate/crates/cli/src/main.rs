mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use statqpe::{Error, ErrorClass};

#[derive(Parser)]
#[command(name = "statqpe", version, about = "Statistical phase estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sampling and compilation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (overrides output_dir in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the Fourier coefficient table.
    Coeffs,
    /// Compile the controlled evolution for every k in the filter support.
    Compile,
    /// Run the sampled Hadamard tests and write the g_k table.
    Run,
    /// Reconstruct the CDF from a g_k table and extract energies.
    Estimate {
        /// g_k table; defaults to gk_table.csv in the output directory.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Bin probabilities from a g_k table sampled with the QEEA filter.
    Qeea {
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Exact spectrum and overlaps of the configured problem.
    Oracle,
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Input => 2,
        ErrorClass::Data => 3,
        ErrorClass::Capacity => 4,
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }
    let path = cli
        .config
        .ok_or_else(|| Error::InvalidArgument("--config is required".into()))?;
    let loaded = config::load(&path)?;
    let seed = cli.seed.unwrap_or(loaded.config.seed);
    let out = cli
        .out
        .or_else(|| loaded.config.output_dir.as_ref().map(|d| loaded.base.join(d)))
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = commands::Context { loaded, seed, out };
    match cli.command {
        Command::Coeffs => commands::coeffs(ctx),
        Command::Compile => commands::compile_all(ctx),
        Command::Run => commands::run(ctx),
        Command::Estimate { table } => commands::estimate(ctx, table.as_deref()),
        Command::Qeea { table } => commands::qeea(ctx, table.as_deref()),
        Command::Oracle => commands::oracle(ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
