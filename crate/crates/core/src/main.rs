//! Thin command-line wrapper around [`quench_ising::cli::run`].

use clap::{Parser, Subcommand};
use quench_ising::cli::{install_thread_pool, resolve_threads, run, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "quench-ising",
    version,
    about = "Quench dynamics of disordered Ising rings, assembled into 2D toric-code diagnostics"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a `key = value` config file.
    Run {
        /// Path to the config file (see configs/ for annotated examples).
        config: PathBuf,
        /// Override one config key; may be repeated.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory (defaults to the config's output_path).
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
        /// Worker thread count; else QUENCH_ISING_THREADS, then
        /// RAYON_NUM_THREADS, then one worker per core.
        #[arg(long)]
        threads: Option<usize>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    // One BLAS thread per worker: realization-level parallelism already
    // fills the cores, and nested BLAS pools only fight each other.
    if std::env::var_os("OPENBLAS_NUM_THREADS").is_none() {
        std::env::set_var("OPENBLAS_NUM_THREADS", "1");
    }
    match dispatch(Args::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(args: Args) -> quench_ising::Result<ExitCode> {
    match args.command {
        Command::Run {
            config,
            set,
            out_dir,
            threads,
            seed,
        } => {
            let mut experiment = ExperimentConfig::from_file(&config)?;
            for pair in &set {
                let (key, value) =
                    pair.split_once('=')
                        .ok_or_else(|| quench_ising::Error::Config {
                            key: pair.clone(),
                            message: "--set expects KEY=VALUE".into(),
                        })?;
                experiment.set(key.trim(), value.trim())?;
            }
            if let Some(seed) = seed {
                experiment.master_seed = seed;
            }
            install_thread_pool(resolve_threads(threads));
            let out = out_dir.unwrap_or_else(|| experiment.output_path.clone());
            let report = run(&experiment, &out)?;
            for line in &report.summary {
                println!("{line}");
            }
            println!("done in {:.2}s", report.wall_seconds);
            Ok(if report.gate_passed == Some(false) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}
