use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use poafd_cli::config::RunConfig;
use poafd_cli::error::CliError;
use poafd_cli::experiment::run_experiment;

#[derive(Parser)]
#[command(
    name = "poafd",
    version,
    about = "Adaptive kernel decomposition experiments in weighted Bergman spaces"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment described by a JSON config file.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed override for seeded targets.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for the selection search (0 keeps the default).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Per-iteration progress on stderr.
        #[arg(long)]
        verbose: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Cmd::Run { config, out, seed, threads, verbose } = cli.cmd;
    match run(&config, out, seed, threads, verbose) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(
    path: &Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
    threads: usize,
    verbose: bool,
) -> Result<(), CliError> {
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let out_dir = out
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("poafd-out"));
    let summary = run_experiment(&cfg, &out_dir, verbose)?;
    for m in &summary.methods {
        println!(
            "{}: rel error {:.6e} after {} terms",
            m.method, m.final_rel_error, m.terms
        );
    }
    for r in &summary.matrix {
        match r.final_rel_error {
            Some(re) => println!("alpha {}: rel error {re:.6e} after {} terms", r.alpha, r.iterations),
            None => println!("alpha {}: na", r.alpha),
        }
    }
    println!("wrote {}", out_dir.join("summary.json").display());
    Ok(())
}
