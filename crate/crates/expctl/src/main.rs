use clap::{Parser, Subcommand};
use extamen_cli::{report_dir, run_to_dir, CliError, ExperimentConfig, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

/// Reproducible random-walk experiments on groups of interval exchanges.
#[derive(Parser)]
#[command(name = "extamen", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "EXTAMEN_THREADS")]
        threads: Option<usize>,
    },
    /// Summarize a results directory and write plot data under `report/`.
    Report { dir: PathBuf },
    /// Print the exact oracle values for `0..=n`.
    Oracle {
        config: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Run { config, out, seed, threads } => {
            let res = run_to_dir(&config, &out, &RunOptions { seed, threads })?;
            println!(
                "{}: {} records in {:.2}s -> {}",
                res.config.experiment.id,
                res.records.len(),
                res.wall_clock,
                out.display()
            );
        }
        Cmd::Report { dir } => {
            let s = report_dir(&dir)?;
            print!("{}", s.text);
        }
        Cmd::Oracle { config, n } => {
            let (cfg, _) = ExperimentConfig::load(&config)?;
            println!("n\tE 2^-|O_n|\tP(f_n = f_0)\tequal");
            for (k, a, b) in extamen_cli::run::oracle(&cfg, n)? {
                println!("{k}\t{a}\t{b}\t{}", a == b);
            }
        }
    }
    Ok(())
}
