use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use decoherence_cli::{per_k_path, run_drive, run_evolve, run_sweep, run_verify, write_file, CliError, RunConfig, SUMMARY_HEADER};

#[derive(Parser)]
#[command(name = "decoh", version, about = "Drive synthesis and coherence evolution for a multiphoton two-state model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress reports on standard error.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the algebra, interaction-picture and Markoff-oracle checks.
    Verify(Common),
    /// Synthesize the drive intensity profile.
    Drive(Common),
    /// Integrate the coherence equations.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Drive profile written by `decoh drive`.
        #[arg(long)]
        drive_csv: Option<PathBuf>,
    },
    /// Summarize drive profiles over the sweep axes.
    Sweep(Common),
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    match &common.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify(common) => {
            let cfg = load(&common)?;
            let (report, passed) = run_verify(&cfg)?;
            if !common.quiet {
                emit(common.out.as_ref(), &report)?;
            } else if let Some(path) = &common.out {
                write_file(path, &report)?;
            }
            if passed {
                Ok(())
            } else {
                Err(CliError::Verification)
            }
        }
        Command::Drive(common) => {
            let cfg = load(&common)?;
            let out = common.out.clone().or_else(|| cfg.out.clone());
            let files = run_drive(&cfg)?;
            let multi = files.len() > 1;
            for (k, csv, summary) in &files {
                match (&out, multi) {
                    (Some(base), true) => write_file(&per_k_path(base, *k), csv)?,
                    (Some(path), false) => write_file(path, csv)?,
                    (None, true) => write_file(&per_k_path(&PathBuf::from("drive.csv"), *k), csv)?,
                    (None, false) => emit(None, csv)?,
                }
                if !common.quiet {
                    eprintln!("{SUMMARY_HEADER}\n{}", summary.csv_row());
                }
            }
            Ok(())
        }
        Command::Evolve { common, drive_csv } => {
            let cfg = load(&common)?;
            let out = common.out.clone().or_else(|| cfg.out.clone());
            let csv = run_evolve(&cfg, drive_csv.as_deref())?;
            emit(out.as_ref(), &csv)
        }
        Command::Sweep(common) => {
            let cfg = load(&common)?;
            let out = common.out.clone().or_else(|| cfg.out.clone());
            let csv = run_sweep(&cfg)?;
            emit(out.as_ref(), &csv)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("decoh: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
