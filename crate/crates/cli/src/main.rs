use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use qseal_cli::commands::{attack_file, counterexample, scheme_gen};
use qseal_cli::sweep::{run_sweep, write_csv, Metric, SweepSpec};
use qseal_cli::verify::{run_verify, TolProfile};
use qseal_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "qseal", version, about = "Information-disturbance tradeoff for quantum seals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate tradeoff curves over p in [1/N, p_max] as CSV.
    Sweep {
        #[arg(long)]
        n: usize,
        /// Repeat for several curves.
        #[arg(long = "pmax", required = true)]
        p_max: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Comma-separated; defaults to avg_fidelity,cond_fidelity_bound.
        #[arg(long, value_enum, value_delimiter = ',')]
        metrics: Vec<Metric>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite. Exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value = "default")]
        tol_profile: TolProfile,
        /// Run only the named checks (repeatable or comma-separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Also write the summary as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the symmetric and asymmetric conditional-fidelity channels.
    Counterexample {
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve, build and score the interpolating attack on a scheme file.
    Attack {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        p: f64,
        /// JSON report destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the canonical scheme document for N and p_max.
    SchemeGen {
        #[arg(long)]
        n: usize,
        #[arg(long = "pmax")]
        p_max: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// `Ok(false)` when verification ran and found a failure.
fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Sweep { n, p_max, points, metrics, out } => {
            let rows = run_sweep(&SweepSpec::new(n, p_max, points, metrics)?)?;
            match out {
                Some(path) => write_csv(&rows, BufWriter::new(File::create(path)?))?,
                None => write_csv(&rows, io::stdout().lock())?,
            }
            Ok(true)
        }
        Command::Verify { tol_profile, only, out } => {
            let summary = run_verify(tol_profile, &only)?;
            print!("{}", summary.render());
            if let Some(path) = out {
                write_json(&summary, &path)?;
            }
            Ok(summary.passed)
        }
        Command::Counterexample { out } => {
            let report = counterexample()?;
            print!("{}", report.render());
            if let Some(path) = out {
                write_json(&report, &path)?;
            }
            Ok(true)
        }
        Command::Attack { scheme, p, out } => {
            let report = attack_file(&scheme, p)?;
            match out {
                Some(path) => write_json(&report, &path)?,
                None => {
                    serde_json::to_writer_pretty(io::stdout().lock(), &report)?;
                    println!();
                }
            }
            Ok(true)
        }
        Command::SchemeGen { n, p_max, out } => {
            scheme_gen(n, p_max, &out)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Model(qseal::Error::NotConverged { report, .. }) = &e {
                eprintln!(
                    "  pairwise residual {:.3e}, min operator eigenvalue {:.3e}",
                    report.max_pairwise_residual(),
                    report.min_operator_eigenvalue()
                );
            }
            e.exit_code()
        }
    }
}
