use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sdwn_sim::harness::{self, Filter, GridAxis, RunOptions, ScenarioConfig, Stat};
use sdwn_sim::Error;

#[derive(Parser)]
#[command(name = "sdwn-sim", version, about = "Association and resource allocation for virtualized wireless networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Exec {
    /// Worker threads (default: SDWN_SIM_THREADS or all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Fill wall_time; output is then no longer byte-reproducible.
    #[arg(long)]
    timing: bool,
}

impl Exec {
    fn options(&self) -> RunOptions {
        RunOptions { threads: self.threads, timing: self.timing }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every replication of the configured policy.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        exec: Exec,
    },
    /// Run both policies over a parameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// NAME=START:END:STEP with NAME lambda_mean or rho1; repeatable.
        #[arg(long = "param", required = true)]
        params: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        exec: Exec,
    },
    /// Compare the solver with the brute-force oracle on a tiny instance.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid_step: Option<f64>,
    },
    /// Summarize a result CSV.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = ["cdf", "median", "jain"])]
        stat: String,
        #[arg(long, default_value = "all", value_parser = ["edge", "center", "all"])]
        filter: String,
    },
}

enum Failure {
    Lib(Error),
    Io(std::io::Error),
    OracleGap,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn write_records(path: &PathBuf, records: &[harness::ResultRecord]) -> Result<(), Failure> {
    let mut out = BufWriter::new(File::create(path)?);
    harness::write_csv(&mut out, records)?;
    out.flush()?;
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config, seed, out, exec } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            write_records(&out, &harness::run_scenario(&cfg, exec.options())?)
        }
        Command::Sweep { config, params, out, exec } => {
            let cfg = ScenarioConfig::load(&config)?;
            let axes = params.iter().map(|p| GridAxis::parse(p)).collect::<Result<Vec<_>, _>>()?;
            write_records(&out, &harness::sweep(&cfg, &axes, exec.options())?)
        }
        Command::Oracle { config, grid_step } => {
            let cfg = ScenarioConfig::load(&config)?;
            let report = harness::verify_oracle(&cfg, grid_step)?;
            println!("{report}");
            if report.passed {
                Ok(())
            } else {
                Err(Failure::OracleGap)
            }
        }
        Command::Report { input, stat, filter } => {
            let records = harness::read_csv(File::open(&input)?)?;
            let stat: Stat = stat.parse()?;
            let filter: Filter = filter.parse()?;
            print!("{}", harness::report(&records, stat, filter)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::OracleGap) => ExitCode::from(3),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::OracleSize(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
