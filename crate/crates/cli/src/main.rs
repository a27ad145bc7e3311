// SPDX-License-Identifier: Apache-2.0

//! `twincav`: run presets or configuration files, sweep a parameter, or
//! self-check the simulator.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical
//! divergence, 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twincav::runner::{self, RunResult};
use twincav::testkit::{run_verification, RngSeed};
use twincav::{load_config, preset, Error, Result, Scenario};

#[derive(Parser)]
#[command(
    name = "twincav",
    version,
    about = "Double-cavity optomechanical entanglement simulator"
)]
struct Cli {
    /// Format of the report printed to stdout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Configuration file (flat key = value).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Shipped preset: fig2-sym, fig2-asym, fig2-left-only or fig3.
    #[arg(long)]
    scenario: Option<String>,
}

impl Source {
    fn load(&self) -> Result<Scenario> {
        match (&self.config, &self.scenario) {
            (Some(path), _) => load_config(path),
            (_, Some(name)) => preset(name),
            _ => Err(Error::Usage("give --config or --scenario".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario; writes samples, summary and plot data.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory [default: out/<scenario name>].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario over a uniform grid of one numeric key.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Key to vary, e.g. left.finesse or both.finesse.
        #[arg(long)]
        key: String,
        #[arg(long, allow_negative_numbers = true)]
        start: f64,
        #[arg(long, allow_negative_numbers = true)]
        stop: f64,
        #[arg(long)]
        steps: usize,
        /// Output directory [default: out/<scenario name>-sweep].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the simulator against its reference implementations.
    Verify {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn print_run(r: &RunResult, format: Format) -> Result<()> {
    match format {
        Format::Json => print!("{}", runner::summary_json(r)?),
        Format::Csv => print!("{}", runner::report_csv(r)?),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { source, out } => {
            let s = source.load()?;
            let out = out.unwrap_or_else(|| PathBuf::from("out").join(&s.name));
            let r = runner::run_scenario(&s, &out)?;
            runner::emit_plot_data(&r, &out)?;
            print_run(&r, cli.format)?;
            Ok(true)
        }
        Command::Sweep {
            source,
            key,
            start,
            stop,
            steps,
            out,
        } => {
            let s = source.load()?;
            let out = out.unwrap_or_else(|| PathBuf::from("out").join(format!("{}-sweep", s.name)));
            let res = runner::sweep(&s, &key, start, stop, steps, Some(&out))?;
            match cli.format {
                Format::Csv => print!("{}", runner::sweep_table_csv(&res)?),
                Format::Json => {
                    let rows: Vec<_> = res.runs.iter().map(runner::summary).collect();
                    let text = serde_json_string(&rows)?;
                    println!("{text}");
                }
            }
            Ok(true)
        }
        Command::Verify { seed } => {
            let checks = run_verification(RngSeed(seed));
            let ok = checks.iter().all(|c| c.passed);
            match cli.format {
                Format::Json => println!("{}", serde_json_string(&checks)?),
                Format::Csv => {
                    println!("check,passed,detail");
                    for c in &checks {
                        println!("\"{}\",{},\"{}\"", c.name, c.passed, c.detail);
                    }
                }
            }
            for c in &checks {
                eprintln!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            Ok(ok)
        }
    }
}

fn serde_json_string<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
