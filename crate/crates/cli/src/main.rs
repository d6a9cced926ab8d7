//! `ramanujan`: verification reports for the Ramanujan and Chazy systems,
//! the Gauss–Manin charts they come from, and their numerical flows.
//!
//! Every subcommand writes a JSON report to stdout and a short summary to
//! stderr. Exit codes: 0 when every check passes, 1 when a check fails,
//! 2 for usage and precondition errors.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AllArgs, Chart, FlowArgs, Precondition};
use report::Report;

/// Directory receiving a copy of each report as `<subcommand>.json`.
const REPORT_DIR_ENV: &str = "RAMANUJAN_REPORT_DIR";

#[derive(Parser, Debug)]
#[command(name = "ramanujan", version, about = "Exact and numerical checks of the Ramanujan vector fields")]
struct Cli {
    /// Emit the report as a single compact JSON line.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress the human summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ramanujan and Chazy residuals of the Eisenstein series.
    VerifyQseries {
        #[arg(long, default_value_t = 200)]
        order: usize,
    },
    /// Randomized symplectic and parabolic-group properties for genus 1..=g.
    SymplecticSelftest {
        #[arg(long, default_value_t = 3)]
        g: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rederive a connection chart and diff it against the printed one.
    RederiveConnection {
        #[arg(long, value_enum)]
        chart: Chart,
    },
    /// Solve for the Ramanujan field from the connection of a chart.
    SolveField {
        #[arg(long, value_enum)]
        chart: Chart,
    },
    /// Rewrite-rule checks of the higher fields in genus g.
    FormalCheck {
        #[arg(long)]
        g: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Integrate the flow from q0 to q1 and compare with the q-series.
    Flow {
        #[arg(long, value_enum)]
        chart: Chart,
        #[arg(long, allow_hyphen_values = true)]
        q0: f64,
        #[arg(long, allow_hyphen_values = true)]
        q1: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Truncation order of the series oracle.
        #[arg(long, default_value_t = 64)]
        order: usize,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        /// Write every accepted step to a CSV file.
        #[arg(long)]
        dump_csv: Option<PathBuf>,
    },
    /// Run every check; --g bounds the formal checks.
    All {
        #[arg(long, default_value_t = 200)]
        order: usize,
        #[arg(long, default_value_t = 4)]
        g: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cmd: &Command) -> Result<Report, Precondition> {
    match *cmd {
        Command::VerifyQseries { order } => commands::verify_qseries(order),
        Command::SymplecticSelftest { g, trials, seed } => commands::symplectic_selftest(g, trials, seed),
        Command::RederiveConnection { chart } => commands::rederive_connection(chart),
        Command::SolveField { chart } => commands::solve_field(chart),
        Command::FormalCheck { g, trials, seed } => commands::formal(g, trials, seed),
        Command::Flow { chart, q0, q1, tol, order, max_steps, ref dump_csv } => {
            commands::flow(&FlowArgs { chart, q0, q1, tol, order, max_steps }, dump_csv.as_deref())
        }
        Command::All { order, g, tol, trials, seed } => commands::all(&AllArgs { order, g, tol, trials, seed }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rep = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = rep.validate() {
        eprintln!("error: invalid report: {e}");
        return ExitCode::from(1);
    }
    let text = rep.to_json(cli.json);
    // a closed pipe downstream is not an error of ours
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if let Some(dir) = std::env::var_os(REPORT_DIR_ENV) {
        let path = PathBuf::from(dir).join(format!("{}.json", rep.subcommand));
        if let Err(e) = std::fs::write(&path, format!("{text}\n")) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if !cli.quiet {
        eprint!("{}", rep.human());
    }
    if rep.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
