//! Batch front end: `srmc <command> --config <file> --out <dir>`.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 for numerical failure
//! (including solver non-convergence and failed checks).

pub mod commands;
pub mod config;
pub mod error;
pub mod grid_csv;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::Loaded;
use crate::error::CliError;
use crate::output::Report;

#[derive(Debug, Parser)]
#[command(name = "srmc", version, about = "Prescribed mean curvature surfaces in contact sub-Riemannian manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Also write `check.csv` and `check.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Area of the intrinsic graph.
    Area(RunArgs),
    /// First variation against a lattice of bump test functions.
    Variation(RunArgs),
    /// Families of characteristic curves.
    Foliate(RunArgs),
    /// A ∇-geodesic of prescribed curvature.
    Geodesic(RunArgs),
    /// Mean curvature along characteristics.
    Curvature(RunArgs),
    /// Critical intrinsic graph on a grid.
    MinimizeIntrinsic(RunArgs),
    /// Critical t-graph on a grid.
    MinimizeTgraph(RunArgs),
    /// Invariant suite with a pass/fail table.
    Check(CheckArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Area(_) => "area",
            Command::Variation(_) => "variation",
            Command::Foliate(_) => "foliate",
            Command::Geodesic(_) => "geodesic",
            Command::Curvature(_) => "curvature",
            Command::MinimizeIntrinsic(_) => "minimize-intrinsic",
            Command::MinimizeTgraph(_) => "minimize-tgraph",
            Command::Check(_) => "check",
        }
    }
}

/// Caps the global rayon pool at `SRMC_THREADS` when set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SRMC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("SRMC_THREADS must be a positive integer, got `{v}`")))?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn prepare(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Validation(format!("cannot create output directory {}: {e}", dir.display())))
}

fn print_table(lines: &[commands::CheckLine]) {
    println!("{:<28} {:>6} {:>12} {:>12}", "check", "result", "value", "tolerance");
    for c in lines {
        println!(
            "{:<28} {:>6} {:>12.3e} {:>12.3e}",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.value,
            c.tolerance
        );
    }
}

/// Runs one command and returns its exit code. Errors go to stderr; the
/// JSON report is written whenever the config was readable.
pub fn execute(cmd: Command) -> i32 {
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    let name = cmd.name();
    let (config, out) = match &cmd {
        Command::Check(a) => (a.config.clone(), a.out.clone()),
        Command::Area(a)
        | Command::Variation(a)
        | Command::Foliate(a)
        | Command::Geodesic(a)
        | Command::Curvature(a)
        | Command::MinimizeIntrinsic(a)
        | Command::MinimizeTgraph(a) => (a.config.clone(), Some(a.out.clone())),
    };
    let loaded = match config::load(&config) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Some(dir) = &out {
        if let Err(e) = prepare(dir) {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    }
    let mut report = Report::new(name);
    let result = dispatch(&cmd, &loaded, &mut report, out.as_deref());
    if let Some(dir) = &out {
        if let Err(e) = report.write(dir, &loaded, result.as_ref().err()) {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    }
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: &Command, l: &Loaded, rep: &mut Report, out: Option<&Path>) -> Result<(), CliError> {
    let dir = || out.expect("run commands always have an output directory");
    match cmd {
        Command::Area(_) => commands::area(l, rep, dir()),
        Command::Variation(_) => commands::variation(l, rep, dir()),
        Command::Foliate(_) => commands::foliate(l, rep, dir()),
        Command::Geodesic(_) => commands::geodesic(l, rep, dir()),
        Command::Curvature(_) => commands::curvature(l, rep, dir()),
        Command::MinimizeIntrinsic(_) => commands::minimize_intrinsic_cmd(l, rep, dir()),
        Command::MinimizeTgraph(_) => commands::minimize_tgraph_cmd(l, rep, dir()),
        Command::Check(_) => {
            let lines = commands::check(l, rep, out)?;
            print_table(&lines);
            match lines.iter().filter(|c| !c.pass).map(|c| c.name).collect::<Vec<_>>() {
                failed if failed.is_empty() => Ok(()),
                failed => Err(CliError::Numerical(format!("failed checks: {}", failed.join(", ")))),
            }
        }
    }
}

/// Parses `args` (program name first) and runs the command. Usage errors
/// exit with 2.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
