//! Command-line front end: one subcommand per pipeline.

mod commands;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::{AnalysisReport, Output, Provenance, Status, Table, Verdict};

use crate::clw::{CLW_DEFAULT_A, CLW_DEFAULT_K};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "conestab", version, about = "Stability checks for Ricci-flat cones")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Write the pipeline's table (profile, sweep or outputs) as CSV.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Page metric on CP²#CP̄²: κ three ways, volume, sup Δs² and the verdicts.
    Page {
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Chen-LeBrun-Weber metric on CP²#2CP̄².
    Clw {
        #[arg(long, default_value_t = CLW_DEFAULT_A)]
        a: f64,
        /// External bound on sup Δs².
        #[arg(long = "clw-k-bound", default_value_t = CLW_DEFAULT_K)]
        k_bound: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Radial test on an n-dimensional cone with coefficient λ (default 2(n−2)).
    ConeThreshold {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        n: u32,
        #[arg(long)]
        lambda: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cone over a product of Einstein manifolds of dimensions n1 and n2.
    Product {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n1: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n2: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cone over a Kähler-Einstein manifold with the given h^{1,1}.
    Ke {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        n: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        h11: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Coefficient feasibility for the CP² stability estimate.
    Cp2Check {
        #[arg(long, default_value_t = 4.2, conflicts_with = "search")]
        alpha: f64,
        #[arg(long, default_value_t = 4.0, conflicts_with = "search")]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// Scan α over LO..HI (β over --beta-range, ε fixed at --eps).
        #[arg(long, value_name = "LO..HI", value_parser = parse_range)]
        search: Option<Range>,
        #[arg(long, value_name = "LO..HI", value_parser = parse_range, default_value = "3.5..4.2")]
        beta_range: Range,
        /// Grid spacing on the scanned axes.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Moments and boundary integrals of a moment polygon.
    PolytopeIntegrals {
        #[arg(long, value_enum)]
        shape: Shape,
        #[arg(long)]
        a: Option<f64>,
        /// Facet file (`nu1 nu2 offset` per line) for `--shape custom`.
        #[arg(long, value_name = "PATH", required_if_eq("shape", "custom"))]
        facets: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Page,
    Clw,
    Square,
    Custom,
}

/// Closed interval given as `LO..HI`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

fn parse_range(s: &str) -> Result<Range, String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got {s}"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(format!("need finite LO <= HI, got {s}"));
    }
    Ok(Range { lo, hi })
}

impl Command {
    fn output_args(&self) -> &OutputArgs {
        match self {
            Command::Page { out }
            | Command::Clw { out, .. }
            | Command::ConeThreshold { out, .. }
            | Command::Product { out, .. }
            | Command::Ke { out, .. }
            | Command::Cp2Check { out, .. }
            | Command::PolytopeIntegrals { out, .. } => out,
        }
    }
}

/// A finished (or partially finished) pipeline.
pub struct Run {
    pub report: AnalysisReport,
    pub table: Option<Table>,
    pub error: Option<String>,
}

pub fn execute(command: &Command) -> Run {
    let start = Instant::now();
    let mut run = commands::dispatch(command);
    run.report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    run
}

/// Parses `args`, runs the pipeline and writes the report to `out`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let run = execute(&cli.command);
    let args = cli.command.output_args();

    let printed = if args.json {
        writeln!(out, "{}", run.report.to_json())
    } else {
        write!(out, "{}", run.report.to_table())
    };
    if printed.is_err() {
        return EXIT_FAILURE;
    }
    if let Some(path) = &args.csv {
        let table = run.table.clone().unwrap_or_else(|| Table::from_outputs(&run.report));
        let written = std::fs::File::create(path)
            .map_err(|e| e.to_string())
            .and_then(|f| table.write_csv(f).map_err(|e| e.to_string()));
        if let Err(e) = written {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_FAILURE;
        }
    }
    if let Some(e) = &run.error {
        let _ = writeln!(err, "error: {e}");
        return EXIT_FAILURE;
    }
    if run.report.any_failed() {
        EXIT_FAILURE
    } else {
        EXIT_OK
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}
