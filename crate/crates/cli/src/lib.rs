//! Command-line front end: sweeps, figure data, verification reports,
//! channel negativity and finite-splitter oracle runs.

pub mod config;
pub mod error;
pub mod figure;
pub mod sweep;
pub mod table;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dvcv_core::fock::{default_cutoff, DEFAULT_TAIL_TOLERANCE};
use dvcv_core::optics::{channel_state, negativity, HybridChannel};
use dvcv_core::protocol::{brute_force_pipeline, UnknownQubit};

pub use error::{CliError, Result};
use figure::Figure;
use sweep::{A1Axis, Protocol, SweepSpec};
use table::{Cell, Table};
use verify::Suite;

/// Default output directory for figure bundles.
pub const OUT_DIR_ENV: &str = "DVCV_OUT_DIR";

pub const SUBCOMMANDS: &[&str] = &["sweep", "figure", "verify", "negativity", "oracle"];

#[derive(Debug, Parser)]
#[command(
    name = "dvcv",
    version,
    about = "Hybrid DV-CV teleportation simulator",
    args_override_self = true
)]
pub struct Cli {
    /// Photon-number cutoff for channel states and oracle outcomes.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    /// Tail mass allowed outside truncated channel states.
    #[arg(long, global = true, default_value_t = DEFAULT_TAIL_TOLERANCE)]
    pub tail_tol: f64,
    /// key = value file of flags; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate probabilities over an α grid.
    Sweep(SweepArgs),
    /// Write the curve family of a figure as CSV plus a gnuplot script.
    Figure {
        name: Figure,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a check suite; exit 1 on any failure.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Channel negativity, closed form and from the partial transpose.
    Negativity {
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
    },
    /// Finite-reflectance simulation against the analytic outcomes.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub protocol: Protocol,
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_max: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, allow_negative_numbers = true, conflicts_with = "a1_grid")]
    pub a1_abs: Option<f64>,
    #[arg(long)]
    pub a1_grid: Option<usize>,
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Encoding {
    Dual,
    Single,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0.7f64.sqrt())]
    pub a0: f64,
    #[arg(long, default_value_t = 0.3f64.sqrt())]
    pub a1: f64,
    #[arg(long, value_enum, default_value_t = Encoding::Dual)]
    pub encoding: Encoding,
}

impl SweepArgs {
    pub fn spec(&self) -> SweepSpec {
        SweepSpec {
            protocol: self.protocol,
            l: self.l,
            k: self.k,
            alpha_min: self.alpha_min,
            alpha_max: self.alpha_max,
            steps: self.steps,
            a1: match (self.a1_abs, self.a1_grid) {
                (_, Some(n)) => A1Axis::Grid(n),
                (x, None) => A1Axis::Value(x.unwrap_or(0.0)),
            },
        }
    }
}

/// Parses process arguments, expanding `--config`.
pub fn parse_args(args: Vec<String>) -> std::result::Result<Cli, clap::Error> {
    match config::expand_args(args.clone(), SUBCOMMANDS) {
        Ok(a) => Cli::try_parse_from(a),
        Err(e) => Err(clap::Error::raw(clap::error::ErrorKind::ValueValidation, format!("{e}\n"))),
    }
}

pub fn negativity_table(beta: f64, n_max: Option<usize>, tail_tol: f64) -> Result<Table> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(CliError::Usage(format!("beta must be positive, got {beta}")));
    }
    let ch = HybridChannel::new(beta)?;
    let n = n_max.unwrap_or_else(|| default_cutoff(beta) + 10);
    channel_state(ch, n, tail_tol)?;
    let r = negativity(ch, n)?;
    let mut t = Table::new(&["beta", "closed_form", "numeric", "difference"]);
    t.comment(format!("dvcv {}", env!("CARGO_PKG_VERSION")));
    t.comment(format!("negativity n_max={n} tail_tol={tail_tol:e}"));
    t.push(vec![beta.into(), r.closed_form.into(), r.numeric.into(), (r.closed_form - r.numeric).into()]);
    Ok(t)
}

pub fn oracle_table(a: &OracleArgs, n_max: Option<usize>) -> Result<Table> {
    if !(a.alpha > 0.0) {
        return Err(CliError::Usage(format!("alpha must be positive, got {}", a.alpha)));
    }
    if !(a.r > 0.0 && a.r <= 0.3) {
        return Err(CliError::Usage(format!("r must lie in (0, 0.3], got {}", a.r)));
    }
    let qubit = match a.encoding {
        Encoding::Dual => UnknownQubit::dual_rail(a.a0, a.a1, a.l, a.k),
        Encoding::Single => UnknownQubit::single_rail(a.a0, a.a1, a.l, a.k),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let t_amp = (1.0 - a.r * a.r).sqrt();
    let beta = a.alpha * t_amp / a.r;
    let n_cut = n_max.unwrap_or(2);
    let recs = brute_force_pipeline(&qubit, beta, beta, a.r, n_cut)?;
    let mut t = Table::new(&["parity", "n", "m", "probability", "analytic_probability", "fidelity"]);
    t.comment(format!("dvcv {}", env!("CARGO_PKG_VERSION")));
    t.comment(format!(
        "oracle alpha={} r={} beta={beta} l={} k={} a0={} a1={} encoding={:?} n_max={n_cut}",
        a.alpha, a.r, a.l, a.k, a.a0, a.a1, a.encoding
    ));
    for x in recs {
        let o = x.outcome;
        t.push(vec![
            Cell::Int(matches!(o.parity, dvcv_core::Parity::Odd) as i64),
            o.n.into(),
            Cell::Int(o.m.map_or(-1, |m| m as i64)),
            x.probability.into(),
            x.analytic_probability.into(),
            x.fidelity.unwrap_or(f64::NAN).into(),
        ]);
    }
    Ok(t)
}

fn emit(table: &Table, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => table.write(std::fs::File::create(p)?),
        None => table.write(std::io::stdout().lock()),
    }
}

/// Runs a parsed command, writing results to standard output or files.
pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Sweep(args) => {
            let report = sweep::run_sweep(&args.spec())?;
            emit(&report.table, args.out.as_ref())?;
            eprintln!("{} rows in {:.2?}", report.table.rows.len(), report.wall_time);
        }
        Command::Figure { name, out } => {
            let dir = out
                .clone()
                .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            for p in figure::write_figure(*name, &dir)? {
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Verify { suite } => {
            let report = verify::run(*suite)?;
            write!(std::io::stdout().lock(), "{report}")?;
            report.into_result()?;
        }
        Command::Negativity { beta } => emit(&negativity_table(*beta, cli.nmax, cli.tail_tol)?, None)?,
        Command::Oracle(args) => emit(&oracle_table(args, cli.nmax)?, None)?,
    }
    Ok(())
}
