//! α (and |a₁|) sweeps evaluated in parallel, emitted in grid order.

use std::time::{Duration, Instant};

use clap::ValueEnum;
use rayon::prelude::*;

use dvcv_core::demodulation::{
    initially_am_dual, initially_am_single, overall_success, single_rail_overall, Policy, DEFAULT_DEPTH,
};
use dvcv_core::protocol::{am_probability, direct_success_probability, pair_sum};

use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

/// Completeness columns must equal 1 to this tolerance.
pub const COMPLETENESS_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Protocol {
    Dual,
    Single,
    InitAmDual,
    InitAmSingle,
}

impl Protocol {
    fn name(self) -> &'static str {
        match self {
            Protocol::Dual => "dual",
            Protocol::Single => "single",
            Protocol::InitAmDual => "init_am_dual",
            Protocol::InitAmSingle => "init_am_single",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum A1Axis {
    Value(f64),
    /// `n` points spanning `[0, 1]`.
    Grid(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub protocol: Protocol,
    pub l: usize,
    pub k: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub steps: usize,
    pub a1: A1Axis,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        if !(self.alpha_min > 0.0 && self.alpha_min < self.alpha_max && self.alpha_max.is_finite()) {
            return usage(format!("need 0 < alpha-min < alpha-max, got {} and {}", self.alpha_min, self.alpha_max));
        }
        if self.steps < 2 {
            return usage(format!("steps must be at least 2, got {}", self.steps));
        }
        if (self.l as i64 - self.k as i64).rem_euclid(2) != 1 {
            return usage(format!("l − k must be odd, got l = {}, k = {}", self.l, self.k));
        }
        if matches!(self.protocol, Protocol::InitAmDual | Protocol::InitAmSingle) && (self.l, self.k) != (0, 1) {
            return usage("pre-modulated protocols are defined for (l, k) = (0, 1)".into());
        }
        match self.a1 {
            A1Axis::Value(x) if !(0.0..=1.0).contains(&x) => usage(format!("a1-abs must lie in [0, 1], got {x}")),
            A1Axis::Grid(n) if n < 2 => usage(format!("a1-grid needs at least 2 points, got {n}")),
            _ => Ok(()),
        }
    }

    pub fn alphas(&self) -> Vec<f64> {
        linspace(self.alpha_min, self.alpha_max, self.steps)
    }

    pub fn a1_values(&self) -> Vec<f64> {
        match self.a1 {
            A1Axis::Value(x) => vec![x],
            A1Axis::Grid(n) => linspace(0.0, 1.0, n),
        }
    }

    fn uses_a1(&self) -> bool {
        matches!(self.protocol, Protocol::InitAmDual | Protocol::InitAmSingle)
    }

    pub fn describe(&self) -> String {
        let a1 = match self.a1 {
            A1Axis::Value(x) => format!("a1_abs={x}"),
            A1Axis::Grid(n) => format!("a1_grid={n}"),
        };
        format!(
            "sweep protocol={} l={} k={} alpha_min={} alpha_max={} steps={} {a1}",
            self.protocol.name(),
            self.l,
            self.k,
            self.alpha_min,
            self.alpha_max,
            self.steps
        )
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub table: Table,
    pub wall_time: Duration,
}

pub fn header(protocol: Protocol) -> &'static [&'static str] {
    match protocol {
        Protocol::Dual => &[
            "alpha",
            "p_direct",
            "p_am",
            "p_pair_lk",
            "p_s",
            "p_overall_swap",
            "p_overall_best",
            "completeness",
        ],
        Protocol::Single => &[
            "alpha",
            "delta_swap",
            "delta_displacement",
            "delta_displacement_chain",
            "completeness",
        ],
        Protocol::InitAmDual => &["alpha", "a1_abs", "total_success", "total_closed_form", "completeness"],
        Protocol::InitAmSingle => &["alpha", "a1_abs", "total_success", "completeness"],
    }
}

fn row(spec: &SweepSpec, alpha: f64, a1: f64) -> Result<Vec<f64>> {
    let (l, k) = (spec.l, spec.k);
    let values = match spec.protocol {
        Protocol::Dual => {
            let direct = direct_success_probability(l, k, alpha);
            let am = am_probability(l, k, alpha);
            let pair = pair_sum(l, k, l, k, alpha);
            vec![
                alpha,
                direct,
                am,
                pair,
                direct + pair,
                overall_success(l, k, alpha, Policy::SwapOnly).total,
                overall_success(l, k, alpha, Policy::default()).total,
                direct + am,
            ]
        }
        Protocol::Single => {
            let swap = single_rail_overall(l, k, alpha, Policy::SwapOnly);
            let first = single_rail_overall(l, k, alpha, Policy::DisplacementOnly { depth: 1 });
            let chain = single_rail_overall(l, k, alpha, Policy::DisplacementOnly { depth: DEFAULT_DEPTH });
            let mass: f64 = swap.items.iter().map(|i| i.weight).sum();
            vec![alpha, swap.delta, first.delta, chain.delta, mass]
        }
        Protocol::InitAmDual => {
            let r = initially_am_dual(a1, alpha)?;
            let mass = r.records.iter().map(|x| x.probability).sum();
            vec![alpha, a1, r.total_success, r.total_closed_form.unwrap_or(f64::NAN), mass]
        }
        Protocol::InitAmSingle => {
            let r = initially_am_single(a1, alpha, DEFAULT_DEPTH)?;
            let mass = r.records.iter().map(|x| x.probability).sum();
            vec![alpha, a1, r.total_success, mass]
        }
    };
    let completeness = *values.last().expect("non-empty row");
    if (completeness - 1.0).abs() > COMPLETENESS_TOL {
        return Err(CliError::Numeric(format!(
            "probabilities at alpha = {alpha} sum to {completeness}, outside 1 ± {COMPLETENESS_TOL}"
        )));
    }
    Ok(values)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<RunReport> {
    spec.validate()?;
    let start = Instant::now();
    let a1s = if spec.uses_a1() { spec.a1_values() } else { vec![f64::NAN] };
    let grid: Vec<(f64, f64)> = spec
        .alphas()
        .into_iter()
        .flat_map(|a| a1s.iter().map(move |&x| (a, x)))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&(a, x)| row(spec, a, x))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(header(spec.protocol));
    table.comment(format!("dvcv {}", env!("CARGO_PKG_VERSION")));
    table.comment(spec.describe());
    table.comment("truncation n,m <= max(20, ceil(alpha^2 + 6 alpha + 12) + 2 max(l,k)); pre-modulated dual n+m <= 20");
    table.comment(format!("demodulation chain depth {DEFAULT_DEPTH}"));
    for r in rows {
        table.push(r.into_iter().map(Cell::from).collect());
    }
    Ok(RunReport {
        table,
        wall_time: start.elapsed(),
    })
}
