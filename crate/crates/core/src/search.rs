//! One-dimensional maximisation and root finding on `f64 → f64` closures.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::brent::BrentRoot;
use argmin::solver::goldensectionsearch::GoldenSectionSearch;

use crate::error::{Error, Result};

struct Objective<F> {
    f: F,
    negate: bool,
}

impl<F: Fn(f64) -> f64> CostFunction for Objective<F> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, x: &f64) -> std::result::Result<f64, argmin::core::Error> {
        let v = (self.f)(*x);
        Ok(if self.negate { -v } else { v })
    }
}

fn search_err(e: argmin::core::Error) -> Error {
    Error::Search(e.to_string())
}

/// Golden-section maximum of a unimodal `f` on `[lo, hi]`; returns
/// `(argmax, max)`.
pub fn maximize_golden<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let solver = GoldenSectionSearch::new(lo, hi)
        .and_then(|s| s.with_tolerance(tol))
        .map_err(search_err)?;
    let res = Executor::new(Objective { f, negate: true }, solver)
        .configure(|s| s.param(0.5 * (lo + hi)).max_iters(500))
        .run()
        .map_err(search_err)?;
    let state = res.state();
    let x = *state
        .get_best_param()
        .ok_or_else(|| Error::Search("golden-section search returned no point".into()))?;
    Ok((x, -state.get_best_cost()))
}

/// Brent root of `f` bracketed by `[lo, hi]`.
pub fn find_root_brent<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let res = Executor::new(Objective { f, negate: false }, BrentRoot::new(lo, hi, tol))
        .configure(|s| s.max_iters(200))
        .run()
        .map_err(search_err)?;
    res.state()
        .get_best_param()
        .copied()
        .ok_or_else(|| Error::Search("root search returned no point".into()))
}
