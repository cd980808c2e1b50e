//! Curve families for the four result figures, with gnuplot scripts.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rayon::prelude::*;

use dvcv_core::demodulation::{
    initially_am_dual, initially_am_single, single_rail_overall, unit_factor_alpha, Policy, DEFAULT_DEPTH,
};
use dvcv_core::protocol::{direct_success_probability, pair_sum};

use crate::error::Result;
use crate::sweep::linspace;
use crate::table::{Cell, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }
}

/// α where the (1,2) factor `A₁₂` equals −1.
pub fn alpha_unit_12() -> Result<f64> {
    Ok(unit_factor_alpha(1, 2, 1, 2, 0.45, 0.55)?)
}

/// Uniform grid with the marked points merged in.
fn axis(lo: f64, hi: f64, n: usize, marks: &[f64]) -> Vec<f64> {
    let mut v = linspace(lo, hi, n);
    v.extend_from_slice(marks);
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}

fn pair_table(l: usize, k: usize, pairs: &[(usize, usize)], marks: &[f64]) -> Table {
    let names: Vec<String> = pairs.iter().map(|(n, m)| format!("p_{n}{m}")).collect();
    let mut header = vec!["alpha", "p_direct"];
    header.extend(names.iter().map(String::as_str));
    header.push("p_s");
    let mut t = Table::new(&header);
    let rows: Vec<Vec<Cell>> = axis(0.05, 1.5, 146, marks)
        .par_iter()
        .map(|&a| {
            let direct = direct_success_probability(l, k, a);
            let mut r = vec![a, direct];
            r.extend(pairs.iter().map(|&(n, m)| pair_sum(l, k, n, m, a)));
            r.push(direct + pair_sum(l, k, l, k, a));
            r.into_iter().map(Cell::from).collect()
        })
        .collect();
    t.rows = rows;
    t
}

pub fn figure_table(fig: Figure) -> Result<Table> {
    let mut t = match fig {
        Figure::Fig2 => pair_table(0, 1, &[(0, 1), (0, 2), (0, 3), (1, 2)], &[FRAC_1_SQRT_2, 0.628482]),
        Figure::Fig3 => pair_table(1, 2, &[(1, 2), (0, 1), (0, 2), (1, 3)], &[0.4072, alpha_unit_12()?]),
        Figure::Fig4 => {
            let mut t = Table::new(&["alpha", "delta_swap", "delta_displacement", "delta_displacement_chain"]);
            t.rows = axis(0.05, 1.5, 146, &[])
                .par_iter()
                .map(|&a| {
                    let d = |p| single_rail_overall(0, 1, a, p).delta;
                    vec![
                        a,
                        d(Policy::SwapOnly),
                        d(Policy::DisplacementOnly { depth: 1 }),
                        d(Policy::DisplacementOnly { depth: DEFAULT_DEPTH }),
                    ]
                    .into_iter()
                    .map(Cell::from)
                    .collect()
                })
                .collect();
            t
        }
        Figure::Fig5 => {
            let mut t = Table::new(&["alpha", "a1_abs", "dual_total", "dual_closed_form", "single_total"]);
            let grid: Vec<(f64, f64)> = [0.1, 0.2, 0.3]
                .into_iter()
                .flat_map(|a| linspace(0.0, 1.0, 51).into_iter().map(move |x| (a, x)))
                .collect();
            t.rows = grid
                .par_iter()
                .map(|&(a, x)| {
                    let d = initially_am_dual(x, a)?;
                    let s = initially_am_single(x, a, DEFAULT_DEPTH)?;
                    Ok([a, x, d.total_success, d.total_closed_form.unwrap_or(f64::NAN), s.total_success]
                        .into_iter()
                        .map(Cell::from)
                        .collect())
                })
                .collect::<Result<_>>()?;
            t
        }
    };
    t.comments = vec![
        format!("dvcv {}", env!("CARGO_PKG_VERSION")),
        format!("figure {}", fig.name()),
        format!("demodulation chain depth {DEFAULT_DEPTH}"),
    ];
    Ok(t)
}

pub fn gnuplot_script(fig: Figure, table: &Table) -> String {
    let name = fig.name();
    let (xcol, xlabel) = match fig {
        Figure::Fig5 => (2, "|a1|"),
        _ => (1, "alpha"),
    };
    let mut s = format!(
        "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n\
         set xlabel '{xlabel}'\nset ylabel 'probability'\nset terminal pngcairo size 900,600\n\
         set output '{name}.png'\n"
    );
    let cols: Vec<usize> = (xcol + 1..=table.header.len()).collect();
    let plots: Vec<String> = match fig {
        Figure::Fig5 => ["0.1", "0.2", "0.3"]
            .iter()
            .flat_map(|a| {
                [3usize, 5].into_iter().map(move |c| {
                    format!("'{name}.csv' using ($1=={a}?${xcol}:1/0):{c} with lines title 'alpha={a} col {c}'")
                })
            })
            .collect(),
        _ => cols
            .iter()
            .map(|c| format!("'{name}.csv' using {xcol}:{c} with lines"))
            .collect(),
    };
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}

/// Writes `NAME.csv` and `NAME.gp` into `dir`.
pub fn write_figure(fig: Figure, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let table = figure_table(fig)?;
    let csv = dir.join(format!("{}.csv", fig.name()));
    table.write(std::fs::File::create(&csv)?)?;
    let gp = dir.join(format!("{}.gp", fig.name()));
    std::fs::write(&gp, gnuplot_script(fig, &table))?;
    Ok(vec![csv, gp])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(t: &Table, col: &str, alpha: f64) -> f64 {
        let a = t.column("alpha").unwrap();
        let i = a.iter().position(|x| (x - alpha).abs() < 1e-9).unwrap();
        t.column(col).unwrap()[i]
    }

    #[test]
    fn fig2_marks() {
        let t = figure_table(Figure::Fig2).unwrap();
        assert!((at(&t, "p_s", FRAC_1_SQRT_2) - 0.441789).abs() < 5e-4);
        assert!((at(&t, "p_s", 0.628482) - 0.500673).abs() < 5e-4);
    }

    #[test]
    fn fig3_marks() {
        let t = figure_table(Figure::Fig3).unwrap();
        assert!((at(&t, "p_s", 0.4072) - 0.5317).abs() < 1e-3);
        assert!((at(&t, "p_s", alpha_unit_12().unwrap()) - 0.4014).abs() < 1e-3);
    }

    #[test]
    fn script_mentions_csv() {
        let t = figure_table(Figure::Fig4).unwrap();
        assert!(gnuplot_script(Figure::Fig4, &t).contains("'fig4.csv' using 1:4"));
    }
}
