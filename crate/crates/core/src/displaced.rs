//! Displaced number states `|l, α⟩ = D(α)|l⟩` and their Fock coefficients.
//!
//! With `F(α) = exp(-α²/2)` the decomposition reads
//! `|l, α⟩ = F Σ_n c_ln(α) |n⟩`. The coherent row is
//! `c_0n(α) = αⁿ/√n!`, and higher rows follow from
//! `|l, α⟩ = (a† − α)|l−1, α⟩ / √l`, i.e.
//! `c_ln = (√n c_{l−1,n−1} − α c_{l−1,n}) / √l`.
//! Only real displacement amplitudes are supported.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{FockState, Mode, Parity};

/// `F(α) = exp(-α²/2)`.
pub fn overall_factor(alpha: f64) -> f64 {
    (-0.5 * alpha * alpha).exp()
}

/// Table of `c_ln(α)` for `0 ≤ l ≤ l_max`, `0 ≤ n ≤ n_max`.
#[derive(Clone, Debug)]
pub struct MatrixElementTable {
    alpha: f64,
    l_max: usize,
    n_max: usize,
    c: Vec<f64>,
}

impl MatrixElementTable {
    pub fn new(alpha: f64, l_max: usize, n_max: usize) -> Self {
        let width = n_max + 1;
        let mut c = vec![0.0; (l_max + 1) * width];
        c[0] = 1.0;
        for n in 1..=n_max {
            c[n] = c[n - 1] * alpha / (n as f64).sqrt();
        }
        for l in 1..=l_max {
            let inv_sqrt_l = 1.0 / (l as f64).sqrt();
            let (prev, cur) = c.split_at_mut(l * width);
            let prev = &prev[(l - 1) * width..];
            let cur = &mut cur[..width];
            for n in 0..=n_max {
                let raise = if n > 0 {
                    (n as f64).sqrt() * prev[n - 1]
                } else {
                    0.0
                };
                let shift = alpha * prev[n];
                let value = raise - shift;
                // total cancellation is a structural zero (e.g. c_1n at n = α²)
                cur[n] = if value.abs() <= 4.0 * f64::EPSILON * (raise.abs() + shift.abs()) {
                    0.0
                } else {
                    value * inv_sqrt_l
                };
            }
        }
        Self {
            alpha,
            l_max,
            n_max,
            c,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `F(α)` for the table's amplitude.
    pub fn overall_factor(&self) -> f64 {
        overall_factor(self.alpha)
    }

    /// `c_ln(α)`; panics if `(l, n)` lies outside the table.
    pub fn get(&self, l: usize, n: usize) -> f64 {
        assert!(
            l <= self.l_max && n <= self.n_max,
            "c_{l},{n} outside table ({}, {})",
            self.l_max,
            self.n_max
        );
        self.c[l * (self.n_max + 1) + n]
    }

    pub fn row(&self, l: usize) -> &[f64] {
        let w = self.n_max + 1;
        &self.c[l * w..(l + 1) * w]
    }
}

/// `c_ln(α)`, the Fock coefficient of `D(α)|l⟩` stripped of `F(α)`.
pub fn matrix_element(l: usize, n: usize, alpha: f64) -> f64 {
    MatrixElementTable::new(alpha, l, n).get(l, n)
}

/// Cutoff that keeps the tail of `|l, α⟩` below the default tolerance.
pub fn default_cutoff(l: usize, alpha: f64) -> usize {
    crate::fock::default_cutoff(alpha) + 2 * l
}

/// `|l, α⟩` in `mode`, truncated at `n_max`.
pub fn displaced_number_state(
    mode: Mode,
    l: usize,
    alpha: f64,
    n_max: usize,
    tail_tolerance: f64,
) -> Result<FockState> {
    if l > n_max {
        return Err(Error::OutOfRange { mode, n: l, n_max });
    }
    let table = MatrixElementTable::new(alpha, l, n_max);
    let f = table.overall_factor();
    let amps = table.row(l).iter().map(|&c| C64::new(f * c, 0.0)).collect();
    let state = FockState::single_mode(mode, amps, tail_tolerance)?;
    state.check_tail()?;
    Ok(state)
}

/// Coherent state `|α⟩ = |0, α⟩`.
pub fn coherent_state(mode: Mode, alpha: f64, n_max: usize, tail_tolerance: f64) -> Result<FockState> {
    displaced_number_state(mode, 0, alpha, n_max, tail_tolerance)
}

/// Normalisation of the even/odd cat states,
/// `N± = (2(1 ± exp(-2β²)))^{-1/2}`.
pub fn scs_normalization(parity: Parity, beta: f64) -> f64 {
    let x = -2.0 * beta * beta;
    let two_times = match parity {
        Parity::Even => 2.0 * (1.0 + x.exp()),
        // 1 - e^x without cancellation for small β
        Parity::Odd => -2.0 * x.exp_m1(),
    };
    1.0 / two_times.sqrt()
}

/// Even (`N₊(|−β⟩ + |β⟩)`) or odd (`N₋(|−β⟩ − |β⟩)`) superposition of
/// coherent states.
pub fn scs_state(
    mode: Mode,
    parity: Parity,
    beta: f64,
    n_max: usize,
    tail_tolerance: f64,
) -> Result<FockState> {
    if beta <= 0.0 || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "cat amplitude must be positive, got {beta}"
        )));
    }
    let table = MatrixElementTable::new(beta, 0, n_max);
    let norm = scs_normalization(parity, beta);
    let f = table.overall_factor();
    let amps = (0..=n_max)
        .map(|n| {
            // c_0n(-β) = (-1)^n c_0n(β)
            let sign_minus = if n % 2 == 0 { 1.0 } else { -1.0 };
            let c = table.get(0, n);
            let v = match parity {
                Parity::Even => sign_minus * c + c,
                Parity::Odd => sign_minus * c - c,
            };
            C64::new(norm * f * v, 0.0)
        })
        .collect();
    let state = FockState::single_mode(mode, amps, tail_tolerance)?;
    state.check_tail()?;
    Ok(state)
}

/// Checks `c_ln(−α) = (−1)^{n−l} c_ln(α)` to `1e-12` (relative to
/// `max(1, |c_ln|)`).
pub fn parity_sign_check(l: usize, n: usize, alpha: f64) -> bool {
    let plus = matrix_element(l, n, alpha);
    let minus = matrix_element(l, n, -alpha);
    let sign = if (n + l) % 2 == 0 { 1.0 } else { -1.0 };
    (minus - sign * plus).abs() <= 1e-12 * plus.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::DEFAULT_TAIL_TOLERANCE;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Polynomial forms for l ≤ 5, evaluated term by term.
    fn closed_form(l: usize, n: usize, a: f64) -> f64 {
        let nf = n as f64;
        let ff = |k: usize| (0..k).map(|i| nf - i as f64).product::<f64>();
        let a2 = a * a;
        let poly = match l {
            0 => 1.0,
            1 => nf - a2,
            2 => ff(2) - 2.0 * nf * a2 + a2.powi(2),
            3 => ff(3) - 3.0 * ff(2) * a2 + 3.0 * nf * a2.powi(2) - a2.powi(3),
            4 => {
                ff(4) - 4.0 * ff(3) * a2 + 6.0 * ff(2) * a2.powi(2) - 4.0 * nf * a2.powi(3)
                    + a2.powi(4)
            }
            5 => {
                ff(5) - 5.0 * ff(4) * a2 + 10.0 * ff(3) * a2.powi(2) - 10.0 * ff(2) * a2.powi(3)
                    + 5.0 * nf * a2.powi(4)
                    - a2.powi(5)
            }
            _ => unreachable!(),
        };
        a.powi(n as i32 - l as i32) * poly / (factorial(l).sqrt() * factorial(n).sqrt())
    }

    #[test]
    fn coherent_row() {
        assert_abs_diff_eq!(matrix_element(0, 2, 1.0), FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(matrix_element(0, 3, 0.5), 0.125 / 6f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn displaced_photon_at_inverse_sqrt_two() {
        assert_abs_diff_eq!(matrix_element(1, 1, FRAC_1_SQRT_2), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn c22_against_polynomial() {
        let a: f64 = 0.4072;
        let a2 = a * a;
        let expected = (2.0 - 4.0 * a2 + a2 * a2) / 2.0;
        assert_abs_diff_eq!(matrix_element(2, 2, a), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(expected, 0.6821231, epsilon = 1e-7);
    }

    #[test]
    fn zero_displacement_is_kronecker() {
        for l in 0..=6 {
            for n in 0..=6 {
                let expected = if l == n { 1.0 } else { 0.0 };
                assert_eq!(matrix_element(l, n, 0.0), expected, "c_{l}{n}(0)");
            }
        }
    }

    #[test]
    fn recurrence_matches_polynomials() {
        for &a in &[0.3, FRAC_1_SQRT_2, 1.0, 1.5, -0.8] {
            let table = MatrixElementTable::new(a, 5, 20);
            for l in 0..=5 {
                for n in 0..=20 {
                    let want = closed_form(l, n, a);
                    let got = table.get(l, n);
                    assert!(
                        (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                        "c_{l},{n}({a}) = {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn structural_zero_is_exact() {
        // c_1n(α) vanishes at n = α²
        assert_eq!(matrix_element(1, 1, 1.0), 0.0);
        assert_eq!(matrix_element(1, 4, 2.0), 0.0);
    }

    #[test]
    fn normalization_and_orthogonality() {
        for &a in &[0.2, 0.9, 1.4, 2.0] {
            let table = MatrixElementTable::new(a, 5, 80);
            let f2 = table.overall_factor().powi(2);
            for l in 0..=5 {
                for k in 0..=5 {
                    let s: f64 = table
                        .row(l)
                        .iter()
                        .zip(table.row(k))
                        .map(|(x, y)| x * y)
                        .sum();
                    let expected = if l == k { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(f2 * s, expected, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn vacuum_and_coherent_states() {
        let v = displaced_number_state(Mode(1), 0, 0.0, 12, DEFAULT_TAIL_TOLERANCE).unwrap();
        assert_eq!(v.amplitude(&[0]).re, 1.0);
        let c = coherent_state(Mode(1), 0.7, 20, DEFAULT_TAIL_TOLERANCE).unwrap();
        assert_abs_diff_eq!(c.amplitude(&[0]).re, (-0.245f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn displaced_states_orthonormal() {
        let a = 0.9;
        let n_max = default_cutoff(3, a);
        let states: Vec<_> = (0..=3)
            .map(|l| displaced_number_state(Mode(1), l, a, n_max, DEFAULT_TAIL_TOLERANCE).unwrap())
            .collect();
        for (l, x) in states.iter().enumerate() {
            for (k, y) in states.iter().enumerate() {
                let ov = x.inner(y).unwrap();
                let expected = if l == k { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(ov.re, expected, epsilon = 1e-10);
                assert_abs_diff_eq!(ov.im, 0.0);
            }
        }
    }

    #[test]
    fn tail_violation_is_reported() {
        let err = coherent_state(Mode(1), 3.0, 8, DEFAULT_TAIL_TOLERANCE).unwrap_err();
        assert!(matches!(err, Error::TailMass { .. }));
    }

    #[test]
    fn scs_parity_support() {
        let odd = scs_state(Mode(1), Parity::Odd, 1.0, 30, DEFAULT_TAIL_TOLERANCE).unwrap();
        assert_eq!(odd.amplitude(&[0]).re, 0.0);
        let even = scs_state(Mode(1), Parity::Even, 1.0, 30, DEFAULT_TAIL_TOLERANCE).unwrap();
        for n in (1..=30).step_by(2) {
            assert_eq!(even.amplitude(&[n]).norm(), 0.0);
            assert_eq!(odd.amplitude(&[n - 1]).norm(), 0.0);
        }
    }

    #[test]
    fn scs_even_normalised_against_direct_sum() {
        // direct sum of (|−β⟩ + |β⟩) coefficients: 2 e^{-β²/2} βⁿ/√n! on even n
        let beta: f64 = 1.0;
        let mut mass = 0.0;
        let mut term = 1.0;
        for n in 0..60 {
            if n > 0 {
                term *= beta / (n as f64).sqrt();
            }
            if n % 2 == 0 {
                mass += (2.0 * (-beta * beta / 2.0).exp() * term).powi(2);
            }
        }
        let n_plus = scs_normalization(Parity::Even, beta);
        assert_abs_diff_eq!(n_plus * n_plus * mass, 1.0, epsilon = 1e-14);
        let even = scs_state(Mode(1), Parity::Even, beta, 40, DEFAULT_TAIL_TOLERANCE).unwrap();
        assert_abs_diff_eq!(even.norm_sqr(), 1.0, epsilon = 1e-13);
        // n = 2 weight: (2 N₊ F β²/√2)²
        let f = overall_factor(beta);
        let p2 = (2.0 * n_plus * f * beta * beta / 2f64.sqrt()).powi(2);
        assert_abs_diff_eq!(even.amplitude(&[2]).norm_sqr(), p2, epsilon = 1e-15);
    }

    #[test]
    fn scs_small_beta_limits() {
        let even = scs_state(Mode(1), Parity::Even, 1e-6, 12, DEFAULT_TAIL_TOLERANCE).unwrap();
        assert_abs_diff_eq!(even.amplitude(&[0]).re, 1.0, epsilon = 1e-10);
        let odd = scs_state(Mode(1), Parity::Odd, 1e-6, 12, DEFAULT_TAIL_TOLERANCE).unwrap();
        assert_abs_diff_eq!(odd.amplitude(&[1]).norm(), 1.0, epsilon = 1e-10);
        assert!(scs_state(Mode(1), Parity::Odd, 0.0, 12, DEFAULT_TAIL_TOLERANCE).is_err());
    }

    #[test]
    fn sign_rule_examples() {
        assert!(parity_sign_check(0, 3, 0.8));
        assert_abs_diff_eq!(
            matrix_element(0, 3, -0.8),
            -matrix_element(0, 3, 0.8),
            epsilon = 1e-15
        );
        assert!(parity_sign_check(1, 1, 0.8));
        assert_abs_diff_eq!(
            matrix_element(1, 1, -0.8),
            matrix_element(1, 1, 0.8),
            epsilon = 1e-15
        );
        // l = 5, n = 2 flips sign; the oracle is the explicit polynomial
        assert!(parity_sign_check(5, 2, 1.3));
        assert_abs_diff_eq!(closed_form(5, 2, -1.3), -closed_form(5, 2, 1.3), epsilon = 1e-12);
        assert!(matrix_element(5, 2, 1.3) * matrix_element(5, 2, -1.3) < 0.0);
    }

    proptest! {
        #[test]
        fn sign_rule_holds(l in 0usize..8, n in 0usize..25, a in 0.01f64..2.0) {
            prop_assert!(parity_sign_check(l, n, a));
        }
    }
}
