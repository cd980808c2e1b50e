//! Linear-optics unitaries on truncated Fock spaces and the hybrid channel.
//!
//! Beam splitters act on the creation operators of the (first-listed,
//! second-listed) modes as `a† → t a† + r b†`, `b† → −r a† + t b†`, so that
//! `|10⟩ → t|10⟩ + r|01⟩` and `|01⟩ → −r|10⟩ + t|01⟩`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::displaced::coherent_state;
use crate::error::{Error, Result};
use crate::fock::{default_cutoff, FockState, Mode, TruncationConfig};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitterParams {
    t: f64,
    r: f64,
}

impl BeamSplitterParams {
    pub fn new(t: f64, r: f64) -> Result<Self> {
        if !(t > 0.0 && r >= 0.0) || (t * t + r * r - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "beam splitter needs t > 0, r ≥ 0, t² + r² = 1 (got t={t}, r={r})"
            )));
        }
        Ok(Self { t, r })
    }

    /// Splitter with reflectance amplitude `r` and `t = √(1 − r²)`.
    pub fn from_reflectance(r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "reflectance amplitude must lie in [0, 1), got {r}"
            )));
        }
        Self::new((1.0 - r * r).sqrt(), r)
    }

    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { t: h, r: h }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// `U^(N)` blocks of the beam splitter, column-major:
/// `blocks[N][j (N+1) + p] = ⟨p, N−p|U|j, N−j⟩`.
type Blocks = Arc<Vec<Arc<Vec<f64>>>>;

const CACHE_CAPACITY: usize = 16;

fn block_cache() -> &'static RwLock<HashMap<(u64, u64), Blocks>> {
    static CACHE: OnceLock<RwLock<HashMap<(u64, u64), Blocks>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn block(n: usize, t: f64, r: f64) -> Vec<f64> {
    // U = exp(θK) with K = b†a − a†b. On |p, n−p⟩, K = S (iT) S† with
    // S = diag(iᵖ) and T real symmetric tridiagonal.
    let m = n + 1;
    if n == 0 {
        return vec![1.0];
    }
    let theta = r.atan2(t);
    let mut tri = DMatrix::<f64>::zeros(m, m);
    for p in 1..m {
        let c = ((p * (n - p + 1)) as f64).sqrt();
        tri[(p - 1, p)] = c;
        tri[(p, p - 1)] = c;
    }
    let eig = SymmetricEigen::new(tri);
    let phases: Vec<C64> = eig
        .eigenvalues
        .iter()
        .map(|&l| C64::from_polar(1.0, theta * l))
        .collect();
    let v = &eig.eigenvectors;
    let mut out = vec![0.0; m * m];
    for j in 0..m {
        for p in 0..m {
            let z: C64 = (0..m).map(|k| phases[k] * (v[(p, k)] * v[(j, k)])).sum();
            // Re(i^{p−j} z)
            out[j * m + p] = match (p + 4 * m - j) % 4 {
                0 => z.re,
                1 => -z.im,
                2 => -z.re,
                _ => z.im,
            };
        }
    }
    out
}

fn blocks(t: f64, r: f64, max_n: usize) -> Blocks {
    let key = (t.to_bits(), r.to_bits());
    let cache = block_cache();
    if let Some(b) = cache.read().expect("block cache poisoned").get(&key) {
        if b.len() > max_n {
            return b.clone();
        }
    }
    let mut guard = cache.write().expect("block cache poisoned");
    let existing = guard.get(&key).cloned();
    if let Some(b) = &existing {
        if b.len() > max_n {
            return b.clone();
        }
    }
    let mut v: Vec<Arc<Vec<f64>>> = existing.map(|b| (*b).clone()).unwrap_or_default();
    while v.len() <= max_n {
        let n = v.len();
        v.push(Arc::new(block(n, t, r)));
    }
    if guard.len() >= CACHE_CAPACITY && !guard.contains_key(&key) {
        guard.clear();
    }
    let arc = Arc::new(v);
    guard.insert(key, arc.clone());
    arc
}

/// Dense `U^(N)` block for total photon number `n`, column-major.
pub fn bs_block(params: BeamSplitterParams, n: usize) -> Vec<f64> {
    blocks(params.t, params.r, n)[n].as_ref().clone()
}

/// Beam splitter on `(mode_a, mode_b)`; both cutoffs are kept, and the
/// amplitude pushed past them must stay within the state's tail tolerance.
pub fn apply_bs(
    state: &FockState,
    mode_a: Mode,
    mode_b: Mode,
    params: BeamSplitterParams,
) -> Result<FockState> {
    bs_transform(state, mode_a, mode_b, params.t, params.r)
}

/// Inverse beam splitter, `BS(t, −r)`.
pub fn apply_bs_adjoint(
    state: &FockState,
    mode_a: Mode,
    mode_b: Mode,
    params: BeamSplitterParams,
) -> Result<FockState> {
    bs_transform(state, mode_a, mode_b, params.t, -params.r)
}

fn bs_transform(state: &FockState, a: Mode, b: Mode, t: f64, r: f64) -> Result<FockState> {
    if a == b {
        return Err(Error::ModeCollision(a));
    }
    let ka = state.mode_index(a)?;
    let kb = state.mode_index(b)?;
    let dims = state.dims();
    let (na, nb) = (dims[ka] - 1, dims[kb] - 1);
    let strides = state.strides();
    let (sa, sb) = (strides[ka], strides[kb]);
    let table = blocks(t, r, na + nb);
    let amps = state.amplitudes();
    let mut out = vec![ZERO; amps.len()];
    let mut lost = 0.0;
    let mut input: Vec<(usize, C64)> = Vec::new();
    for base in 0..amps.len() {
        if (base / sa) % dims[ka] != 0 || (base / sb) % dims[kb] != 0 {
            continue;
        }
        for n in 0..=na + nb {
            let lo = n.saturating_sub(nb);
            let hi = n.min(na);
            input.clear();
            input.extend(
                (lo..=hi)
                    .map(|j| (j, amps[base + j * sa + (n - j) * sb]))
                    .filter(|(_, x)| *x != ZERO),
            );
            if input.is_empty() {
                continue;
            }
            let block = &table[n];
            let m = n + 1;
            for p in 0..=n {
                let acc: C64 = input.iter().map(|&(j, x)| x * block[j * m + p]).sum();
                if (lo..=hi).contains(&p) {
                    out[base + p * sa + (n - p) * sb] = acc;
                } else {
                    lost += acc.norm_sqr();
                }
            }
        }
    }
    let tolerance = state.truncation().tail_tolerance();
    let total = state.norm_sqr();
    if lost > tolerance * total {
        return Err(Error::TruncationOverflow {
            operation: "beam splitter",
            lost: lost / total,
            tolerance,
        });
    }
    FockState::new(state.modes().to_vec(), state.truncation().clone(), out)
}

/// `⟨i|D(γ)|j⟩` for `i, j ≤ n_max` as columns, from the matrix exponential of
/// `γ(a† − a)` on a padded space.
pub fn displacement_matrix(gamma: f64, n_max: usize) -> Vec<Vec<C64>> {
    let pad = n_max + 1 + (gamma * gamma + 10.0 * gamma.abs() + 20.0).ceil() as usize;
    let mut g = DMatrix::<f64>::zeros(pad, pad);
    for n in 1..pad {
        let v = gamma * (n as f64).sqrt();
        g[(n, n - 1)] = v;
        g[(n - 1, n)] = -v;
    }
    let e = g.exp();
    (0..=n_max)
        .map(|j| (0..=n_max).map(|i| C64::new(e[(i, j)], 0.0)).collect())
        .collect()
}

/// `D(γ)` on `mode`; amplitude displaced past the cutoff must stay within
/// the state's tail tolerance.
pub fn displacement_unitary(state: &FockState, mode: Mode, gamma: f64) -> Result<FockState> {
    let n_max = state.n_max(mode)?;
    if gamma == 0.0 {
        return Ok(state.clone());
    }
    let out = state.apply_single_mode(mode, &displacement_matrix(gamma, n_max))?;
    let before = state.norm_sqr();
    let lost = (before - out.norm_sqr()).max(0.0);
    let tolerance = state.truncation().tail_tolerance();
    if lost > tolerance * before {
        return Err(Error::TruncationOverflow {
            operation: "displacement",
            lost: lost / before,
            tolerance,
        });
    }
    Ok(out)
}

/// Mixes a single-mode `input` with `|sign·β⟩` on `BS(√(1−r²), r)` (ancilla
/// listed first) and compares the input mode, ancilla traced out, with
/// `D(sign·α)|input⟩` where `α = βr/t`. Returns the fidelity and the exact
/// joint output `[ancilla, input]`.
pub fn htbs_residual(
    input: &FockState,
    beta: f64,
    r: f64,
    sign: f64,
) -> Result<(f64, FockState)> {
    if input.modes().len() != 1 {
        return Err(Error::InvalidParameter("input must be a single-mode state".into()));
    }
    if !(r > 0.0 && r < 0.3) {
        return Err(Error::InvalidParameter(format!(
            "reflectance amplitude must lie in (0, 0.3), got {r}"
        )));
    }
    if sign.abs() != 1.0 {
        return Err(Error::InvalidParameter(format!("sign must be ±1, got {sign}")));
    }
    let mode = input.modes()[0];
    let ancilla = if mode == Mode(0) { Mode(1) } else { Mode(0) };
    let params = BeamSplitterParams::from_reflectance(r)?;
    let alpha = beta * r / params.t();
    let tol = input.truncation().tail_tolerance();

    let n_in = input.n_max(mode)? + default_cutoff(alpha + beta * r);
    let input = input.padded(mode, n_in)?.normalized()?;
    let n_anc = default_cutoff(beta) + n_in;
    let anc = coherent_state(ancilla, sign * beta, n_anc, tol)?;
    let joint = apply_bs(&FockState::tensor(&anc, &input)?, ancilla, mode, params)?;

    let target = displacement_unitary(&input, mode, sign * alpha)?;
    let phi = target.amplitudes();
    let d = n_in + 1;
    // ⟨φ|Tr_anc|Ψ⟩⟨Ψ||φ⟩ = Σ_k |Σ_m φ_m* Ψ[k, m]|²
    let f: f64 = joint
        .amplitudes()
        .chunks(d)
        .map(|row| row.iter().zip(phi).map(|(x, p)| p.conj() * x).sum::<C64>().norm_sqr())
        .sum();
    Ok((f / target.norm_sqr(), joint))
}

/// Hybrid entangled resource `(|−β⟩|01⟩ + |β⟩|10⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HybridChannel {
    beta: f64,
}

impl HybridChannel {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "channel amplitude must be positive, got {beta}"
            )));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Channel state on modes 1 (coherent) and 2, 3 (dual rail), mode 1 cut at
/// `n_max`.
pub fn channel_state(channel: HybridChannel, n_max: usize, tail_tolerance: f64) -> Result<FockState> {
    let beta = channel.beta;
    let minus = coherent_state(Mode(1), -beta, n_max, tail_tolerance)?;
    let plus = coherent_state(Mode(1), beta, n_max, tail_tolerance)?;
    let dual = TruncationConfig::new(vec![1, 1], tail_tolerance)?;
    let r01 = FockState::from_occupation(vec![Mode(2), Mode(3)], dual.clone(), &[0, 1])?;
    let r10 = FockState::from_occupation(vec![Mode(2), Mode(3)], dual, &[1, 0])?;
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let raw = FockState::tensor(&minus, &r01)?
        .scaled(h)
        .add(&FockState::tensor(&plus, &r10)?.scaled(h))?;
    raw.normalized()
}

/// `√(1 − exp(−4β²))`.
pub fn negativity_closed_form(beta: f64) -> f64 {
    (-(-4.0 * beta * beta).exp_m1()).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegativityReport {
    pub closed_form: f64,
    /// `‖ρ^{T_B}‖₁ − 1` with the transpose over the dual-rail qubit.
    pub numeric: f64,
}

/// Entanglement of the channel, closed form and from the partially
/// transposed density matrix.
pub fn negativity(channel: HybridChannel, n_max: usize) -> Result<NegativityReport> {
    let state = channel_state(channel, n_max, crate::fock::DEFAULT_TAIL_TOLERANCE)?;
    let d = n_max + 1;
    // ψ[m][i], i = 0 ↔ |01⟩, i = 1 ↔ |10⟩
    let psi: Vec<[C64; 2]> = (0..d)
        .map(|m| [state.amplitude(&[m, 0, 1]), state.amplitude(&[m, 1, 0])])
        .collect();
    let dim = 2 * d;
    let mut pt = DMatrix::<C64>::zeros(dim, dim);
    for m in 0..d {
        for mp in 0..d {
            for i in 0..2 {
                for ip in 0..2 {
                    // ρ^{T_B}[(m,i),(m',i')] = ρ[(m,i'),(m',i)]
                    pt[(2 * m + i, 2 * mp + ip)] = psi[m][ip] * psi[mp][i].conj();
                }
            }
        }
    }
    let trace_norm: f64 = pt.singular_values().iter().sum();
    Ok(NegativityReport {
        closed_form: negativity_closed_form(channel.beta),
        numeric: trace_norm - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::displaced::{displaced_number_state, MatrixElementTable};
    use crate::fock::DEFAULT_TAIL_TOLERANCE;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn two_mode(occ: &[usize], n: usize) -> FockState {
        let trunc = TruncationConfig::new(vec![n, n], DEFAULT_TAIL_TOLERANCE).unwrap();
        FockState::from_occupation(vec![Mode(1), Mode(2)], trunc, occ).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(BeamSplitterParams::new(0.6, 0.8).is_ok());
        assert!(BeamSplitterParams::new(0.6, 0.7).is_err());
        assert!(BeamSplitterParams::new(0.0, 1.0).is_err());
        assert!(BeamSplitterParams::new(1.0, -0.0).is_ok());
        assert!(BeamSplitterParams::from_reflectance(1.0).is_err());
    }

    #[test]
    fn identity_splitter() {
        let s = FockState::tensor(
            &coherent_state(Mode(1), 0.4, 15, DEFAULT_TAIL_TOLERANCE).unwrap(),
            &FockState::number(Mode(2), 2, 15).unwrap(),
        )
        .unwrap();
        let out = apply_bs(&s, Mode(1), Mode(2), BeamSplitterParams::new(1.0, 0.0).unwrap()).unwrap();
        for (x, y) in out.amplitudes().iter().zip(s.amplitudes()) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn single_photon_convention() {
        let p = BeamSplitterParams::new(0.6, 0.8).unwrap();
        let out = apply_bs(&two_mode(&[1, 0], 3), Mode(1), Mode(2), p).unwrap();
        assert_abs_diff_eq!(out.amplitude(&[1, 0]).re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitude(&[0, 1]).re, 0.8, epsilon = 1e-15);
        let out = apply_bs(&two_mode(&[0, 1], 3), Mode(1), Mode(2), p).unwrap();
        assert_abs_diff_eq!(out.amplitude(&[1, 0]).re, -0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitude(&[0, 1]).re, 0.6, epsilon = 1e-15);
    }

    #[test]
    fn balanced_single_photon() {
        let out = apply_bs(&two_mode(&[1, 0], 2), Mode(1), Mode(2), BeamSplitterParams::balanced()).unwrap();
        assert_abs_diff_eq!(out.amplitude(&[1, 0]).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitude(&[0, 1]).re, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn hong_ou_mandel() {
        let out = apply_bs(&two_mode(&[1, 1], 2), Mode(1), Mode(2), BeamSplitterParams::balanced()).unwrap();
        assert_abs_diff_eq!(out.amplitude(&[1, 1]).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitude(&[2, 0]).norm_sqr(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(out.amplitude(&[0, 2]).norm_sqr(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn blocks_are_orthogonal() {
        let p = BeamSplitterParams::from_reflectance(0.37).unwrap();
        for n in [1usize, 5, 40, 120, 200] {
            let b = bs_block(p, n);
            let m = n + 1;
            for i in 0..m {
                for j in 0..m {
                    let dot: f64 = (0..m).map(|k| b[i * m + k] * b[j * m + k]).sum();
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - e).abs() < 1e-12, "block {n}: ({i},{j}) = {dot}");
                }
            }
        }
    }

    #[test]
    fn coherent_pair_transformation() {
        let (x, y) = (0.6, 0.3);
        let p = BeamSplitterParams::from_reflectance(0.4).unwrap();
        let (t, r) = (p.t(), p.r());
        let n = 25;
        let input = FockState::tensor(
            &coherent_state(Mode(1), x, n, DEFAULT_TAIL_TOLERANCE).unwrap(),
            &coherent_state(Mode(2), y, n, DEFAULT_TAIL_TOLERANCE).unwrap(),
        )
        .unwrap();
        let out = apply_bs(&input, Mode(1), Mode(2), p).unwrap();
        // closed form: |tx − ry⟩|rx + ty⟩, coefficients e^{-|z|²/2} zⁿ/√n!
        let coh = |z: f64, k: usize| {
            let mut c = (-0.5 * z * z).exp();
            for i in 1..=k {
                c *= z / (i as f64).sqrt();
            }
            c
        };
        let (u, v) = (t * x - r * y, r * x + t * y);
        for (occ, amp) in out.iter() {
            assert_abs_diff_eq!(amp.re, coh(u, occ[0]) * coh(v, occ[1]), epsilon = 1e-13);
            assert_eq!(amp.im, 0.0);
        }
    }

    #[test]
    fn overflow_is_reported() {
        let p = BeamSplitterParams::balanced();
        let s = two_mode(&[3, 0], 3);
        let trunc = TruncationConfig::new(vec![3, 1], DEFAULT_TAIL_TOLERANCE).unwrap();
        let narrow = FockState::from_occupation(vec![Mode(1), Mode(2)], trunc, &[3, 0]).unwrap();
        assert!(apply_bs(&s, Mode(1), Mode(2), p).is_ok());
        let err = apply_bs(&narrow, Mode(1), Mode(2), p).unwrap_err();
        assert!(matches!(err, Error::TruncationOverflow { .. }));
        assert!(matches!(
            apply_bs(&s, Mode(1), Mode(1), p).unwrap_err(),
            Error::ModeCollision(_)
        ));
    }

    #[test]
    fn displacement_of_vacuum() {
        let v = FockState::number(Mode(1), 0, 20).unwrap();
        let out = displacement_unitary(&v, Mode(1), 0.5).unwrap();
        assert_abs_diff_eq!(out.amplitude(&[1]).re, (-0.125f64).exp() * 0.5, epsilon = 1e-12);
        let id = displacement_unitary(&v, Mode(1), 0.0).unwrap();
        assert_eq!(id.amplitudes(), v.amplitudes());
    }

    #[test]
    fn displacement_columns_match_recurrence() {
        for &g in &[0.3, FRAC_1_SQRT_2, 1.2, -0.9, 2.0] {
            let n_max = 30;
            let cols = displacement_matrix(g, n_max);
            let table = MatrixElementTable::new(g, 8, n_max);
            let f = table.overall_factor();
            for l in 0..=8 {
                for n in 0..=n_max {
                    assert!(
                        (cols[l][n].re - f * table.get(l, n)).abs() < 1e-9,
                        "γ={g} l={l} n={n}"
                    );
                }
            }
            let s = displaced_number_state(Mode(1), 3, g, n_max, 1e-6).unwrap();
            for n in 0..=n_max {
                assert!((s.amplitude(&[n]).re - cols[3][n].re).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn displacement_inverse() {
        let amps = vec![
            C64::new(0.5, 0.1),
            C64::new(-0.3, 0.2),
            C64::new(0.4, 0.0),
            C64::new(0.1, -0.6),
        ];
        let mut padded = amps.clone();
        padded.resize(30, ZERO);
        let s = FockState::single_mode(Mode(1), padded, DEFAULT_TAIL_TOLERANCE)
            .unwrap()
            .normalized()
            .unwrap();
        let d = displacement_unitary(&s, Mode(1), 0.8).unwrap();
        let back = displacement_unitary(&d, Mode(1), -0.8).unwrap();
        for (x, y) in back.amplitudes().iter().zip(s.amplitudes()) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn htbs_vacuum_regression() {
        let v = FockState::number(Mode(5), 0, 4).unwrap();
        let r: f64 = 0.1;
        let t = (1.0 - r * r).sqrt();
        let (f, joint) = htbs_residual(&v, 0.5 * t / r, r, 1.0).unwrap();
        assert!(f > 0.99);
        // exact: input mode holds |rβ⟩ = |αt⟩, target |α⟩
        let expected = (-(0.5 - 0.5 * t).powi(2)).exp();
        assert_abs_diff_eq!(f, expected, epsilon = 1e-9);
        assert_eq!(joint.modes(), &[Mode(0), Mode(5)]);
    }

    #[test]
    fn htbs_converges_with_single_photon() {
        let one = FockState::number(Mode(1), 1, 4).unwrap();
        let alpha = 0.5;
        let mut infid = Vec::new();
        for &r in &[0.2, 0.1, 0.05] {
            let t = (1.0f64 - r * r).sqrt();
            let (f, _) = htbs_residual(&one, alpha * t / r, r, 1.0).unwrap();
            infid.push(1.0 - f);
        }
        assert!(infid[0] > infid[1] && infid[1] > infid[2]);
        let slope = (infid[0] / infid[2]).ln() / 4f64.ln();
        assert!((1.5..=2.5).contains(&slope), "slope {slope}");
    }

    #[test]
    fn htbs_negative_sign_on_single_photon() {
        let one = FockState::number(Mode(1), 1, 4).unwrap();
        let (f, _) = htbs_residual(&one, 0.5 * (1.0f64 - 0.0025).sqrt() / 0.05, 0.05, -1.0).unwrap();
        assert!(f > 0.99);
        assert!(htbs_residual(&one, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn channel_structure() {
        let ch = HybridChannel::new(1.0).unwrap();
        assert!(HybridChannel::new(0.0).is_err());
        let s = channel_state(ch, 19, DEFAULT_TAIL_TOLERANCE).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-14);
        for (occ, a) in s.iter() {
            if a.norm() > 0.0 {
                assert_eq!(occ[1] + occ[2], 1);
            }
        }
        let branch = s.project_number(Mode(2), 0).unwrap().into_state().unwrap();
        let branch = branch.project_number(Mode(3), 1).unwrap().into_state().unwrap();
        let minus = coherent_state(Mode(1), -1.0, 19, DEFAULT_TAIL_TOLERANCE).unwrap();
        assert_abs_diff_eq!(branch.inner(&minus).unwrap().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn channel_mode_one_purity() {
        // ρ₁ = (|−β⟩⟨−β| + |β⟩⟨β|)/2, Tr ρ₁² = (1 + e^{−4β²})/2
        let s = channel_state(HybridChannel::new(1.0).unwrap(), 19, DEFAULT_TAIL_TOLERANCE).unwrap();
        let d = 20;
        let mut rho = vec![vec![C64::new(0.0, 0.0); d]; d];
        for (occ, a) in s.iter() {
            for (occ2, b) in s.iter() {
                if occ[1..] == occ2[1..] {
                    rho[occ[0]][occ2[0]] += a * b.conj();
                }
            }
        }
        let purity: f64 = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| (rho[i][j] * rho[j][i]).re)
            .sum();
        assert_abs_diff_eq!(purity, (1.0 + (-4.0f64).exp()) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn negativity_values() {
        assert_abs_diff_eq!(negativity_closed_form(1.0), (1.0 - (-4.0f64).exp()).sqrt());
        assert_abs_diff_eq!(negativity_closed_form(1.0), 0.990799, epsilon = 1e-6);
        assert!(negativity_closed_form(1e-5) < 1e-4);
        for &b in &[0.5, 1.0, 1.5, 2.0] {
            let rep = negativity(HybridChannel::new(b).unwrap(), default_cutoff(b)).unwrap();
            assert!((rep.closed_form - rep.numeric).abs() < 1e-6, "β={b}: {rep:?}");
        }
        assert!(negativity_closed_form(2.0) >= 0.9999);
    }

    proptest! {
        #[test]
        fn bs_is_unitary(
            re in proptest::collection::vec(-1.0f64..1.0, 16),
            im in proptest::collection::vec(-1.0f64..1.0, 16),
            r in 0.0f64..0.99,
        ) {
            // support on n_a, n_b ≤ 3 within cutoffs of 7 keeps every output on the grid
            let trunc = TruncationConfig::new(vec![7, 7], DEFAULT_TAIL_TOLERANCE).unwrap();
            let mut amps = vec![ZERO; 64];
            for i in 0..4 {
                for j in 0..4 {
                    amps[i * 8 + j] = C64::new(re[i * 4 + j], im[i * 4 + j]);
                }
            }
            let s = FockState::new(vec![Mode(1), Mode(2)], trunc, amps).unwrap();
            let p = BeamSplitterParams::from_reflectance(r).unwrap();
            let out = apply_bs(&s, Mode(1), Mode(2), p).unwrap();
            prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() < 1e-10 * s.norm_sqr().max(1.0));
            let back = apply_bs_adjoint(&out, Mode(1), Mode(2), p).unwrap();
            for (x, y) in back.amplitudes().iter().zip(s.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-10);
            }
            let d = displacement_unitary(&s, Mode(2), 0.0).unwrap();
            prop_assert!((d.norm_sqr() - s.norm_sqr()).abs() < 1e-10);
        }

        #[test]
        fn displacement_preserves_norm(
            re in proptest::collection::vec(-1.0f64..1.0, 4),
            g in -1.0f64..1.0,
        ) {
            let mut amps: Vec<C64> = re.iter().map(|&x| C64::new(x, 0.0)).collect();
            amps.resize(40, ZERO);
            let s = FockState::single_mode(Mode(1), amps, DEFAULT_TAIL_TOLERANCE).unwrap();
            prop_assume!(s.norm_sqr() > 1e-3);
            let out = displacement_unitary(&s, Mode(1), g).unwrap();
            prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() < 1e-10);
        }
    }
}
