//! Dense states on a truncated multi-mode Fock space.
//!
//! Amplitudes are stored row-major over the multi-index `(n_1, …, n_M)` with
//! the last listed mode varying fastest. Every mode carries its own photon
//! number cutoff; the state is rejected whenever a named physical state puts
//! more than the tail tolerance of probability on a mode's top level.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Probability mass allowed on the top Fock level of any mode.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

const NORM_EPS: f64 = 1e-12;

/// Label of an optical mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode(pub u8);

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Default cutoff for a mode holding a coherent or displaced component of
/// amplitude `x`: `ceil(|x|² + 6|x| + 12)`.
pub fn default_cutoff(x: f64) -> usize {
    let x = x.abs();
    (x * x + 6.0 * x + 12.0).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn matches(self, n: usize) -> bool {
        Parity::of(n) == self
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncationConfig {
    n_max_per_mode: Vec<usize>,
    tail_tolerance: f64,
}

impl TruncationConfig {
    pub fn new(n_max_per_mode: Vec<usize>, tail_tolerance: f64) -> Result<Self> {
        if let Some(pos) = n_max_per_mode.iter().position(|&n| n < 1) {
            return Err(Error::InvalidTruncation(format!(
                "cutoff of mode position {pos} must be at least 1"
            )));
        }
        if !(0.0..1.0).contains(&tail_tolerance) {
            return Err(Error::InvalidTruncation(format!(
                "tail tolerance {tail_tolerance} outside [0, 1)"
            )));
        }
        Ok(Self {
            n_max_per_mode,
            tail_tolerance,
        })
    }

    pub fn n_max_per_mode(&self) -> &[usize] {
        &self.n_max_per_mode
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    fn grid_size(&self) -> usize {
        self.n_max_per_mode.iter().map(|n| n + 1).product()
    }
}

/// Outcome of a projective measurement.
#[derive(Clone, Debug)]
pub enum Projection {
    /// Conditional state (renormalised) and the probability of the outcome.
    Outcome { state: FockState, probability: f64 },
    /// The outcome has exactly zero probability.
    Empty,
}

impl Projection {
    pub fn probability(&self) -> f64 {
        match self {
            Projection::Outcome { probability, .. } => *probability,
            Projection::Empty => 0.0,
        }
    }

    pub fn state(&self) -> Option<&FockState> {
        match self {
            Projection::Outcome { state, .. } => Some(state),
            Projection::Empty => None,
        }
    }

    pub fn into_state(self) -> Option<FockState> {
        match self {
            Projection::Outcome { state, .. } => Some(state),
            Projection::Empty => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FockState {
    modes: Vec<Mode>,
    trunc: TruncationConfig,
    amps: Vec<C64>,
}

impl FockState {
    pub fn new(modes: Vec<Mode>, trunc: TruncationConfig, amps: Vec<C64>) -> Result<Self> {
        if modes.len() != trunc.n_max_per_mode.len() {
            return Err(Error::InvalidTruncation(format!(
                "{} modes but {} cutoffs",
                modes.len(),
                trunc.n_max_per_mode.len()
            )));
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::ModeCollision(*m));
            }
        }
        let expected = trunc.grid_size();
        if amps.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: amps.len(),
            });
        }
        Ok(Self { modes, trunc, amps })
    }

    /// Single-mode state from its Fock amplitudes `amps[n] = ⟨n|ψ⟩`.
    pub fn single_mode(mode: Mode, amps: Vec<C64>, tail_tolerance: f64) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidTruncation("need at least two Fock levels".into()));
        }
        let trunc = TruncationConfig::new(vec![amps.len() - 1], tail_tolerance)?;
        Self::new(vec![mode], trunc, amps)
    }

    /// Fock state `|n⟩` in a single mode with cutoff `n_max`.
    pub fn number(mode: Mode, n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::OutOfRange { mode, n, n_max });
        }
        let mut amps = vec![C64::new(0.0, 0.0); n_max + 1];
        amps[n] = C64::new(1.0, 0.0);
        Self::single_mode(mode, amps, DEFAULT_TAIL_TOLERANCE)
    }

    /// Product basis state `|n_1 … n_M⟩` over the given cutoffs.
    pub fn from_occupation(
        modes: Vec<Mode>,
        trunc: TruncationConfig,
        occupation: &[usize],
    ) -> Result<Self> {
        if occupation.len() != modes.len() {
            return Err(Error::ShapeMismatch {
                expected: modes.len(),
                got: occupation.len(),
            });
        }
        for ((&m, &n), &n_max) in modes.iter().zip(occupation).zip(&trunc.n_max_per_mode) {
            if n > n_max {
                return Err(Error::OutOfRange { mode: m, n, n_max });
            }
        }
        let amps = vec![C64::new(0.0, 0.0); trunc.grid_size()];
        let mut state = Self::new(modes, trunc, amps)?;
        let idx = state.flat_index(occupation);
        state.amps[idx] = C64::new(1.0, 0.0);
        Ok(state)
    }

    /// The zero-mode state with unit amplitude.
    pub fn scalar(value: C64) -> Self {
        Self {
            modes: Vec::new(),
            trunc: TruncationConfig {
                n_max_per_mode: Vec::new(),
                tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            },
            amps: vec![value],
        }
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn truncation(&self) -> &TruncationConfig {
        &self.trunc
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dims(&self) -> Vec<usize> {
        self.trunc.n_max_per_mode.iter().map(|n| n + 1).collect()
    }

    pub fn n_max(&self, mode: Mode) -> Result<usize> {
        Ok(self.trunc.n_max_per_mode[self.mode_index(mode)?])
    }

    pub fn mode_index(&self, mode: Mode) -> Result<usize> {
        self.modes
            .iter()
            .position(|&m| m == mode)
            .ok_or(Error::MissingMode(mode))
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        let dims = self.dims();
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        strides
    }

    fn flat_index(&self, occupation: &[usize]) -> usize {
        self.strides()
            .iter()
            .zip(occupation)
            .map(|(s, n)| s * n)
            .sum()
    }

    /// Amplitude of the product basis state `|occupation⟩`, zero if it lies
    /// outside the grid.
    pub fn amplitude(&self, occupation: &[usize]) -> C64 {
        if occupation.len() != self.modes.len()
            || occupation
                .iter()
                .zip(&self.trunc.n_max_per_mode)
                .any(|(n, n_max)| n > n_max)
        {
            return C64::new(0.0, 0.0);
        }
        self.amps[self.flat_index(occupation)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n2.sqrt();
        Ok(self.scaled(C64::new(s, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            modes: self.modes.clone(),
            trunc: self.trunc.clone(),
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// `self + other` for states on identical grids.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            modes: self.modes.clone(),
            trunc: self.trunc.clone(),
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    /// `⟨self|other⟩` for states on identical grids.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_same_grid(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.modes != other.modes || self.trunc.n_max_per_mode != other.trunc.n_max_per_mode {
            return Err(Error::InvalidParameter(
                "states live on different mode grids".into(),
            ));
        }
        Ok(())
    }

    /// Photon-number distribution of one mode (unnormalised marginal).
    pub fn number_distribution(&self, mode: Mode) -> Result<Vec<f64>> {
        let k = self.mode_index(mode)?;
        let dims = self.dims();
        let stride = self.strides()[k];
        let mut dist = vec![0.0; dims[k]];
        for (i, a) in self.amps.iter().enumerate() {
            dist[(i / stride) % dims[k]] += a.norm_sqr();
        }
        Ok(dist)
    }

    /// Probability mass on the top Fock level of `mode`.
    pub fn tail_mass(&self, mode: Mode) -> Result<f64> {
        let dist = self.number_distribution(mode)?;
        Ok(*dist.last().expect("modes have at least two levels"))
    }

    /// Rejects the state if any mode's top level holds more than the tail
    /// tolerance (relative to the total norm).
    pub fn check_tail(&self) -> Result<()> {
        let total = self.norm_sqr();
        for &mode in &self.modes {
            let mass = self.tail_mass(mode)? / total;
            if mass > self.trunc.tail_tolerance {
                return Err(Error::TailMass {
                    mode,
                    mass,
                    tolerance: self.trunc.tail_tolerance,
                });
            }
        }
        Ok(())
    }

    pub fn with_tail_tolerance(mut self, tail_tolerance: f64) -> Result<Self> {
        self.trunc = TruncationConfig::new(self.trunc.n_max_per_mode.clone(), tail_tolerance)?;
        Ok(self)
    }

    /// Embeds the state into a grid where `mode` has cutoff `n_max`; the new
    /// cutoff must not be smaller than the current one.
    pub fn padded(&self, mode: Mode, n_max: usize) -> Result<Self> {
        let k = self.mode_index(mode)?;
        let old = self.trunc.n_max_per_mode[k];
        if n_max < old {
            return Err(Error::InvalidTruncation(format!(
                "cannot shrink mode {mode} from {old} to {n_max}"
            )));
        }
        let mut cutoffs = self.trunc.n_max_per_mode.clone();
        cutoffs[k] = n_max;
        let trunc = TruncationConfig::new(cutoffs, self.trunc.tail_tolerance)?;
        let mut out = Self::new(
            self.modes.clone(),
            trunc.clone(),
            vec![C64::new(0.0, 0.0); trunc.grid_size()],
        )?;
        let old_dims = self.dims();
        let mut occ = vec![0usize; old_dims.len()];
        for a in &self.amps {
            let idx = out.flat_index(&occ);
            out.amps[idx] = *a;
            increment(&mut occ, &old_dims);
        }
        Ok(out)
    }

    /// Tensor product; the mode order of `a` precedes that of `b`.
    pub fn tensor(a: &FockState, b: &FockState) -> Result<FockState> {
        if let Some(&m) = a.modes.iter().find(|m| b.modes.contains(m)) {
            return Err(Error::ModeCollision(m));
        }
        let mut modes = a.modes.clone();
        modes.extend_from_slice(&b.modes);
        let mut cutoffs = a.trunc.n_max_per_mode.clone();
        cutoffs.extend_from_slice(&b.trunc.n_max_per_mode);
        let tol = a.trunc.tail_tolerance.max(b.trunc.tail_tolerance);
        let trunc = TruncationConfig::new(cutoffs, tol)?;
        let amps = a
            .amps
            .iter()
            .flat_map(|x| b.amps.iter().map(move |y| x * y))
            .collect();
        FockState::new(modes, trunc, amps)
    }

    /// Conditions on `n` photons in `mode` and removes that mode.
    pub fn project_number(&self, mode: Mode, n: usize) -> Result<Projection> {
        let (state, probability) = self.project_number_raw(mode, n)?;
        if probability <= 0.0 {
            return Ok(Projection::Empty);
        }
        let s = 1.0 / probability.sqrt();
        Ok(Projection::Outcome {
            state: state.scaled(C64::new(s, 0.0)),
            probability,
        })
    }

    /// Unnormalised slice `⟨n|_mode |ψ⟩` together with its squared norm.
    pub fn project_number_raw(&self, mode: Mode, n: usize) -> Result<(FockState, f64)> {
        let k = self.mode_index(mode)?;
        let n_max = self.trunc.n_max_per_mode[k];
        if n > n_max {
            return Err(Error::OutOfRange { mode, n, n_max });
        }
        let dims = self.dims();
        let stride = self.strides()[k];
        let amps: Vec<C64> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i / stride) % dims[k] == n)
            .map(|(_, a)| *a)
            .collect();
        let mut modes = self.modes.clone();
        modes.remove(k);
        let mut cutoffs = self.trunc.n_max_per_mode.clone();
        cutoffs.remove(k);
        let trunc = TruncationConfig::new(cutoffs, self.trunc.tail_tolerance)?;
        let probability = amps.iter().map(|a| a.norm_sqr()).sum();
        Ok((FockState::new(modes, trunc, amps)?, probability))
    }

    /// Conditions on the photon-number parity of `mode`; the mode is kept.
    pub fn project_parity(&self, mode: Mode, parity: Parity) -> Result<Projection> {
        let (state, probability) = self.project_parity_raw(mode, parity)?;
        if probability <= 0.0 {
            return Ok(Projection::Empty);
        }
        let s = 1.0 / probability.sqrt();
        Ok(Projection::Outcome {
            state: state.scaled(C64::new(s, 0.0)),
            probability,
        })
    }

    pub fn project_parity_raw(&self, mode: Mode, parity: Parity) -> Result<(FockState, f64)> {
        let k = self.mode_index(mode)?;
        let dims = self.dims();
        let stride = self.strides()[k];
        let amps: Vec<C64> = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if parity.matches((i / stride) % dims[k]) {
                    *a
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let probability = amps.iter().map(|a| a.norm_sqr()).sum();
        let state = FockState {
            modes: self.modes.clone(),
            trunc: self.trunc.clone(),
            amps,
        };
        Ok((state, probability))
    }

    /// Applies a dense single-mode operator given column by column:
    /// `columns[j][i] = ⟨i|U|j⟩` for `i, j ≤ n_max(mode)`.
    pub fn apply_single_mode(&self, mode: Mode, matrix: &[Vec<C64>]) -> Result<Self> {
        let k = self.mode_index(mode)?;
        let dims = self.dims();
        let d = dims[k];
        if matrix.len() != d || matrix.iter().any(|c| c.len() != d) {
            return Err(Error::ShapeMismatch {
                expected: d * d,
                got: matrix.iter().map(Vec::len).sum(),
            });
        }
        let stride = self.strides()[k];
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for base in 0..self.amps.len() {
            if (base / stride) % d != 0 {
                continue;
            }
            for (j, column) in matrix.iter().enumerate() {
                let a = self.amps[base + j * stride];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for (i, u) in column.iter().enumerate() {
                    out[base + i * stride] += u * a;
                }
            }
        }
        Ok(Self {
            modes: self.modes.clone(),
            trunc: self.trunc.clone(),
            amps: out,
        })
    }

    /// Iterator over `(occupation, amplitude)` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, C64)> + '_ {
        let dims = self.dims();
        let mut occ = vec![0usize; dims.len()];
        self.amps.iter().map(move |a| {
            let cur = occ.clone();
            increment(&mut occ, &dims);
            (cur, *a)
        })
    }
}

fn increment(occ: &mut [usize], dims: &[usize]) {
    for i in (0..occ.len()).rev() {
        occ[i] += 1;
        if occ[i] < dims[i] {
            return;
        }
        occ[i] = 0;
    }
}

/// Ordered logical basis of a two-level system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogicalBasis {
    /// `(|01⟩, |10⟩)` on a pair of modes.
    DualRail,
    /// `(|l⟩, |k⟩)` in one mode.
    SingleRail { l: usize, k: usize },
}

/// Pure two-level state in a labelled logical basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    amps: [C64; 2],
    basis: LogicalBasis,
}

pub type Gate = [[C64; 2]; 2];

impl QubitState {
    pub fn new(c0: C64, c1: C64, basis: LogicalBasis) -> Self {
        Self {
            amps: [c0, c1],
            basis,
        }
    }

    pub fn dual_rail(c0: C64, c1: C64) -> Self {
        Self::new(c0, c1, LogicalBasis::DualRail)
    }

    pub fn c0(&self) -> C64 {
        self.amps[0]
    }

    pub fn c1(&self) -> C64 {
        self.amps[1]
    }

    pub fn basis(&self) -> LogicalBasis {
        self.basis
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps[0].norm_sqr() + self.amps[1].norm_sqr()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n2.sqrt();
        Ok(Self::new(self.amps[0] * s, self.amps[1] * s, self.basis))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_EPS
    }

    pub fn apply(&self, gate: &Gate) -> Self {
        let [a, b] = self.amps;
        Self::new(
            gate[0][0] * a + gate[0][1] * b,
            gate[1][0] * a + gate[1][1] * b,
            self.basis,
        )
    }

    /// Reads the logical amplitudes of a two-mode dual-rail state
    /// `c0|01⟩ + c1|10⟩`; fails if more than `1e-12` of the mass lies
    /// outside the single-photon subspace.
    pub fn from_dual_rail(state: &FockState) -> Result<Self> {
        if state.modes().len() != 2 {
            return Err(Error::InvalidParameter(format!(
                "dual-rail extraction needs two modes, got {}",
                state.modes().len()
            )));
        }
        let c0 = state.amplitude(&[0, 1]);
        let c1 = state.amplitude(&[1, 0]);
        let inside = c0.norm_sqr() + c1.norm_sqr();
        let leak = state.norm_sqr() - inside;
        if leak > NORM_EPS * state.norm_sqr().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "state leaks {leak:.3e} outside the dual-rail subspace"
            )));
        }
        Ok(Self::dual_rail(c0, c1))
    }

    /// Reads `c0|l⟩ + c1|k⟩` from a single-mode state.
    pub fn from_single_rail(state: &FockState, l: usize, k: usize) -> Result<Self> {
        if state.modes().len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "single-rail extraction needs one mode, got {}",
                state.modes().len()
            )));
        }
        let c0 = state.amplitude(&[l]);
        let c1 = state.amplitude(&[k]);
        let leak = state.norm_sqr() - c0.norm_sqr() - c1.norm_sqr();
        if leak > NORM_EPS * state.norm_sqr().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "state leaks {leak:.3e} outside span{{|{l}⟩, |{k}⟩}}"
            )));
        }
        Ok(Self::new(c0, c1, LogicalBasis::SingleRail { l, k }))
    }
}

/// `|⟨a|b⟩|²` of the normalised states.
pub fn fidelity(a: &QubitState, b: &QubitState) -> Result<f64> {
    if a.basis != b.basis {
        return Err(Error::BasisMismatch(a.basis, b.basis));
    }
    let overlap = a.amps[0].conj() * b.amps[0] + a.amps[1].conj() * b.amps[1];
    let denom = a.norm_sqr() * b.norm_sqr();
    if denom <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((overlap.norm_sqr() / denom).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ket(mode: u8, amps: &[f64]) -> FockState {
        FockState::single_mode(Mode(mode), amps.iter().map(|&a| c(a)).collect(), 1e-3).unwrap()
    }

    #[test]
    fn truncation_rejects_bad_config() {
        assert!(TruncationConfig::new(vec![0], 1e-10).is_err());
        assert!(TruncationConfig::new(vec![3], 1.0).is_err());
        assert!(TruncationConfig::new(vec![3], -1e-3).is_err());
        assert!(TruncationConfig::new(vec![1, 4], 0.0).is_ok());
    }

    #[test]
    fn default_cutoff_grows_with_amplitude() {
        assert_eq!(default_cutoff(0.0), 12);
        assert_eq!(default_cutoff(1.0), 19);
        assert_eq!(default_cutoff(-2.0), 28);
    }

    #[test]
    fn vacuum_tensor_vacuum() {
        let v = FockState::number(Mode(1), 0, 2).unwrap();
        let w = FockState::number(Mode(2), 0, 2).unwrap();
        let vw = FockState::tensor(&v, &w).unwrap();
        assert_eq!(vw.amplitude(&[0, 0]), c(1.0));
        assert_abs_diff_eq!(vw.norm_sqr(), 1.0);
    }

    #[test]
    fn tensor_is_linear() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = ket(1, &[s, s]);
        let b = ket(2, &[0.0, 1.0]);
        let ab = FockState::tensor(&a, &b).unwrap();
        assert_abs_diff_eq!(ab.amplitude(&[0, 1]).re, s);
        assert_abs_diff_eq!(ab.amplitude(&[1, 1]).re, s);
        assert_abs_diff_eq!(ab.amplitude(&[0, 0]).norm(), 0.0);
        assert_abs_diff_eq!(ab.amplitude(&[1, 0]).norm(), 0.0);
    }

    #[test]
    fn tensor_rejects_shared_mode() {
        let a = ket(1, &[1.0, 0.0]);
        assert_eq!(
            FockState::tensor(&a, &a).unwrap_err(),
            Error::ModeCollision(Mode(1))
        );
    }

    #[test]
    fn project_number_selects_branch() {
        let a = ket(1, &[1.0, 0.0]);
        let b = ket(2, &[0.0, 1.0]);
        let ab = FockState::tensor(&a, &b).unwrap();
        let p = ab.project_number(Mode(1), 0).unwrap();
        assert_abs_diff_eq!(p.probability(), 1.0);
        let st = p.state().unwrap();
        assert_eq!(st.modes(), &[Mode(2)]);
        assert_abs_diff_eq!(st.amplitude(&[1]).re, 1.0);
    }

    #[test]
    fn project_number_on_bell_like_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let trunc = TruncationConfig::new(vec![1, 1], 1e-3).unwrap();
        let amps = vec![c(0.0), c(s), c(s), c(0.0)];
        let st = FockState::new(vec![Mode(1), Mode(2)], trunc, amps).unwrap();
        let p = st.project_number(Mode(1), 1).unwrap();
        assert_abs_diff_eq!(p.probability(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.state().unwrap().amplitude(&[0]).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn project_number_out_of_range() {
        let st = ket(1, &[1.0, 0.0]);
        assert!(matches!(
            st.project_number(Mode(1), 2),
            Err(Error::OutOfRange { n: 2, n_max: 1, .. })
        ));
        assert!(matches!(
            st.project_number(Mode(4), 0),
            Err(Error::MissingMode(Mode(4)))
        ));
    }

    #[test]
    fn zero_probability_projection_is_empty() {
        let st = ket(1, &[1.0, 0.0]);
        assert!(matches!(
            st.project_number(Mode(1), 1).unwrap(),
            Projection::Empty
        ));
        assert!(matches!(
            st.project_parity(Mode(1), Parity::Odd).unwrap(),
            Projection::Empty
        ));
    }

    #[test]
    fn parity_projection_examples() {
        let one = ket(1, &[0.0, 1.0]);
        assert_eq!(
            one.project_parity(Mode(1), Parity::Even).unwrap().probability(),
            0.0
        );
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ket(1, &[s, s]);
        let p = plus.project_parity(Mode(1), Parity::Even).unwrap();
        assert_abs_diff_eq!(p.probability(), 0.5, epsilon = 1e-15);
        let st = p.state().unwrap();
        assert_eq!(st.modes(), &[Mode(1)]);
        assert_abs_diff_eq!(st.amplitude(&[0]).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tail_check_flags_heavy_top_level() {
        let st = ket(1, &[0.6, 0.8]);
        let st = st.with_tail_tolerance(1e-10).unwrap();
        assert!(matches!(st.check_tail(), Err(Error::TailMass { .. })));
    }

    #[test]
    fn padded_preserves_amplitudes() {
        let st = ket(3, &[0.6, 0.8]);
        let p = st.padded(Mode(3), 5).unwrap();
        assert_eq!(p.n_max(Mode(3)).unwrap(), 5);
        assert_abs_diff_eq!(p.amplitude(&[1]).re, 0.8);
        assert_abs_diff_eq!(p.norm_sqr(), 1.0, epsilon = 1e-15);
        assert!(st.padded(Mode(3), 0).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zero = QubitState::dual_rail(c(1.0), c(0.0));
        let one = QubitState::dual_rail(c(0.0), c(1.0));
        let plus = QubitState::dual_rail(c(s), c(s));
        assert_abs_diff_eq!(fidelity(&plus, &plus).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert_abs_diff_eq!(fidelity(&plus, &zero).unwrap(), 0.5, epsilon = 1e-15);
        let phased = QubitState::dual_rail(C64::new(0.0, s), C64::new(0.0, s));
        assert_abs_diff_eq!(fidelity(&plus, &phased).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fidelity_rejects_mixed_bases() {
        let a = QubitState::dual_rail(c(1.0), c(0.0));
        let b = QubitState::new(c(1.0), c(0.0), LogicalBasis::SingleRail { l: 0, k: 1 });
        assert!(matches!(fidelity(&a, &b), Err(Error::BasisMismatch(..))));
    }

    #[test]
    fn dual_rail_extraction() {
        let trunc = TruncationConfig::new(vec![2, 2], 1e-3).unwrap();
        let mut st = FockState::from_occupation(vec![Mode(5), Mode(6)], trunc, &[0, 1]).unwrap();
        let q = QubitState::from_dual_rail(&st).unwrap();
        assert_eq!(q.c0(), c(1.0));
        st = st
            .add(&FockState::from_occupation(
                vec![Mode(5), Mode(6)],
                TruncationConfig::new(vec![2, 2], 1e-3).unwrap(),
                &[2, 0],
            )
            .unwrap())
            .unwrap();
        assert!(QubitState::from_dual_rail(&st).is_err());
    }

    fn arb_state(mode: u8, max_dim: usize) -> impl Strategy<Value = FockState> {
        (2..=max_dim)
            .prop_flat_map(|d| prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d))
            .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
            .prop_map(move |v| {
                let amps = v.into_iter().map(|(a, b)| C64::new(a, b)).collect();
                FockState::single_mode(Mode(mode), amps, 0.5)
                    .unwrap()
                    .normalized()
                    .unwrap()
            })
    }

    proptest! {
        #[test]
        fn normalization_closure(a in arb_state(1, 6)) {
            prop_assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tensor_norm_multiplies(a in arb_state(1, 5), b in arb_state(2, 5), sa in 0.1f64..2.0, sb in 0.1f64..2.0) {
            let a = a.scaled(C64::new(sa, 0.0));
            let b = b.scaled(C64::new(sb, 0.0));
            let ab = FockState::tensor(&a, &b).unwrap();
            // independent oracle: explicit double sum over multi-indices
            let mut direct = 0.0;
            for i in 0..a.dims()[0] {
                for j in 0..b.dims()[0] {
                    direct += (a.amplitude(&[i]) * b.amplitude(&[j])).norm_sqr();
                }
            }
            prop_assert!((ab.norm_sqr() - direct).abs() < 1e-12 * direct.max(1.0));
            prop_assert!((ab.norm_sqr() - a.norm_sqr() * b.norm_sqr()).abs() < 1e-12 * direct.max(1.0));
        }

        #[test]
        fn measurement_completeness(a in arb_state(1, 5), b in arb_state(2, 5)) {
            let ab = FockState::tensor(&a, &b).unwrap();
            for mode in [Mode(1), Mode(2)] {
                let n_max = ab.n_max(mode).unwrap();
                let total: f64 = (0..=n_max)
                    .map(|n| ab.project_number(mode, n).unwrap().probability())
                    .sum();
                prop_assert!((total - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn parity_completeness(a in arb_state(1, 7)) {
            let e = a.project_parity(Mode(1), Parity::Even).unwrap().probability();
            let o = a.project_parity(Mode(1), Parity::Odd).unwrap().probability();
            prop_assert!((e + o - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tensor_projection_commute(a in arb_state(1, 5), b in arb_state(2, 5), n in 0usize..5) {
            let n = n.min(a.n_max(Mode(1)).unwrap());
            let ab = FockState::tensor(&a, &b).unwrap();
            let lhs = ab.project_number(Mode(1), n).unwrap();
            let rhs = a.project_number(Mode(1), n).unwrap();
            prop_assert!((lhs.probability() - rhs.probability()).abs() < 1e-12);
            if let (Some(l), Some(r)) = (lhs.state(), rhs.state()) {
                // `r` is now a zero-mode scalar; tensoring with `b` must give `l`
                let rb = FockState::tensor(r, &b).unwrap();
                for (x, y) in l.amplitudes().iter().zip(rb.amplitudes()) {
                    prop_assert!((x - y).norm() < 1e-12);
                }
            }
        }
    }
}
