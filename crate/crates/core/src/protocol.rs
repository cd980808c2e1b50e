//! Teleportation of an unknown qubit through the hybrid channel.
//!
//! Dual rail: the qubit `a₀|lk⟩ + a₁|kl⟩` on modes 3, 4 is displaced by the
//! channel's coherent mode on BS₁₃ and by an ancilla `|−β₁⟩` on BS₂₄; Alice
//! measures the parity of mode 1 and the photon numbers `(n, m)` of modes 3, 4.
//! Single rail: the qubit `a₀|l⟩ + a₁|k⟩` meets the channel on one splitter
//! and Alice measures `n`.
//!
//! Bob's dual-rail photon is written in the basis `(|01⟩, |10⟩)`. With
//! `u₀ = c_ln(α)c_km(α₁)` and `u₁ = c_kn(α)c_lm(α₁)` (single rail:
//! `u₀ = c_ln`, `u₁ = c_kn`) the even-parity Bob state is proportional to
//! `(a₀u₀ + a₁u₁)|01⟩ + (−1)^{n−l}(a₀u₀ + (−1)^{l−k}a₁u₁)|10⟩`, and odd parity
//! flips the sign of the second component. After `H·Z^p` Bob holds
//! `(a₀, a₁A)` with `A = u₁/u₀`.

use num_complex::Complex64 as C64;

use crate::displaced::{self, coherent_state, MatrixElementTable};
use crate::error::{Error, Result};
use crate::fock::{FockState, Gate, Mode, Parity, QubitState};
use crate::optics::{apply_bs, BeamSplitterParams};

const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    DualRail,
    SingleRail,
}

/// `a₀|lk⟩ + a₁|kl⟩` (dual rail) or `a₀|l⟩ + a₁|k⟩` (single rail).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnknownQubit {
    a0: C64,
    a1: C64,
    l: usize,
    k: usize,
    encoding: Encoding,
}

impl UnknownQubit {
    /// Requires `|a₀|² + |a₁|² = 1` and `l − k` odd.
    pub fn new(a0: C64, a1: C64, l: usize, k: usize, encoding: Encoding) -> Result<Self> {
        let q = Self::with_parity_override(a0, a1, l, k, encoding)?;
        if !q.lk_odd() {
            return Err(Error::InvalidParameter(format!(
                "l − k must be odd for teleportation (l={l}, k={k})"
            )));
        }
        Ok(q)
    }

    /// Like [`UnknownQubit::new`] but accepts even `l − k`.
    pub fn with_parity_override(
        a0: C64,
        a1: C64,
        l: usize,
        k: usize,
        encoding: Encoding,
    ) -> Result<Self> {
        if l == k {
            return Err(Error::InvalidParameter(format!("l and k must differ (both {l})")));
        }
        let n2 = a0.norm_sqr() + a1.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "qubit amplitudes must be normalised, |a0|²+|a1|² = {n2}"
            )));
        }
        Ok(Self {
            a0,
            a1,
            l,
            k,
            encoding,
        })
    }

    pub fn dual_rail(a0: f64, a1: f64, l: usize, k: usize) -> Result<Self> {
        Self::new(C64::new(a0, 0.0), C64::new(a1, 0.0), l, k, Encoding::DualRail)
    }

    pub fn single_rail(a0: f64, a1: f64, l: usize, k: usize) -> Result<Self> {
        Self::new(C64::new(a0, 0.0), C64::new(a1, 0.0), l, k, Encoding::SingleRail)
    }

    pub fn a0(&self) -> C64 {
        self.a0
    }

    pub fn a1(&self) -> C64 {
        self.a1
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn lk_odd(&self) -> bool {
        (self.l + self.k) % 2 == 1
    }
}

/// Alice's measurement record; `m` is absent for single rail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Outcome {
    pub parity: Parity,
    pub n: usize,
    pub m: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TeleportRecord {
    pub outcome: Outcome,
    /// Bob's normalised state before correction.
    pub bob_state: QubitState,
    /// Probability of this outcome including the parity.
    pub probability: f64,
    /// `None` when the factor is singular.
    pub amp_factor: Option<f64>,
    pub z_power: usize,
    /// `H·Z^{z_power}` applied to `bob_state`.
    pub corrected_state: QubitState,
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn hadamard() -> Gate {
    let h = c(std::f64::consts::FRAC_1_SQRT_2);
    [[h, h], [h, -h]]
}

pub fn z_gate() -> Gate {
    [[c(1.0), c(0.0)], [c(0.0), c(-1.0)]]
}

fn sign(p: usize) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 {
        return Err(Error::SingularFactor);
    }
    Ok(num / den)
}

fn table(l: usize, k: usize, n: usize, alpha: f64) -> MatrixElementTable {
    MatrixElementTable::new(alpha, l.max(k), n)
}

/// `A_nm = c_kn(α)c_lm(α₁) / (c_ln(α)c_km(α₁))`.
pub fn amp_factor_dual(l: usize, k: usize, n: usize, m: usize, alpha: f64, alpha1: f64) -> Result<f64> {
    let (u0, u1) = weights_dual(l, k, n, m, alpha, alpha1);
    ratio(u1, u0)
}

/// `A_n = c_kn(α) / c_ln(α)`.
pub fn amp_factor_single(l: usize, k: usize, n: usize, alpha: f64) -> Result<f64> {
    let (u0, u1) = weights_single(l, k, n, alpha);
    ratio(u1, u0)
}

fn weights_dual(l: usize, k: usize, n: usize, m: usize, alpha: f64, alpha1: f64) -> (f64, f64) {
    let ta = table(l, k, n.max(m), alpha);
    let tb = table(l, k, n.max(m), alpha1);
    (ta.get(l, n) * tb.get(k, m), ta.get(k, n) * tb.get(l, m))
}

fn weights_single(l: usize, k: usize, n: usize, alpha: f64) -> (f64, f64) {
    let t = table(l, k, n, alpha);
    (t.get(l, n), t.get(k, n))
}

/// Unnormalised Bob state for the given parity.
fn bob_raw(q: &UnknownQubit, u0: f64, u1: f64, n: usize, parity: Parity) -> QubitState {
    // fix the global sign so that correction yields +(a₀, a₁A)
    let g = if u0 < 0.0 { -1.0 } else { 1.0 };
    let x = q.a0 * u0 * g;
    let y = q.a1 * u1 * g;
    let s_lk = sign(q.l + q.k);
    let mut second = (x + y * s_lk) * sign(n + q.l);
    if parity == Parity::Odd {
        second = -second;
    }
    QubitState::dual_rail(x + y, second)
}

/// Normalisation `N = (|a₀|² + |a₁|²A²)^{−1/2}`.
pub fn norm_factor(q: &UnknownQubit, amp: f64) -> f64 {
    1.0 / (q.a0.norm_sqr() + q.a1.norm_sqr() * amp * amp).sqrt()
}

/// Even and odd Bob states for outcome `(n, m)` and the normalisation `N`.
pub fn bob_states_dual(
    qubit: &UnknownQubit,
    alpha: f64,
    alpha1: f64,
    n: usize,
    m: usize,
) -> Result<(QubitState, QubitState, f64)> {
    if !qubit.lk_odd() {
        return Err(Error::InvalidParameter("l − k must be odd".into()));
    }
    let (u0, u1) = weights_dual(qubit.l, qubit.k, n, m, alpha, alpha1);
    let amp = ratio(u1, u0)?;
    let even = bob_raw(qubit, u0, u1, n, Parity::Even).normalized()?;
    let odd = bob_raw(qubit, u0, u1, n, Parity::Odd).normalized()?;
    Ok((even, odd, norm_factor(qubit, amp)))
}

/// Power of `Z` Bob applies before `H`: `n − l` for even parity, `n − l + 1`
/// for odd, reduced mod 2.
pub fn z_power(parity: Parity, n: usize, l: usize) -> usize {
    (n + l + usize::from(parity == Parity::Odd)) % 2
}

/// `H·Z^p` with `p` from [`z_power`].
pub fn correct(bob: &QubitState, parity: Parity, n: usize, l: usize) -> QubitState {
    let s = if z_power(parity, n, l) == 1 {
        bob.apply(&z_gate())
    } else {
        *bob
    };
    s.apply(&hadamard())
}

/// `P_nm` summed over parity, in the unreduced form
/// `F(α)²F(α₁)²(|a₀u₀|² + |a₁u₁|²)`.
pub fn outcome_probability_dual(qubit: &UnknownQubit, n: usize, m: usize, alpha: f64, alpha1: f64) -> f64 {
    let (u0, u1) = weights_dual(qubit.l, qubit.k, n, m, alpha, alpha1);
    let f4 = displaced::overall_factor(alpha).powi(2) * displaced::overall_factor(alpha1).powi(2);
    f4 * (qubit.a0.norm_sqr() * u0 * u0 + qubit.a1.norm_sqr() * u1 * u1)
}

/// `P_n = F²(|a₀c_ln|² + |a₁c_kn|²)` summed over parity.
pub fn outcome_probability_single(qubit: &UnknownQubit, n: usize, alpha: f64) -> f64 {
    let (u0, u1) = weights_single(qubit.l, qubit.k, n, alpha);
    let f2 = displaced::overall_factor(alpha).powi(2);
    f2 * (qubit.a0.norm_sqr() * u0 * u0 + qubit.a1.norm_sqr() * u1 * u1)
}

/// `P_nm + P_mn = F⁴(c_ln²c_km² + c_lm²c_kn²)` at `α = α₁`.
pub fn pair_sum(l: usize, k: usize, n: usize, m: usize, alpha: f64) -> f64 {
    let t = table(l, k, n.max(m), alpha);
    let f4 = displaced::overall_factor(alpha).powi(4);
    f4 * ((t.get(l, n) * t.get(k, m)).powi(2) + (t.get(l, m) * t.get(k, n)).powi(2))
}

/// Default analytic cutoff: at least 20, and wide enough for `α`.
pub fn analytic_cutoff(l: usize, k: usize, alpha: f64) -> usize {
    20usize.max(displaced::default_cutoff(l.max(k), alpha))
}

/// `P_T = F⁴ Σ_n c_ln² c_kn²`, the probability of `n = m` at `α = α₁`.
pub fn direct_success_probability(l: usize, k: usize, alpha: f64) -> f64 {
    let n_cut = analytic_cutoff(l, k, alpha);
    let t = table(l, k, n_cut, alpha);
    let f4 = displaced::overall_factor(alpha).powi(4);
    f4 * (0..=n_cut)
        .map(|n| (t.get(l, n) * t.get(k, n)).powi(2))
        .sum::<f64>()
}

/// `(α*, P_T(α*))` maximising the direct success probability on `[lo, hi]`.
pub fn maximize_direct_success(l: usize, k: usize, lo: f64, hi: f64) -> Result<(f64, f64)> {
    crate::search::maximize_golden(|a| direct_success_probability(l, k, a), lo, hi, 1e-9)
}

/// `P_AM`, the sum of pair probabilities over unordered `n < m`.
pub fn am_probability(l: usize, k: usize, alpha: f64) -> f64 {
    let n_cut = analytic_cutoff(l, k, alpha);
    (0..=n_cut)
        .flat_map(|n| (n + 1..=n_cut).map(move |m| (n, m)))
        .map(|(n, m)| pair_sum(l, k, n, m, alpha))
        .sum()
}

fn record(
    qubit: &UnknownQubit,
    outcome: Outcome,
    u0: f64,
    u1: f64,
    probability: f64,
) -> Result<TeleportRecord> {
    let n = outcome.n;
    let bob_state = bob_raw(qubit, u0, u1, n, outcome.parity).normalized()?;
    let corrected_state = correct(&bob_state, outcome.parity, n, qubit.l);
    Ok(TeleportRecord {
        outcome,
        bob_state,
        probability,
        amp_factor: ratio(u1, u0).ok(),
        z_power: z_power(outcome.parity, n, qubit.l),
        corrected_state,
    })
}

/// Record for one dual-rail outcome; each parity carries half of `P_nm`.
pub fn dual_rail_outcome(
    qubit: &UnknownQubit,
    alpha: f64,
    alpha1: f64,
    parity: Parity,
    n: usize,
    m: usize,
) -> Result<TeleportRecord> {
    let (u0, u1) = weights_dual(qubit.l, qubit.k, n, m, alpha, alpha1);
    let p = 0.5 * outcome_probability_dual(qubit, n, m, alpha, alpha1);
    record(qubit, Outcome { parity, n, m: Some(m) }, u0, u1, p)
}

/// Record for one single-rail outcome; each parity carries half of `P_n`.
pub fn single_rail_outcome(
    qubit: &UnknownQubit,
    alpha: f64,
    parity: Parity,
    n: usize,
) -> Result<TeleportRecord> {
    let (u0, u1) = weights_single(qubit.l, qubit.k, n, alpha);
    let p = 0.5 * outcome_probability_single(qubit, n, alpha);
    record(qubit, Outcome { parity, n, m: None }, u0, u1, p)
}

fn check_encoding(qubit: &UnknownQubit, want: Encoding) -> Result<()> {
    if qubit.encoding != want {
        return Err(Error::InvalidParameter(format!(
            "expected a {want:?} qubit, got {:?}",
            qubit.encoding
        )));
    }
    if !qubit.lk_odd() {
        return Err(Error::InvalidParameter("l − k must be odd".into()));
    }
    Ok(())
}

/// All dual-rail outcomes with `n, m ≤ n_cut` and nonzero probability, in
/// lexicographic `(parity, n, m)` order.
pub fn dual_rail_pipeline(
    qubit: &UnknownQubit,
    alpha: f64,
    alpha1: f64,
    n_cut: usize,
) -> Result<Vec<TeleportRecord>> {
    check_encoding(qubit, Encoding::DualRail)?;
    let mut out = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        for n in 0..=n_cut {
            for m in 0..=n_cut {
                if outcome_probability_dual(qubit, n, m, alpha, alpha1) > 0.0 {
                    out.push(dual_rail_outcome(qubit, alpha, alpha1, parity, n, m)?);
                }
            }
        }
    }
    Ok(out)
}

/// All single-rail outcomes with `n ≤ n_cut` and nonzero probability.
pub fn single_rail_pipeline(qubit: &UnknownQubit, alpha: f64, n_cut: usize) -> Result<Vec<TeleportRecord>> {
    check_encoding(qubit, Encoding::SingleRail)?;
    let mut out = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        for n in 0..=n_cut {
            if outcome_probability_single(qubit, n, alpha) > 0.0 {
                out.push(single_rail_outcome(qubit, alpha, parity, n)?);
            }
        }
    }
    Ok(out)
}

/// 2×2 density matrix in the `(|01⟩, |10⟩)` basis, `rho[i][j] = ⟨i|ρ|j⟩`.
pub type Density = [[C64; 2]; 2];

/// One outcome of the finite-splitter simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleRecord {
    pub outcome: Outcome,
    /// Exact probability of the outcome including parity.
    pub probability: f64,
    /// Bob's conditional state (unit trace); mixed because the ancilla
    /// and the channel's coherent mode are traced out.
    pub bob_density: Density,
    /// `H·Z^p ρ (H·Z^p)†`.
    pub corrected_density: Density,
    /// `⟨ψ|ρ_c|ψ⟩` against the analytic target `(a₀u₀, a₁u₁)` at
    /// `α = βr/t`; `None` if the target vanishes.
    pub fidelity: Option<f64>,
    /// Analytic probability of the same outcome.
    pub analytic_probability: f64,
}

fn conjugate(g: &Gate, rho: &Density) -> Density {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    out[i][j] += g[i][a] * rho[a][b] * g[j][b].conj();
                }
            }
        }
    }
    out
}

fn correction_gate(parity: Parity, n: usize, l: usize) -> Gate {
    let h = hadamard();
    if z_power(parity, n, l) == 0 {
        return h;
    }
    let z = z_gate();
    let mut g = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = h[i][0] * z[0][j] + h[i][1] * z[1][j];
        }
    }
    g
}

/// One term of the expansion: amplitude, Bob basis index, and the
/// conditional factors living in the traced-out modes.
struct Term<'a> {
    coeff: C64,
    bob: usize,
    factors: Vec<&'a FockState>,
}

fn density_from_terms(terms: &[Term<'_>]) -> Result<Density> {
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for x in terms {
        for y in terms {
            let mut ov = C64::new(1.0, 0.0);
            for (fx, fy) in x.factors.iter().zip(&y.factors) {
                ov *= fy.inner(fx)?;
            }
            rho[x.bob][y.bob] += x.coeff * y.coeff.conj() * ov;
        }
    }
    Ok(rho)
}

fn finish(
    qubit: &UnknownQubit,
    outcome: Outcome,
    rho: Density,
    target: (f64, f64),
    analytic_probability: f64,
) -> OracleRecord {
    let probability = (rho[0][0] + rho[1][1]).re;
    let unit = if probability > 0.0 {
        rho.map(|row| row.map(|x| x / probability))
    } else {
        rho
    };
    let corrected = conjugate(&correction_gate(outcome.parity, outcome.n, qubit.l), &unit);
    let psi = [qubit.a0 * target.0, qubit.a1 * target.1];
    let n2 = psi[0].norm_sqr() + psi[1].norm_sqr();
    let fidelity = (n2 > 0.0 && probability > 0.0).then(|| {
        let mut f = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                f += psi[i].conj() * corrected[i][j] * psi[j];
            }
        }
        (f.re / n2).min(1.0)
    });
    OracleRecord {
        outcome,
        probability,
        bob_density: unit,
        corrected_density: corrected,
        fidelity,
        analytic_probability,
    }
}

/// Exact finite-`r` simulation of the teleportation circuit with
/// `t = √(1 − r²)`. Dual rail uses the channel amplitude `beta` and the
/// ancilla amplitude `beta1`; single rail ignores `beta1`. Outcomes with
/// `n, m ≤ n_cut` are returned in lexicographic `(parity, n, m)` order.
///
/// The four expansion terms (channel branch × qubit component) factorise
/// over mode pairs, so each beam splitter acts on a two-mode state only.
pub fn brute_force_pipeline(
    qubit: &UnknownQubit,
    beta: f64,
    beta1: f64,
    r: f64,
    n_cut: usize,
) -> Result<Vec<OracleRecord>> {
    if !(r > 0.0 && r <= 0.3) {
        return Err(Error::InvalidParameter(format!(
            "reflectance amplitude must lie in (0, 0.3], got {r}"
        )));
    }
    if !qubit.lk_odd() {
        return Err(Error::InvalidParameter("l − k must be odd".into()));
    }
    let params = BeamSplitterParams::from_reflectance(r)?;
    let t = params.t();
    match qubit.encoding {
        Encoding::DualRail => brute_force_dual(qubit, beta, beta1, params, n_cut, beta * r / t, beta1 * r / t),
        Encoding::SingleRail => brute_force_single(qubit, beta, params, n_cut, beta * r / t),
    }
}

fn qubit_cutoff(qubit: &UnknownQubit, alpha: f64, n_cut: usize) -> usize {
    n_cut.max(displaced::default_cutoff(qubit.l.max(qubit.k), alpha))
}

/// `BS(|x⟩_a|j⟩_b)` with the given mode order, then `⟨n|_b` and the parity
/// of mode `a` (when requested) for every `n ≤ n_cut`.
fn split_and_measure(
    coherent_mode: Mode,
    x: f64,
    n_coh: usize,
    fock_mode: Mode,
    j: usize,
    n_fock: usize,
    coherent_first: bool,
    params: BeamSplitterParams,
    n_cut: usize,
) -> Result<Vec<FockState>> {
    let input = FockState::tensor(
        &coherent_state(coherent_mode, x, n_coh, crate::fock::DEFAULT_TAIL_TOLERANCE)?,
        &FockState::number(fock_mode, j, n_fock)?,
    )?;
    let out = if coherent_first {
        apply_bs(&input, coherent_mode, fock_mode, params)?
    } else {
        apply_bs(&input, fock_mode, coherent_mode, params)?
    };
    (0..=n_cut)
        .map(|n| Ok(out.project_number_raw(fock_mode, n)?.0))
        .collect()
}

fn parity_split(s: &FockState, mode: Mode) -> Result<[FockState; 2]> {
    Ok([
        s.project_parity_raw(mode, Parity::Even)?.0,
        s.project_parity_raw(mode, Parity::Odd)?.0,
    ])
}

fn brute_force_dual(
    qubit: &UnknownQubit,
    beta: f64,
    beta1: f64,
    params: BeamSplitterParams,
    n_cut: usize,
    alpha: f64,
    alpha1: f64,
) -> Result<Vec<OracleRecord>> {
    let (l, k) = (qubit.l, qubit.k);
    let n3 = qubit_cutoff(qubit, alpha, n_cut);
    let n4 = qubit_cutoff(qubit, alpha1, n_cut);
    let n1 = crate::fock::default_cutoff(beta) + n3;
    let n2 = crate::fock::default_cutoff(beta1) + n4;
    let h = std::f64::consts::FRAC_1_SQRT_2;

    // mode 1 after BS₁₃, projected on n and split by parity:
    // v1[branch][j][n][parity], branch 0 ↔ |−β⟩|01⟩, 1 ↔ |β⟩|10⟩
    let mut v1 = Vec::new();
    for s in [-1.0, 1.0] {
        let mut per_j = Vec::new();
        for j in [l, k] {
            let slices = split_and_measure(Mode(1), s * beta, n1, Mode(3), j, n3, true, params, n_cut)?;
            per_j.push(
                slices
                    .iter()
                    .map(|x| parity_split(x, Mode(1)))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        v1.push(per_j);
    }
    // mode 2 after BS₂₄, projected on m: v2[j][m]
    let v2 = [l, k]
        .iter()
        .map(|&j| split_and_measure(Mode(2), -beta1, n2, Mode(4), j, n4, true, params, n_cut))
        .collect::<Result<Vec<_>>>()?;

    let f4 = displaced::overall_factor(alpha).powi(2) * displaced::overall_factor(alpha1).powi(2);
    let mut out = Vec::new();
    for (pi, parity) in [Parity::Even, Parity::Odd].into_iter().enumerate() {
        for n in 0..=n_cut {
            for m in 0..=n_cut {
                // qubit components: a₀|lk⟩ (j index 0 on mode 3, 1 on mode 4), a₁|kl⟩
                let comps = [(qubit.a0, 0usize, 1usize), (qubit.a1, 1, 0)];
                let mut terms = Vec::new();
                for (bi, _) in [-1.0, 1.0].iter().enumerate() {
                    for &(a, j3, j4) in &comps {
                        terms.push(Term {
                            coeff: a * h,
                            bob: bi,
                            factors: vec![&v1[bi][j3][n][pi], &v2[j4][m]],
                        });
                    }
                }
                let rho = density_from_terms(&terms)?;
                let (u0, u1) = weights_dual(l, k, n, m, alpha, alpha1);
                let analytic = 0.5 * f4 * (qubit.a0.norm_sqr() * u0 * u0 + qubit.a1.norm_sqr() * u1 * u1);
                out.push(finish(
                    qubit,
                    Outcome { parity, n, m: Some(m) },
                    rho,
                    (u0, u1),
                    analytic,
                ));
            }
        }
    }
    Ok(out)
}

fn brute_force_single(
    qubit: &UnknownQubit,
    beta: f64,
    params: BeamSplitterParams,
    n_cut: usize,
    alpha: f64,
) -> Result<Vec<OracleRecord>> {
    let (l, k) = (qubit.l, qubit.k);
    let n2 = qubit_cutoff(qubit, alpha, n_cut);
    let n1 = crate::fock::default_cutoff(beta) + n2;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // the qubit mode is listed first on the splitter
    let mut v1 = Vec::new();
    for s in [-1.0, 1.0] {
        let mut per_j = Vec::new();
        for j in [l, k] {
            let slices = split_and_measure(Mode(1), s * beta, n1, Mode(2), j, n2, false, params, n_cut)?;
            per_j.push(
                slices
                    .iter()
                    .map(|x| parity_split(x, Mode(1)))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        v1.push(per_j);
    }
    let f2 = displaced::overall_factor(alpha).powi(2);
    let mut out = Vec::new();
    for (pi, parity) in [Parity::Even, Parity::Odd].into_iter().enumerate() {
        for n in 0..=n_cut {
            let comps = [(qubit.a0, 0usize), (qubit.a1, 1)];
            let mut terms = Vec::new();
            for bi in 0..2 {
                for &(a, j) in &comps {
                    terms.push(Term {
                        coeff: a * h,
                        bob: bi,
                        factors: vec![&v1[bi][j][n][pi]],
                    });
                }
            }
            let rho = density_from_terms(&terms)?;
            let (u0, u1) = weights_single(l, k, n, alpha);
            let analytic = 0.5 * f2 * (qubit.a0.norm_sqr() * u0 * u0 + qubit.a1.norm_sqr() * u1 * u1);
            out.push(finish(qubit, Outcome { parity, n, m: None }, rho, (u0, u1), analytic));
        }
    }
    Ok(out)
}
