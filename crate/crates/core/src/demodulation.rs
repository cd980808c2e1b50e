//! Removing a known amplitude factor `A` from `N(a₀|01⟩ + a₁A|10⟩)`.
//!
//! Displacement: `D(γ)` on the second mode followed by detecting `n` photons
//! there leaves `a₀|0⟩ + a₁A·(c_0n(γ)/c_1n(γ))|1⟩`, which is the original
//! qubit (up to a sign) when `A·γ/(n − γ²) = ±1`. Its weight is
//! `q^D = F(γ)²c_1n(γ)²`. Other detector outcomes `p` leave a new AM qubit
//! with factor `A·c_0p/c_1p` and weight `F(γ)²c_1p(γ)²`.
//!
//! Swapping: mixing the second mode with mode 3 of `N'(A|01⟩ + |10⟩)` on a
//! balanced splitter and detecting one photon in modes 2, 3 restores the
//! qubit on modes 1, 4 with weight `q^S = A²/(1 + A²)`.
//!
//! Weights are relative to the unnormalised state `(a₀, a₁A)`; the joint
//! probability of success from an AM outcome of unreduced weight `w` is
//! `w·q`, independent of the qubit.

use num_complex::Complex64 as C64;

use crate::displaced::{self, matrix_element, MatrixElementTable};
use crate::error::{Error, Result};
use crate::fock::{FockState, Mode, QubitState, TruncationConfig, DEFAULT_TAIL_TOLERANCE};
use crate::optics::{apply_bs, displacement_unitary, BeamSplitterParams};
use crate::protocol::{amp_factor_dual, amp_factor_single, analytic_cutoff, direct_success_probability};

/// Default bound on `|γ|` for [`solve_gamma`].
pub const GAMMA_MAX: f64 = 8.0;
/// `|A|` within this distance of 1 counts as clean (a sign is fixed by `Z`).
pub const UNIT_TOL: f64 = 1e-9;
/// Default depth of displacement chains.
pub const DEFAULT_DEPTH: usize = 3;
/// Largest detector outcome targeted by a displacement step.
pub const MAX_TARGET: usize = 15;
const PRUNE: f64 = 1e-10;

/// `N(a₀|01⟩ + a₁A|10⟩)` with `|a₀|² + |a₁|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AMQubit {
    a0: C64,
    a1: C64,
    factor: f64,
}

impl AMQubit {
    pub fn new(a0: C64, a1: C64, factor: f64) -> Result<Self> {
        let n2 = a0.norm_sqr() + a1.norm_sqr();
        if (n2 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "qubit amplitudes must be normalised, |a0|²+|a1|² = {n2}"
            )));
        }
        if !factor.is_finite() {
            return Err(Error::InvalidParameter(format!("amplitude factor must be finite, got {factor}")));
        }
        Ok(Self { a0, a1, factor })
    }

    pub fn a0(&self) -> C64 {
        self.a0
    }

    pub fn a1(&self) -> C64 {
        self.a1
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    /// `N = (|a₀|² + |a₁|²A²)^{−1/2}`.
    pub fn norm_factor(&self) -> f64 {
        1.0 / (self.a0.norm_sqr() + self.a1.norm_sqr() * self.factor * self.factor).sqrt()
    }

    /// The normalised dual-rail state.
    pub fn state(&self) -> QubitState {
        let n = self.norm_factor();
        QubitState::dual_rail(self.a0 * n, self.a1 * self.factor * n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// `|A| = 1`: at most a `Z` correction.
    Direct,
    Swap,
    Displacement,
    Skip,
}

/// A non-matching displacement outcome: a new AM qubit with its weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualBranch {
    pub outcome: usize,
    /// `F(γ)²c_1p(γ)²`.
    pub weight: f64,
    pub am: AMQubit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemodResult {
    /// Restored qubit on success, in the `(|0⟩, |1⟩)` basis of the kept mode
    /// (displacement) or `(|01⟩, |10⟩)` of modes 1, 4 (swap).
    pub restored: Option<QubitState>,
    /// `q`, relative to the unnormalised AM state.
    pub success_probability: f64,
    /// Probability of the success event given the normalised AM state,
    /// `N²q`, from the simulation.
    pub conditional_probability: f64,
    pub method: Method,
    pub gamma: Option<f64>,
    /// `±1`: the restored state is `(a₀, sign·a₁)`.
    pub sign: f64,
    /// 1 on success, otherwise the unchanged factor.
    pub residual_factor: f64,
    pub residuals: Vec<ResidualBranch>,
}

/// `c_0n(γ)/c_1n(γ) = γ/(n − γ²)`.
fn ratio01(n: usize, gamma: f64) -> f64 {
    gamma / (n as f64 - gamma * gamma)
}

/// All `γ ∈ [−GAMMA_MAX, GAMMA_MAX]` with `A·c_0n(γ)/c_1n(γ) = ±1`.
pub fn solve_gamma(a: f64, n: usize) -> Vec<f64> {
    solve_gamma_within(a, n, GAMMA_MAX)
}

/// Roots of `γ² ± Aγ − n = 0`, excluding `γ = 0` and `γ² = n`, sorted.
pub fn solve_gamma_within(a: f64, n: usize, gamma_max: f64) -> Vec<f64> {
    if a == 0.0 || !a.is_finite() {
        return Vec::new();
    }
    let nf = n as f64;
    let disc = (a * a + 4.0 * nf).sqrt();
    let mut roots = Vec::new();
    for s in [1.0, -1.0] {
        // γ² + bγ − n = 0 without cancellation
        let b = s * a;
        let q = -0.5 * (b + b.signum() * disc);
        let pair = [q, if q != 0.0 { -nf / q } else { 0.0 }];
        for g in pair {
            if g == 0.0 || g.abs() > gamma_max || (g * g - nf).abs() <= 1e-12 * nf.max(1.0) {
                continue;
            }
            if ((a * ratio01(n, g)).abs() - 1.0).abs() > 1e-10 {
                continue;
            }
            roots.push(g);
        }
    }
    roots.sort_by(|x, y| x.total_cmp(y));
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * x.abs().max(1.0));
    roots
}

/// `q^D = F(γ)²c_1n(γ)²`.
pub fn displacement_q(n: usize, gamma: f64) -> f64 {
    displaced::overall_factor(gamma).powi(2) * matrix_element(1, n, gamma).powi(2)
}

/// `q^S = A²/(1 + A²)`.
pub fn swap_q(a: f64) -> f64 {
    a * a / (1.0 + a * a)
}

/// The target outcome and root maximising the first-step `q^D`.
pub fn best_target(a: f64) -> Option<(usize, f64, f64)> {
    let mut best: Option<(usize, f64, f64)> = None;
    for n in 0..=MAX_TARGET {
        for g in solve_gamma(a, n).into_iter().filter(|g| *g > 0.0) {
            let q = displacement_q(n, g);
            if best.is_none_or(|(_, _, b)| q > b) {
                best = Some((n, g, q));
            }
        }
    }
    best
}

fn failed(method: Method, factor: f64) -> DemodResult {
    DemodResult {
        restored: None,
        success_probability: 0.0,
        conditional_probability: 0.0,
        method,
        gamma: None,
        sign: 0.0,
        residual_factor: factor,
        residuals: Vec::new(),
    }
}

fn dual_rail_pair(am: &AMQubit, n_second: usize) -> Result<FockState> {
    let trunc = TruncationConfig::new(vec![1, n_second], DEFAULT_TAIL_TOLERANCE)?;
    let modes = vec![Mode(1), Mode(2)];
    let n = am.norm_factor();
    let zero = FockState::from_occupation(modes.clone(), trunc.clone(), &[0, 1])?;
    let one = FockState::from_occupation(modes, trunc, &[1, 0])?;
    zero.scaled(am.a0 * n).add(&one.scaled(am.a1 * am.factor * n))
}

/// Displaces the second rail so that detector outcome `n` restores the
/// qubit, choosing the root with the largest `q^D`; the state is evolved
/// through the displacement operator and projected.
pub fn demod_displacement(am: &AMQubit, n: usize) -> Result<DemodResult> {
    let a = am.factor;
    let Some(gamma) = solve_gamma(a, n)
        .into_iter()
        .max_by(|x, y| displacement_q(n, *x).total_cmp(&displacement_q(n, *y)).then(x.total_cmp(y)))
    else {
        return Ok(failed(Method::Displacement, a));
    };
    let cutoff = displaced::default_cutoff(1, gamma) + n;
    let out = displacement_unitary(&dual_rail_pair(am, cutoff)?, Mode(2), gamma)?;
    let (slice, p) = out.project_number_raw(Mode(2), n)?;
    let restored = QubitState::from_single_rail(&slice, 0, 1)?.normalized()?;
    let table = MatrixElementTable::new(gamma, 1, cutoff);
    let f2 = table.overall_factor().powi(2);
    let residuals = (0..=cutoff)
        .filter(|&p| p != n && table.get(1, p) != 0.0)
        .map(|p| {
            let weight = f2 * table.get(1, p).powi(2);
            let factor = a * table.get(0, p) / table.get(1, p);
            Ok(ResidualBranch {
                outcome: p,
                weight,
                am: AMQubit::new(am.a0, am.a1, factor)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DemodResult {
        restored: Some(restored),
        success_probability: displacement_q(n, gamma),
        conditional_probability: p,
        method: Method::Displacement,
        gamma: Some(gamma),
        sign: (a * ratio01(n, gamma)).signum(),
        residual_factor: 1.0,
        residuals,
    })
}

/// Both single-click outcomes of the swap, `|01⟩₂₃` then `|10⟩₂₃`: the state
/// left on modes 1, 4 and its probability given the normalised AM qubit.
pub fn swap_branches(am: &AMQubit) -> Result<[(Option<QubitState>, f64); 2]> {
    let a = am.factor;
    let np = 1.0 / (1.0 + a * a).sqrt();
    let trunc = TruncationConfig::new(vec![2, 1], DEFAULT_TAIL_TOLERANCE)?;
    let modes = vec![Mode(3), Mode(4)];
    let pre = FockState::from_occupation(modes.clone(), trunc.clone(), &[0, 1])?
        .scaled(C64::new(a * np, 0.0))
        .add(&FockState::from_occupation(modes, trunc, &[1, 0])?.scaled(C64::new(np, 0.0)))?;
    let joint = FockState::tensor(&dual_rail_pair(am, 2)?, &pre)?;
    let mixed = apply_bs(&joint, Mode(2), Mode(3), BeamSplitterParams::balanced())?;
    let mut out = [(None, 0.0), (None, 0.0)];
    for (i, (n2, n3)) in [(0, 1), (1, 0)].into_iter().enumerate() {
        let (s, _) = mixed.project_number_raw(Mode(2), n2)?;
        let (s, p) = s.project_number_raw(Mode(3), n3)?;
        let q = if p > 0.0 {
            Some(QubitState::from_dual_rail(&s)?.normalized()?)
        } else {
            None
        };
        out[i] = (q, p);
    }
    Ok(out)
}

/// Swap demodulation; `restored` is the `|01⟩₂₃` branch, the `|10⟩₂₃`
/// branch differs by `Z`.
pub fn demod_swap(am: &AMQubit) -> Result<DemodResult> {
    let [(restored, p01), (_, p10)] = swap_branches(am)?;
    if restored.is_none() {
        return Ok(failed(Method::Swap, am.factor));
    }
    let conditional = p01 + p10;
    let n = am.norm_factor();
    Ok(DemodResult {
        restored,
        success_probability: conditional / (n * n),
        conditional_probability: conditional,
        method: Method::Swap,
        gamma: None,
        sign: 1.0,
        residual_factor: 1.0,
        residuals: Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Only outcomes that are clean by construction count.
    SkipAll,
    SwapOnly,
    /// Displacement chains; residual branches are displaced again up to
    /// `depth` steps in total.
    DisplacementOnly { depth: usize },
    /// Per branch, the better of swapping and a displacement chain whose
    /// residual branches may in turn be swapped.
    BestOf { depth: usize },
}

impl Default for Policy {
    fn default() -> Self {
        Policy::BestOf { depth: DEFAULT_DEPTH }
    }
}

fn is_unit(a: f64) -> bool {
    (a.abs() - 1.0).abs() <= UNIT_TOL
}

/// Expected weight of success per unit weight of an AM branch with factor
/// `a`, and the method used first.
pub fn branch_value(a: f64, policy: Policy) -> (f64, Method) {
    let depth = match policy {
        Policy::DisplacementOnly { depth } | Policy::BestOf { depth } => depth,
        _ => 0,
    };
    value(a, policy, depth, 1.0)
}

fn value(a: f64, policy: Policy, depth: usize, weight: f64) -> (f64, Method) {
    if policy == Policy::SkipAll || a == 0.0 || !a.is_finite() {
        return (0.0, Method::Skip);
    }
    if is_unit(a) {
        return (1.0, Method::Direct);
    }
    let swap = (swap_q(a), Method::Swap);
    let chain = || -> (f64, Method) {
        if depth == 0 {
            return (0.0, Method::Skip);
        }
        let Some((n, gamma, q)) = best_target(a) else {
            return (0.0, Method::Skip);
        };
        let cutoff = displaced::default_cutoff(1, gamma) + n;
        let table = MatrixElementTable::new(gamma, 1, cutoff);
        let f2 = table.overall_factor().powi(2);
        let mut total = q;
        for p in (0..=cutoff).filter(|&p| p != n) {
            let c1 = table.get(1, p);
            let w = f2 * c1 * c1;
            if c1 == 0.0 || w * weight < PRUNE {
                continue;
            }
            total += w * value(a * table.get(0, p) / c1, policy, depth - 1, w * weight).0;
        }
        (total, Method::Displacement)
    };
    match policy {
        Policy::SwapOnly => swap,
        Policy::DisplacementOnly { .. } => chain(),
        Policy::BestOf { .. } => {
            let c = chain();
            if c.0 > swap.0 {
                c
            } else {
                swap
            }
        }
        Policy::SkipAll => unreachable!(),
    }
}

/// One AM outcome in an overall-probability account.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutcomeItem {
    pub n: usize,
    /// Absent for single rail.
    pub m: Option<usize>,
    /// Unreduced weight `F⁴c_ln²c_km²` (single rail `F²c_ln²`).
    pub weight: f64,
    pub factor: Option<f64>,
    pub method: Method,
    pub q: f64,
}

impl OutcomeItem {
    pub fn contribution(&self) -> f64 {
        self.weight * self.q
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverallReport {
    pub l: usize,
    pub k: usize,
    pub alpha: f64,
    pub policy: Policy,
    /// Probability of outcomes that need no demodulation by construction
    /// (`n = m` for dual rail, none for single rail).
    pub direct: f64,
    pub delta: f64,
    pub total: f64,
    pub items: Vec<OutcomeItem>,
}

/// `P_T + Σ_{n≠m} w_nm q_nm` for the dual-rail protocol at `α = α₁`.
pub fn overall_success(l: usize, k: usize, alpha: f64, policy: Policy) -> OverallReport {
    let cut = analytic_cutoff(l, k, alpha);
    let t = MatrixElementTable::new(alpha, l.max(k), cut);
    let f4 = t.overall_factor().powi(4);
    let mut items = Vec::new();
    for n in 0..=cut {
        for m in (0..=cut).filter(|&m| m != n) {
            let weight = f4 * (t.get(l, n) * t.get(k, m)).powi(2);
            if weight == 0.0 {
                continue;
            }
            let factor = amp_factor_dual(l, k, n, m, alpha, alpha).ok();
            let (q, method) = branch_value(factor.unwrap_or(f64::NAN), policy);
            items.push(OutcomeItem { n, m: Some(m), weight, factor, method, q });
        }
    }
    let direct = direct_success_probability(l, k, alpha);
    let delta: f64 = items.iter().map(OutcomeItem::contribution).sum();
    OverallReport { l, k, alpha, policy, direct, delta, total: direct + delta, items }
}

/// Single-rail account: every outcome `n` carries `A_n`; the `δP` of the
/// report is the demodulated addition.
pub fn single_rail_overall(l: usize, k: usize, alpha: f64, policy: Policy) -> OverallReport {
    let cut = analytic_cutoff(l, k, alpha);
    let t = MatrixElementTable::new(alpha, l.max(k), cut);
    let f2 = t.overall_factor().powi(2);
    let items: Vec<OutcomeItem> = (0..=cut)
        .filter_map(|n| {
            let weight = f2 * t.get(l, n).powi(2);
            (weight > 0.0).then(|| {
                let factor = amp_factor_single(l, k, n, alpha).ok();
                let (q, method) = branch_value(factor.unwrap_or(f64::NAN), policy);
                OutcomeItem { n, m: None, weight, factor, method, q }
            })
        })
        .collect();
    let delta: f64 = items.iter().map(OutcomeItem::contribution).sum();
    OverallReport { l, k, alpha, policy, direct: 0.0, delta, total: delta, items }
}

/// Swap addition for the single-rail protocol, `F² Σ_n c_ln² q^S(A_n)`.
pub fn single_rail_delta_swap(l: usize, k: usize, alpha: f64) -> f64 {
    single_rail_overall(l, k, alpha, Policy::SwapOnly).delta
}

/// Displacement addition for the single-rail protocol with chains of the
/// given depth (depth 1: the best first step per outcome).
pub fn single_rail_delta_displacement(l: usize, k: usize, alpha: f64, depth: usize) -> f64 {
    single_rail_overall(l, k, alpha, Policy::DisplacementOnly { depth }).delta
}

/// One teleportation outcome of an initially modulated qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmOutcomeRecord {
    pub n: usize,
    pub m: Option<usize>,
    pub probability: f64,
    /// Factor left on Bob's qubit; 1 when the pre-modulation cancels.
    pub residual_factor: Option<f64>,
    pub method: Method,
    /// Joint probability of teleporting and restoring via this outcome.
    pub success: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialAmReport {
    pub records: Vec<AmOutcomeRecord>,
    pub total_success: f64,
    /// Dual rail only: the tabulated closed-form sum, whose last term
    /// carries `|A₁₀|^{−2}` where the outcome algebra gives `|A₁₀|²`.
    pub total_closed_form: Option<f64>,
}

fn check_a1(a1: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a1) || !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need |a1| ∈ [0, 1] and α > 0 (got {a1}, {alpha})"
        )));
    }
    Ok((1.0 - a1 * a1).sqrt())
}

/// Maximum `n + m` kept in the initially-modulated dual-rail sums.
pub const INITIAL_AM_ORDER: usize = 20;

/// Dual rail, qubit pre-modulated by `A₀₁^{−1}`; non-clean outcomes are
/// swapped.
pub fn initially_am_dual(a1: f64, alpha: f64) -> Result<InitialAmReport> {
    let a0 = check_a1(a1, alpha)?;
    let a01 = amp_factor_dual(0, 1, 0, 1, alpha, alpha)?;
    let a10 = amp_factor_dual(0, 1, 1, 0, alpha, alpha)?;
    let nam2 = 1.0 / (1.0 + (a01.powi(-2) - 1.0) * a1 * a1);
    let cut = INITIAL_AM_ORDER;
    let t = MatrixElementTable::new(alpha, 1, cut);
    let f4 = t.overall_factor().powi(4);
    let mut records = Vec::new();
    for n in 0..=cut {
        for m in 0..=cut - n {
            let u0 = t.get(0, n) * t.get(1, m);
            let u1 = t.get(1, n) * t.get(0, m);
            let probability = f4 * nam2 * (a0 * a0 * u0 * u0 + a1 * a1 * u1 * u1 / (a01 * a01));
            let residual = (u0 != 0.0).then(|| u1 / (u0 * a01));
            let (q, method) = match residual {
                Some(b) if is_unit(b) => (1.0, Method::Direct),
                Some(b) => (swap_q(b), Method::Swap),
                None => (0.0, Method::Skip),
            };
            records.push(AmOutcomeRecord {
                n,
                m: Some(m),
                probability,
                residual_factor: residual,
                method,
                success: f4 * nam2 * u0 * u0 * q,
            });
        }
    }
    let total_success = records.iter().map(|r| r.success).sum();

    let c = |l: usize, n: usize| t.get(l, n);
    let mut closed = (c(0, 0) * c(1, 1)).powi(2)
        + (c(0, 1) * c(1, 0)).powi(2) * a10.powi(4) / (1.0 + a10.powi(4));
    closed += swap_q(a10) * (0..=cut).map(|n| (c(0, n) * c(1, n)).powi(2)).sum::<f64>();
    for n in 0..=cut {
        for m in (0..=cut - n).filter(|&m| m != n && n + m > 1) {
            let w = (c(0, n) * c(1, m)).powi(2);
            if w == 0.0 {
                continue;
            }
            let x = a10.powi(-2) * amp_factor_dual(0, 1, n, m, alpha, alpha)?.powi(2);
            closed += w * x / (1.0 + x);
        }
    }
    Ok(InitialAmReport {
        records,
        total_success,
        total_closed_form: Some(f4 * nam2 * closed),
    })
}

/// Single rail, qubit pre-modulated by `A₀^{−1}`; non-vacuum outcomes are
/// demodulated by displacement chains of the given depth.
pub fn initially_am_single(a1: f64, alpha: f64, depth: usize) -> Result<InitialAmReport> {
    let a0 = check_a1(a1, alpha)?;
    let amp0 = amp_factor_single(0, 1, 0, alpha)?;
    let nam2 = 1.0 / (1.0 + (amp0.powi(-2) - 1.0) * a1 * a1);
    let cut = analytic_cutoff(0, 1, alpha);
    let t = MatrixElementTable::new(alpha, 1, cut);
    let f2 = t.overall_factor().powi(2);
    let policy = Policy::DisplacementOnly { depth };
    let records: Vec<AmOutcomeRecord> = (0..=cut)
        .map(|n| {
            let (u0, u1) = (t.get(0, n), t.get(1, n));
            let probability = f2 * nam2 * (a0 * a0 * u0 * u0 + a1 * a1 * u1 * u1 / (amp0 * amp0));
            let residual = (u0 != 0.0).then(|| u1 / (u0 * amp0));
            let (q, method) = residual.map_or((0.0, Method::Skip), |b| value(b, policy, depth, 1.0));
            AmOutcomeRecord {
                n,
                m: None,
                probability,
                residual_factor: residual,
                method,
                success: f2 * nam2 * u0 * u0 * q,
            }
        })
        .collect();
    let total_success = records.iter().map(|r| r.success).sum();
    Ok(InitialAmReport {
        records,
        total_success,
        total_closed_form: None,
    })
}

/// `α` in `[lo, hi]` where `A_nm^(lk)(α, α) = −1`.
pub fn unit_factor_alpha(l: usize, k: usize, n: usize, m: usize, lo: f64, hi: f64) -> Result<f64> {
    crate::search::find_root_brent(
        |a| amp_factor_dual(l, k, n, m, a, a).map_or(f64::NAN, |x| x + 1.0),
        lo,
        hi,
        1e-14,
    )
}
