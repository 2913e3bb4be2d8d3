//! Intelligent states: eigenvectors of the non-Hermitian operator
//! `L(λ) = λA + iH`, plus closed-form constructors for displaced squeezed
//! states and su(2) coherent states.
//!
//! An exact eigenvector of `L(λ)` saturates the Schrödinger relation for
//! `(A, H)` and obeys
//!
//! ```text
//! ΔA²  = |⟨C⟩| / (2 Re λ)
//! ΔH²  = |λ|² |⟨C⟩| / (2 Re λ)
//! ΔAH  = -|⟨C⟩| Im λ / (2 Re λ)         C = [A, H]
//! ```
//!
//! The solver reports how far each returned state is from these identities.

use faer::c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hilbert::{
    self, build_spin_operator, moment_report, HilbertSpec, MomentReport, Operator, SpinOp,
    StateVector, TRUST_TAIL,
};
use crate::linalg::{self, I, ONE, ZERO};
use crate::resources::{self, BoundConstants, Classification, GroundEnergy};
use crate::{Error, Result};

/// Default residual gate `‖L v - z v‖ ≤ accept_tol`.
pub const DEFAULT_ACCEPT_TOL: f64 = 1e-6;

/// Below this `|⟨C⟩|` a state carries no phase signal.
pub const SIGNAL_FLOOR: f64 = 1e-10;

/// Two eigenvectors with `|⟨u|v⟩| ≥ 1 - DUPLICATE_TOL` are the same state.
const DUPLICATE_TOL: f64 = 1e-8;

/// Largest truncation tried when suggesting a dimension.
const MAX_SUGGESTED_DIM: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `|λ| > 1`: squeezed in `A`, antisqueezed in `H`.
    SqueezedA,
    Coherent,
    SqueezedH,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingParameter {
    lambda: c64,
    regime: Regime,
}

impl SqueezingParameter {
    pub fn new(lambda: c64) -> Result<Self> {
        if !(lambda.re > 0.0) || !lambda.im.is_finite() || !lambda.re.is_finite() {
            return Err(Error::Regime(format!(
                "Re(lambda) must be positive, got {lambda}"
            )));
        }
        let m = lambda.norm();
        let regime = if (m - 1.0).abs() <= 1e-12 {
            Regime::Coherent
        } else if m > 1.0 {
            Regime::SqueezedA
        } else {
            Regime::SqueezedH
        };
        Ok(SqueezingParameter { lambda, regime })
    }

    pub fn real(lambda: f64) -> Result<Self> {
        SqueezingParameter::new(c64::new(lambda, 0.0))
    }

    pub fn lambda(&self) -> c64 {
        self.lambda
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }
}

#[derive(Clone, Debug)]
pub struct IntelligentState {
    pub lambda: SqueezingParameter,
    pub eigenvalue: c64,
    pub state: StateVector,
    /// `‖L v - z v‖` for the normalized vector.
    pub residual: f64,
    /// Absolute deviations from the three variance/covariance identities.
    pub trifonov_residuals: [f64; 3],
    pub moments: MomentReport,
    /// False when `⟨C⟩` vanishes, e.g. eigenstates of `H` alone.
    pub usable: bool,
}

impl IntelligentState {
    /// `ΔA/|⟨C⟩|`, or `None` for unusable states.
    pub fn delta_phi(&self) -> Option<f64> {
        self.usable
            .then(|| self.moments.sd_a() / self.moments.mean_c.norm())
    }

    pub fn max_trifonov_residual(&self) -> f64 {
        self.trifonov_residuals.iter().copied().fold(0.0, f64::max)
    }

    fn build(
        lambda: SqueezingParameter,
        a: &Operator,
        h: &Operator,
        state: StateVector,
        eigenvalue: c64,
    ) -> Result<Self> {
        let residual = l_residual(a, h, lambda.lambda, eigenvalue, state.amplitudes());
        let moments = moment_report(&state, a, h)?;
        Ok(IntelligentState {
            lambda,
            eigenvalue,
            residual,
            trifonov_residuals: trifonov_residuals(&moments, lambda.lambda),
            usable: moments.mean_c.norm() > SIGNAL_FLOOR,
            moments,
            state,
        })
    }
}

/// Deviations of a moment report from the intelligent-state identities at `λ`.
pub fn trifonov_residuals(m: &MomentReport, lambda: c64) -> [f64; 3] {
    let c = m.mean_c.norm();
    let denom = 2.0 * lambda.re;
    [
        (m.var_a - c / denom).abs(),
        (m.var_h - lambda.norm_sqr() * c / denom).abs(),
        (m.cov_ah + c * lambda.im / denom).abs(),
    ]
}

/// `‖(λA + iH) v - z v‖`.
fn l_residual(a: &Operator, h: &Operator, lambda: c64, z: c64, v: &[c64]) -> f64 {
    let av = a.apply(v);
    let hv = h.apply(v);
    av.iter()
        .zip(&hv)
        .zip(v)
        .map(|((x, y), w)| (lambda * x + I * y - z * w).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn check_pair(a: &Operator, h: &Operator) -> Result<()> {
    a.require_hermitian()?;
    h.require_hermitian()?;
    if a.space() != h.space() {
        return Err(Error::DimensionMismatch {
            left: a.dimension(),
            right: h.dimension(),
        });
    }
    Ok(())
}

/// All trusted eigenstates of `λA + iH`, ordered by eigenvalue `(Re, Im)`.
pub fn solve_intelligent_states(
    a: &Operator,
    h: &Operator,
    lambda: c64,
    accept_tol: f64,
) -> Result<Vec<IntelligentState>> {
    check_pair(a, h)?;
    let param = SqueezingParameter::new(lambda)?;
    let l = hilbert::dense_l_operator(a, h, lambda)?;
    let (values, vectors) = linalg::general_eigen(&l)?;

    let mut kept: Vec<IntelligentState> = Vec::new();
    for (k, &z) in values.iter().enumerate() {
        let mut v = linalg::column(&vectors, k);
        linalg::fix_phase(&mut v);
        let Ok(state) = StateVector::new(a.space(), v) else {
            continue;
        };
        if !state.is_trusted() {
            continue;
        }
        if l_residual(a, h, lambda, z, state.amplitudes()) > accept_tol {
            continue;
        }
        let duplicate = kept.iter().any(|s| {
            linalg::inner(s.state.amplitudes(), state.amplitudes()).norm() >= 1.0 - DUPLICATE_TOL
        });
        if duplicate {
            continue;
        }
        kept.push(IntelligentState::build(param, a, h, state, z)?);
    }
    if kept.is_empty() {
        return Err(Error::NoTrustedEigenstates);
    }
    kept.sort_by(|x, y| {
        x.eigenvalue
            .re
            .total_cmp(&y.eigenvalue.re)
            .then(x.eigenvalue.im.total_cmp(&y.eigenvalue.im))
    });
    Ok(kept)
}

/// The eigenvector of `λA + iH` whose eigenvalue lies closest to `target`,
/// taken as the smallest right singular vector of `L - target·I`.
///
/// Works where a full eigendecomposition is ill-conditioned: away from the
/// low-lying spectrum, truncated ladder operators have a huge pseudospectrum
/// and the computed eigenvectors are unreliable.
pub fn targeted_intelligent_state(
    a: &Operator,
    h: &Operator,
    lambda: c64,
    target: c64,
    accept_tol: f64,
) -> Result<IntelligentState> {
    check_pair(a, h)?;
    let param = SqueezingParameter::new(lambda)?;
    let mut l = hilbert::dense_l_operator(a, h, lambda)?;
    for i in 0..l.nrows() {
        l[(i, i)] -= target;
    }
    let (_, mut v) = linalg::smallest_singular_vector(&l)?;
    linalg::fix_phase(&mut v);
    let state = StateVector::new(a.space(), v)?;
    if !state.is_trusted() {
        return Err(Error::UntrustedTruncation {
            tail_weight: state.tail_weight(),
            threshold: TRUST_TAIL,
            suggested_dim: Some(2 * a.dimension()),
        });
    }
    let psi = state.amplitudes();
    let la: Vec<c64> = a
        .apply(psi)
        .iter()
        .zip(h.apply(psi))
        .map(|(x, y)| lambda * x + I * y)
        .collect();
    let z = linalg::inner(psi, &la);
    let out = IntelligentState::build(param, a, h, state, z)?;
    if out.residual > accept_tol {
        return Err(Error::NoTrustedEigenstates);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovPair {
    pub mu: f64,
    pub nu: f64,
}

/// Coefficients of `μa + νa† ∝ λX + iP`.
pub fn bogoliubov_from_lambda(lambda: f64) -> Result<BogoliubovPair> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Regime(format!("lambda must be positive, got {lambda}")));
    }
    let s = (4.0 * lambda).sqrt();
    Ok(BogoliubovPair {
        mu: (lambda + 1.0) / s,
        nu: (lambda - 1.0) / s,
    })
}

/// `D(α)S(ξ)|0⟩` truncated to `dim`, with `ξ > 0` squeezing `P`:
/// `ΔP = e^{-ξ}/√2`, `ΔX = e^{ξ}/√2`, `⟨X⟩ = √2 Re α`.
pub fn displaced_squeezed_state(alpha: c64, xi: f64, dim: usize) -> Result<StateVector> {
    if !xi.is_finite() || !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidParameter("alpha and xi must be finite".into()));
    }
    let space = HilbertSpec::fock(dim)?;
    let state = StateVector::new(space, squeezed_amplitudes(alpha, xi, dim))?;
    if state.is_trusted() {
        return Ok(state);
    }
    let mut suggested = None;
    let mut d = dim.max(2) * 2;
    while d <= MAX_SUGGESTED_DIM {
        let amps = squeezed_amplitudes(alpha, xi, d);
        let trial = StateVector::new(HilbertSpec::fock(d)?, amps)?;
        if trial.is_trusted() {
            suggested = Some(d);
            break;
        }
        d *= 2;
    }
    Err(Error::UntrustedTruncation {
        tail_weight: state.tail_weight(),
        threshold: TRUST_TAIL,
        suggested_dim: suggested,
    })
}

/// Unnormalized eigenvector of `μa + νa†` with eigenvalue `β = μα + να*`,
/// where `(μ, ν)` belong to `λ = e^{-2ξ}`.
fn squeezed_amplitudes(alpha: c64, xi: f64, dim: usize) -> Vec<c64> {
    let lambda = (-2.0 * xi).exp();
    let s = (4.0 * lambda).sqrt();
    let (mu, nu) = ((lambda + 1.0) / s, (lambda - 1.0) / s);
    let beta = alpha * mu + alpha.conj() * nu;
    let mut c = Vec::with_capacity(dim);
    c.push(ONE);
    if dim > 1 {
        c.push(beta / mu);
    }
    for n in 1..dim.saturating_sub(1) {
        let next = (beta * c[n] - c[n - 1] * (nu * (n as f64).sqrt())) / (mu * ((n + 1) as f64).sqrt());
        c.push(next);
        if next.norm() > 1e100 {
            let scale = 1.0 / next.norm();
            for x in c.iter_mut() {
                *x *= scale;
            }
        }
    }
    c
}

/// `exp(ζJ₊ - ζ*J₋)|j;-j⟩` with `ζ = -e^{-iφ}θ/2`.
///
/// This phase convention gives `⟨-Jy⟩ + j = j(1 + sinθ sinφ)`,
/// `ΔJx² = j(1 - sin²θ cos²φ)/2`, `ΔJy² = j(1 - sin²θ sin²φ)/2` and
/// `|⟨Jz⟩| = j|cosθ|`. Amplitude on `|j; m⟩`, with `k = j + m`:
/// `√C(2j, k) cos(θ/2)^{2j-k} sin(θ/2)^k (-e^{-iφ})^k`.
pub fn su2_coherent_state(two_j: usize, theta: f64, phi: f64) -> Result<StateVector> {
    if two_j == 0 {
        return Err(Error::InvalidDimension("two_j must be >= 1".into()));
    }
    if !(0.0..=std::f64::consts::PI).contains(&theta) || !phi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [0, pi], got {theta}"
        )));
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let ln_pow = |base: f64, e: usize| -> Option<f64> {
        match (e, base.abs() < f64::MIN_POSITIVE) {
            (0, _) => Some(0.0),
            (_, true) => None,
            _ => Some(e as f64 * base.abs().ln()),
        }
    };
    let mut ln_binom = 0.0;
    let mut amps = Vec::with_capacity(two_j + 1);
    for k in 0..=two_j {
        if k > 0 {
            ln_binom += ((two_j - k + 1) as f64).ln() - (k as f64).ln();
        }
        let amp = match (ln_pow(c, two_j - k), ln_pow(s, k)) {
            (Some(x), Some(y)) => {
                let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
                c64::cis(-(k as f64) * phi) * (sign * (0.5 * ln_binom + x + y).exp())
            }
            _ => ZERO,
        };
        amps.push(amp);
    }
    StateVector::new(HilbertSpec::spin(two_j), amps)
}

/// `{2, 4, …, 2^{⌈log₂ 4j⌉ - 1}}`: powers of two up to about `2j`.
pub fn default_spin_grid(two_j: usize) -> Vec<f64> {
    let top = (2.0 * two_j as f64).log2().ceil() as i32;
    (2..=top).map(|k| 2f64.powi(k - 1)).collect()
}

/// Best phase probe among eigenstates of `λJx - iJy` over `grid`.
///
/// Minimizes `ΔJx/|⟨Jz⟩|` over usable states that do not have too little
/// energy with respect to `H = -Jy`.
pub fn spin_squeezed_search(two_j: usize, grid: &[f64]) -> Result<IntelligentState> {
    if two_j < 4 {
        return Err(Error::InvalidParameter(format!(
            "spin squeezing search needs two_j >= 4, got {two_j}"
        )));
    }
    if grid.is_empty() {
        return Err(Error::EmptyInput("lambda grid".into()));
    }
    if let Some(bad) = grid.iter().find(|&&l| !(l > 1.0)) {
        return Err(Error::Regime(format!(
            "A-squeezing needs lambda > 1, grid contains {bad}"
        )));
    }
    let a = build_spin_operator(SpinOp::Jx, two_j)?;
    let h = build_spin_operator(SpinOp::Jy, two_j)?.scale(-ONE);
    let e0 = resources::ground_energy(&h, GroundEnergy::Spectrum)?;
    let constants = BoundConstants::default();

    let per_lambda: Vec<Vec<IntelligentState>> = grid
        .par_iter()
        .map(|&l| solve_intelligent_states(&a, &h, c64::new(l, 0.0), DEFAULT_ACCEPT_TOL))
        .filter_map(|r| r.ok())
        .collect();

    let mut best: Option<(f64, IntelligentState)> = None;
    for s in per_lambda.into_iter().flatten() {
        let Some(dphi) = s.delta_phi() else { continue };
        let energetic = resources::classify_moments(s.moments.mean_h, s.moments.sd_h(), e0, &constants)
            .is_ok_and(|p| p.classification != Classification::TooLittleEnergy);
        if energetic && best.as_ref().is_none_or(|(b, _)| dphi < *b) {
            best = Some((dphi, s));
        }
    }
    best.map(|(_, s)| s).ok_or_else(|| {
        Error::NoQualifyingState(format!(
            "no usable eigenstate with enough energy for two_j = {two_j}"
        ))
    })
}
