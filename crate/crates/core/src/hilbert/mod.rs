//! Operator and state algebra on truncated Fock spaces and spin-j spaces.
//!
//! Conventions: `ħ = m = ω = 1`, Fock basis `|0⟩, |1⟩, …, |d-1⟩`, spin basis
//! ordered `m = -j, …, +j`. Operators are kept in compressed sparse row form;
//! every ladder-built operator is banded, and [`Operator::to_dense`] is used
//! whenever a factorization is needed.

mod io;
mod spectral;

pub use io::{read_operator, read_state, write_operator, write_state, LoadedOperator};
pub use spectral::Spectrum;

use std::fmt;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};
use sprs::{CsMat, TriMat};

use crate::linalg::{self, I, ONE, ZERO};
use crate::{Error, Result};

/// Entry-wise tolerance for the hermiticity test, relative to the largest
/// entry magnitude (floored at 1).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A Fock state is trusted when at most this much probability sits on the top
/// 10% of the basis.
pub const TRUST_TAIL: f64 = 1e-8;

pub const DEFAULT_FOCK_DIM: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HilbertSpec {
    Fock { dim: usize },
    Spin { two_j: usize },
}

impl HilbertSpec {
    pub fn fock(dim: usize) -> Result<Self> {
        let spec = HilbertSpec::Fock { dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn spin(two_j: usize) -> Self {
        HilbertSpec::Spin { two_j }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            HilbertSpec::Fock { dim: 0 } => Err(Error::InvalidDimension(
                "Fock space needs dim >= 1".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn dimension(&self) -> usize {
        match *self {
            HilbertSpec::Fock { dim } => dim,
            HilbertSpec::Spin { two_j } => two_j + 1,
        }
    }

    pub fn is_fock(&self) -> bool {
        matches!(self, HilbertSpec::Fock { .. })
    }

    /// Spin quantum number `j`, if this is a spin space.
    pub fn j(&self) -> Option<f64> {
        match *self {
            HilbertSpec::Spin { two_j } => Some(two_j as f64 / 2.0),
            HilbertSpec::Fock { .. } => None,
        }
    }

    fn ensure_same(&self, other: &HilbertSpec) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for HilbertSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HilbertSpec::Fock { dim } => write!(f, "fock(dim={dim})"),
            HilbertSpec::Spin { two_j } => write!(f, "spin(two_j={two_j})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Hermitian,
    /// `M† = -M`; `i·M` is Hermitian. Commutators of Hermitian operators land here.
    AntiHermitian,
    General,
}

#[derive(Clone, Debug)]
pub struct Operator {
    space: HilbertSpec,
    entries: CsMat<c64>,
    symmetry: Symmetry,
}

impl Operator {
    pub fn from_csr(space: HilbertSpec, entries: CsMat<c64>) -> Result<Self> {
        space.validate()?;
        let d = space.dimension();
        if entries.rows() != d || entries.cols() != d {
            return Err(Error::InvalidDimension(format!(
                "operator is {}x{} but {space} has dimension {d}",
                entries.rows(),
                entries.cols()
            )));
        }
        let entries = if entries.is_csr() {
            entries
        } else {
            entries.to_csr()
        };
        let symmetry = classify_symmetry(&entries);
        Ok(Operator {
            space,
            entries,
            symmetry,
        })
    }

    pub fn from_triplets(
        space: HilbertSpec,
        triplets: impl IntoIterator<Item = (usize, usize, c64)>,
    ) -> Result<Self> {
        let d = space.dimension();
        let mut tri = TriMat::new((d, d));
        for (i, j, v) in triplets {
            if i >= d || j >= d {
                return Err(Error::InvalidDimension(format!(
                    "entry ({i}, {j}) outside {space}"
                )));
            }
            if v != ZERO {
                tri.add_triplet(i, j, v);
            }
        }
        Operator::from_csr(space, tri.to_csr())
    }

    pub fn from_dense(space: HilbertSpec, m: &Mat<c64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidDimension(format!(
                "operator matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        Operator::from_triplets(
            space,
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j, m[(i, j)]))),
        )
    }

    pub fn identity(space: HilbertSpec) -> Self {
        let d = space.dimension();
        Operator::from_csr(space, CsMat::eye(d)).expect("identity matches its space")
    }

    pub fn space(&self) -> HilbertSpec {
        self.space
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn entries(&self) -> &CsMat<c64> {
        &self.entries
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn is_hermitian(&self) -> bool {
        self.symmetry == Symmetry::Hermitian
    }

    pub fn require_hermitian(&self) -> Result<()> {
        if self.is_hermitian() {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                asymmetry: self.max_asymmetry(),
            })
        }
    }

    /// True when every stored entry sits on the diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.entries
            .iter()
            .all(|(v, (i, j))| i == j || *v == ZERO)
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.entries.get(i, j).copied().unwrap_or(ZERO)
    }

    /// Largest `|M_ij - conj(M_ji)|`.
    pub fn max_asymmetry(&self) -> f64 {
        let diff = &self.entries - &adjoint_csr(&self.entries);
        diff.data().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Result<Mat<c64>> {
        let d = self.dimension();
        linalg::check_dense(d)?;
        let mut m = Mat::<c64>::zeros(d, d);
        for (v, (i, j)) in self.entries.iter() {
            m[(i, j)] += *v;
        }
        Ok(m)
    }

    /// Matrix-vector product `M v`.
    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        debug_assert_eq!(v.len(), self.dimension());
        self.entries
            .outer_iterator()
            .map(|row| row.iter().fold(ZERO, |acc, (j, m)| acc + m * v[j]))
            .collect()
    }

    pub fn expectation(&self, state: &StateVector) -> c64 {
        linalg::inner(state.amplitudes(), &self.apply(state.amplitudes()))
    }

    pub fn adjoint(&self) -> Operator {
        self.with_entries(adjoint_csr(&self.entries))
    }

    pub fn scale(&self, factor: c64) -> Operator {
        self.with_entries(self.entries.map(|v| v * factor))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.space.ensure_same(&other.space)?;
        Ok(self.with_entries(&self.entries + &other.entries))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.space.ensure_same(&other.space)?;
        Ok(self.with_entries(&self.entries - &other.entries))
    }

    /// Operator product `self · other`.
    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        self.space.ensure_same(&other.space)?;
        Ok(self.with_entries(&self.entries * &other.entries))
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Operator {
        let sum = &self.entries + &adjoint_csr(&self.entries);
        self.with_entries(sum.map(|v| v * 0.5))
    }

    fn with_entries(&self, entries: CsMat<c64>) -> Operator {
        let symmetry = classify_symmetry(&entries);
        Operator {
            space: self.space,
            entries,
            symmetry,
        }
    }
}

fn adjoint_csr(m: &CsMat<c64>) -> CsMat<c64> {
    m.transpose_view().to_csr().map(|v| v.conj())
}

fn classify_symmetry(m: &CsMat<c64>) -> Symmetry {
    let scale = m.data().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = HERMITIAN_TOL * scale;
    let adj = adjoint_csr(m);
    let max_dev = |x: CsMat<c64>| x.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_dev(m - &adj) <= tol {
        Symmetry::Hermitian
    } else if max_dev(m + &adj) <= tol {
        Symmetry::AntiHermitian
    } else {
        Symmetry::General
    }
}

/// `AB - BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

/// `AB + BA`.
pub fn anticommutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.matmul(b)?.add(&b.matmul(a)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FockOp {
    Annihilation,
    Creation,
    Number,
    X,
    P,
    /// `E₊ = Σ |n⟩⟨n-1|`, truncated at the top edge.
    EPlus,
    /// `E₋ = Σ |n⟩⟨n+1|`.
    EMinus,
    /// `Ĉ = (E₊ + E₋)/2`.
    Cosine,
    /// `Ŝ = i(E₊ - E₋)/2`.
    Sine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinOp {
    Jx,
    Jy,
    Jz,
    JPlus,
    JMinus,
}

/// Ladder and quadrature operators on the truncated Fock space of size `dim`.
pub fn build_fock_operator(kind: FockOp, dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "Fock operators need dim >= 2, got {dim}"
        )));
    }
    let space = HilbertSpec::fock(dim)?;
    const R2: f64 = std::f64::consts::FRAC_1_SQRT_2;
    fn sqrt(n: usize) -> f64 {
        (n as f64).sqrt()
    }
    let lowering = |w: fn(usize) -> c64| (1..dim).map(move |n| (n - 1, n, w(n)));
    let raising = |w: fn(usize) -> c64| (1..dim).map(move |n| (n, n - 1, w(n)));
    let triplets: Vec<(usize, usize, c64)> = match kind {
        FockOp::Annihilation => lowering(|n| c64::new(sqrt(n), 0.0)).collect(),
        FockOp::Creation => raising(|n| c64::new(sqrt(n), 0.0)).collect(),
        FockOp::Number => (1..dim).map(|n| (n, n, c64::new(n as f64, 0.0))).collect(),
        FockOp::X => lowering(|n| c64::new(sqrt(n) * R2, 0.0))
            .chain(raising(|n| c64::new(sqrt(n) * R2, 0.0)))
            .collect(),
        // P = i(a† - a)/√2
        FockOp::P => raising(|n| c64::new(0.0, sqrt(n) * R2))
            .chain(lowering(|n| c64::new(0.0, -sqrt(n) * R2)))
            .collect(),
        FockOp::EPlus => raising(|_| ONE).collect(),
        FockOp::EMinus => lowering(|_| ONE).collect(),
        FockOp::Cosine => raising(|_| c64::new(0.5, 0.0))
            .chain(lowering(|_| c64::new(0.5, 0.0)))
            .collect(),
        FockOp::Sine => raising(|_| c64::new(0.0, 0.5))
            .chain(lowering(|_| c64::new(0.0, -0.5)))
            .collect(),
    };
    Operator::from_triplets(space, triplets)
}

/// Angular momentum matrices in the `Jz` eigenbasis ordered `m = -j..+j`.
pub fn build_spin_operator(kind: SpinOp, two_j: usize) -> Result<Operator> {
    if two_j == 0 {
        return Err(Error::InvalidDimension(
            "spin operators need two_j >= 1".into(),
        ));
    }
    let space = HilbertSpec::spin(two_j);
    let j = two_j as f64 / 2.0;
    let m = |k: usize| k as f64 - j;
    // ⟨m+1|J₊|m⟩ = √(j(j+1) - m(m+1)), basis index k ↔ m = k - j.
    let plus = |k: usize| (j * (j + 1.0) - m(k) * (m(k) + 1.0)).max(0.0).sqrt();
    let up = (0..two_j).map(|k| (k + 1, k, plus(k)));
    let down = (0..two_j).map(|k| (k, k + 1, plus(k)));
    let triplets: Vec<(usize, usize, c64)> = match kind {
        SpinOp::Jz => (0..=two_j)
            .map(|k| (k, k, c64::new(m(k), 0.0)))
            .collect(),
        SpinOp::JPlus => up.map(|(r, c, v)| (r, c, c64::new(v, 0.0))).collect(),
        SpinOp::JMinus => down.map(|(r, c, v)| (r, c, c64::new(v, 0.0))).collect(),
        SpinOp::Jx => up
            .chain(down)
            .map(|(r, c, v)| (r, c, c64::new(v / 2.0, 0.0)))
            .collect(),
        // Jy = (J₊ - J₋)/2i
        SpinOp::Jy => up
            .map(|(r, c, v)| (r, c, c64::new(0.0, -v / 2.0)))
            .chain(down.map(|(r, c, v)| (r, c, c64::new(0.0, v / 2.0))))
            .collect(),
    };
    Operator::from_triplets(space, triplets)
}

/// Normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: HilbertSpec,
    amplitudes: Vec<c64>,
    tail_weight: f64,
}

impl StateVector {
    /// Build a state from raw amplitudes, normalizing them.
    pub fn new(space: HilbertSpec, mut amplitudes: Vec<c64>) -> Result<Self> {
        space.validate()?;
        if amplitudes.len() != space.dimension() {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: space.dimension(),
            });
        }
        let n = linalg::norm(&amplitudes);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(
                "state amplitudes have zero or non-finite norm".into(),
            ));
        }
        for z in amplitudes.iter_mut() {
            *z /= n;
        }
        Ok(Self::from_normalized(space, amplitudes))
    }

    /// Wrap amplitudes that are already normalized (e.g. the output of a
    /// unitary). No renormalization is applied.
    pub(crate) fn from_normalized(space: HilbertSpec, amplitudes: Vec<c64>) -> Self {
        let tail_weight = tail_weight(&space, &amplitudes);
        StateVector {
            space,
            amplitudes,
            tail_weight,
        }
    }

    pub fn basis(space: HilbertSpec, index: usize) -> Result<Self> {
        let d = space.dimension();
        if index >= d {
            return Err(Error::InvalidDimension(format!(
                "basis index {index} outside {space}"
            )));
        }
        let mut amps = vec![ZERO; d];
        amps[index] = ONE;
        StateVector::new(space, amps)
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        StateVector::basis(HilbertSpec::fock(dim)?, 0)
    }

    /// Haar-random state: i.i.d. complex Gaussian amplitudes, normalized.
    pub fn random<R: rand::Rng + ?Sized>(space: HilbertSpec, rng: &mut R) -> Result<Self> {
        use rand_distr::StandardNormal;
        let amps = (0..space.dimension())
            .map(|_| c64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        StateVector::new(space, amps)
    }

    /// Coherent state `|α⟩` truncated to `dim` and renormalized.
    pub fn coherent(alpha: c64, dim: usize) -> Result<Self> {
        let space = HilbertSpec::fock(dim)?;
        let mut amps = Vec::with_capacity(dim);
        let mut c = ONE;
        for n in 0..dim {
            if n > 0 {
                c = c * alpha / (n as f64).sqrt();
            }
            amps.push(c);
        }
        StateVector::new(space, amps)
    }

    pub fn space(&self) -> HilbertSpec {
        self.space
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn amplitudes(&self) -> &[c64] {
        &self.amplitudes
    }

    /// Probability on the top 10% of the Fock basis; zero for spin spaces.
    pub fn tail_weight(&self) -> f64 {
        self.tail_weight
    }

    pub fn is_trusted(&self) -> bool {
        self.tail_weight <= TRUST_TAIL
    }

    pub fn require_trusted(&self) -> Result<()> {
        if self.is_trusted() {
            Ok(())
        } else {
            Err(Error::UntrustedTruncation {
                tail_weight: self.tail_weight,
                threshold: TRUST_TAIL,
                suggested_dim: None,
            })
        }
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn overlap(&self, other: &StateVector) -> Result<c64> {
        self.space.ensure_same(&other.space)?;
        Ok(linalg::inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Number of basis states counted as the truncation tail.
pub fn tail_len(dim: usize) -> usize {
    dim.div_ceil(10).max(1)
}

fn tail_weight(space: &HilbertSpec, amps: &[c64]) -> f64 {
    match space {
        HilbertSpec::Fock { dim } => amps[dim - tail_len(*dim)..]
            .iter()
            .map(|z| z.norm_sqr())
            .sum(),
        HilbertSpec::Spin { .. } => 0.0,
    }
}

/// First and second moments of a Hermitian pair on a pure state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean_a: f64,
    pub mean_h: f64,
    pub var_a: f64,
    pub var_h: f64,
    /// `½⟨{A,H}⟩ - ⟨A⟩⟨H⟩`
    pub cov_ah: f64,
    /// `⟨[A,H]⟩`, purely imaginary up to rounding.
    pub mean_c: c64,
    /// `ΔA²ΔH² - |½⟨C⟩|² - ΔAH²`, non-negative by the Schrödinger relation.
    pub schrodinger_slack: f64,
}

impl MomentReport {
    pub fn sd_a(&self) -> f64 {
        self.var_a.max(0.0).sqrt()
    }

    pub fn sd_h(&self) -> f64 {
        self.var_h.max(0.0).sqrt()
    }

    /// Robertson slack `ΔAΔH - ½|⟨C⟩|`.
    pub fn robertson_slack(&self) -> f64 {
        self.sd_a() * self.sd_h() - 0.5 * self.mean_c.norm()
    }
}

/// Moments of `(A, H)` on `state`.
///
/// Computed from the centred vectors `u = (A - ⟨A⟩)ψ`, `w = (H - ⟨H⟩)ψ`:
/// `ΔA² = ‖u‖²`, `ΔH² = ‖w‖²`, `⟨u|w⟩ = ΔAH + ½⟨[A,H]⟩`. The slack is then
/// the Cauchy–Schwarz gap and stays non-negative up to rounding.
pub fn moment_report(state: &StateVector, a: &Operator, h: &Operator) -> Result<MomentReport> {
    a.require_hermitian()?;
    h.require_hermitian()?;
    state.space.ensure_same(&a.space)?;
    state.space.ensure_same(&h.space)?;
    let psi = state.amplitudes();
    let (mean_a, u) = centred(a, psi);
    let (mean_h, w) = centred(h, psi);
    let var_a = linalg::norm_sqr(&u);
    let var_h = linalg::norm_sqr(&w);
    let uw = linalg::inner(&u, &w);
    let cov_ah = uw.re;
    let mean_c = c64::new(0.0, 2.0 * uw.im);
    let schrodinger_slack = var_a * var_h - uw.norm_sqr();
    Ok(MomentReport {
        mean_a,
        mean_h,
        var_a,
        var_h,
        cov_ah,
        mean_c,
        schrodinger_slack,
    })
}

/// `(⟨M⟩, (M - ⟨M⟩)ψ)` for Hermitian `M`.
fn centred(m: &Operator, psi: &[c64]) -> (f64, Vec<c64>) {
    let mut v = m.apply(psi);
    let mean = linalg::inner(psi, &v).re;
    for (x, p) in v.iter_mut().zip(psi) {
        *x -= p * mean;
    }
    (mean, v)
}

/// Mean and standard deviation of a Hermitian operator.
pub fn mean_and_sd(state: &StateVector, m: &Operator) -> Result<(f64, f64)> {
    m.require_hermitian()?;
    state.space.ensure_same(&m.space)?;
    let (mean, v) = centred(m, state.amplitudes());
    Ok((mean, linalg::norm(&v)))
}

/// Susskind–Glogower moments and uncertainty slacks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SgurReport {
    /// `ΔN̂·ΔĈ - ½|⟨Ŝ⟩|`
    pub slack_c: f64,
    /// `ΔN̂·ΔŜ - ½|⟨Ĉ⟩|`
    pub slack_s: f64,
    pub mean_n: f64,
    pub sd_n: f64,
    pub mean_cos: f64,
    pub sd_cos: f64,
    pub mean_sin: f64,
    pub sd_sin: f64,
}

impl SgurReport {
    /// `ΔŜ/|⟨Ĉ⟩|`, or `None` when `⟨Ĉ⟩` vanishes.
    pub fn phase_spread_from_sine(&self) -> Option<f64> {
        (self.mean_cos.abs() > 1e-12).then(|| self.sd_sin / self.mean_cos.abs())
    }

    /// `ΔĈ/|⟨Ŝ⟩|`, or `None` when `⟨Ŝ⟩` vanishes.
    pub fn phase_spread_from_cosine(&self) -> Option<f64> {
        (self.mean_sin.abs() > 1e-12).then(|| self.sd_cos / self.mean_sin.abs())
    }
}

/// Check the Susskind–Glogower relations `ΔN̂ΔĈ ≥ ½|⟨Ŝ⟩|`, `ΔN̂ΔŜ ≥ ½|⟨Ĉ⟩|`.
pub fn check_sgur(state: &StateVector) -> Result<SgurReport> {
    let HilbertSpec::Fock { dim } = state.space else {
        return Err(Error::InvalidParameter(
            "Susskind-Glogower relations need a Fock state".into(),
        ));
    };
    state.require_trusted()?;
    let n_op = build_fock_operator(FockOp::Number, dim)?;
    let cos = build_fock_operator(FockOp::Cosine, dim)?;
    let sin = build_fock_operator(FockOp::Sine, dim)?;
    let (mean_n, sd_n) = mean_and_sd(state, &n_op)?;
    let (mean_cos, sd_cos) = mean_and_sd(state, &cos)?;
    let (mean_sin, sd_sin) = mean_and_sd(state, &sin)?;
    Ok(SgurReport {
        slack_c: sd_n * sd_cos - 0.5 * mean_sin.abs(),
        slack_s: sd_n * sd_sin - 0.5 * mean_cos.abs(),
        mean_n,
        sd_n,
        mean_cos,
        sd_cos,
        mean_sin,
        sd_sin,
    })
}

/// `λA + iH` as a dense matrix.
pub(crate) fn dense_l_operator(a: &Operator, h: &Operator, lambda: c64) -> Result<Mat<c64>> {
    a.space.ensure_same(&h.space)?;
    let d = a.dimension();
    linalg::check_dense(d)?;
    let mut m = Mat::<c64>::zeros(d, d);
    for (v, (i, j)) in a.entries.iter() {
        m[(i, j)] += lambda * v;
    }
    for (v, (i, j)) in h.entries.iter() {
        m[(i, j)] += I * v;
    }
    Ok(m)
}
