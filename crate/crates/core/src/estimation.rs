//! Phase encoding `ψ_φ = e^{iHφ}ψ`, projective sampling of `A`, and
//! method-of-moments inversion of the response curve `⟨A⟩(φ)`.

use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hilbert::{self, commutator, Operator, Spectrum, StateVector};
use crate::intelligent::SIGNAL_FLOOR;
use crate::linalg;
use crate::{Error, Result};

pub const DEFAULT_CURVE_POINTS: usize = 2001;
pub const DEFAULT_HALF_WIDTH: f64 = std::f64::consts::FRAC_PI_2;
const INVERSION_TOL: f64 = 1e-12;

/// `e^{iHφ}ψ`.
pub fn evolve(state: &StateVector, h: &Operator, phi: f64) -> Result<StateVector> {
    check_space(state, h)?;
    let spectrum = Spectrum::of(h)?;
    Ok(StateVector::from_normalized(
        state.space(),
        spectrum.exp_i(state.amplitudes(), phi),
    ))
}

fn check_space(state: &StateVector, op: &Operator) -> Result<()> {
    if state.space() != op.space() {
        return Err(Error::DimensionMismatch {
            left: state.dimension(),
            right: op.dimension(),
        });
    }
    Ok(())
}

/// `⟨A⟩` and `∂_φ⟨A⟩ = -i⟨[H, A]⟩ = 2 Im⟨Hψ|Aψ⟩` on one vector.
fn mean_and_slope(a: &Operator, h: &Operator, psi: &[c64]) -> (f64, f64) {
    let ap = a.apply(psi);
    let hp = h.apply(psi);
    (linalg::inner(psi, &ap).re, 2.0 * linalg::inner(&hp, &ap).im)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    /// `Re(-i⟨[H, A]⟩)` on the evolved state.
    pub analytic: f64,
    /// Imaginary part of `-i⟨[H, A]⟩`; zero up to rounding.
    pub analytic_imag: f64,
    /// Centered difference of `⟨A⟩`.
    pub numeric: f64,
}

impl DerivativeCheck {
    pub fn relative_error(&self) -> f64 {
        (self.analytic - self.numeric).abs() / self.analytic.abs().max(1.0)
    }
}

pub fn derivative_identity_check(
    state: &StateVector,
    a: &Operator,
    h: &Operator,
    phi: f64,
    step: f64,
) -> Result<DerivativeCheck> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    a.require_hermitian()?;
    check_space(state, a)?;
    check_space(state, h)?;
    let spectrum = Spectrum::of(h)?;
    let psi = spectrum.exp_i(state.amplitudes(), phi);
    let c = commutator(h, a)?;
    let d = linalg::inner(&psi, &c.apply(&psi)) * c64::new(0.0, -1.0);
    let mean_at = |p: f64| {
        let v = spectrum.exp_i(state.amplitudes(), p);
        linalg::inner(&v, &a.apply(&v)).re
    };
    Ok(DerivativeCheck {
        analytic: d.re,
        analytic_imag: d.im,
        numeric: (mean_at(phi + step) - mean_at(phi - step)) / (2.0 * step),
    })
}

/// `ΔA/|⟨[A, H]⟩|`.
pub fn analytic_delta_phi(state: &StateVector, a: &Operator, h: &Operator) -> Result<f64> {
    let m = hilbert::moment_report(state, a, h)?;
    let c = m.mean_c.norm();
    if c <= SIGNAL_FLOOR {
        return Err(Error::UnusableProbe(format!("|<[A,H]>| = {c:.3e}")));
    }
    Ok(m.sd_a() / c)
}

/// Born-rule distribution over the eigenvalues of a Hermitian observable.
#[derive(Clone, Debug)]
pub struct OutcomeDistribution {
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(state: &StateVector, spectrum: &Spectrum) -> Self {
        let probs = spectrum.probabilities(state);
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        OutcomeDistribution {
            values: spectrum.values().to_vec(),
            cumulative,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let total = *self.cumulative.last().expect("non-empty spectrum");
        let u = rng.random::<f64>() * total;
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.values[k.min(self.values.len() - 1)]
    }

    /// Mean of `shots` independent draws.
    pub fn sample_mean<R: Rng + ?Sized>(&self, rng: &mut R, shots: usize) -> f64 {
        (0..shots).map(|_| self.sample(rng)).sum::<f64>() / shots as f64
    }
}

pub fn sample_outcomes(
    state: &StateVector,
    a: &Operator,
    shots: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    check_space(state, a)?;
    let dist = OutcomeDistribution::new(state, &Spectrum::of(a)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..shots).map(|_| dist.sample(&mut rng)).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResponseCurve {
    pub phi_grid: Vec<f64>,
    pub mean_a: Vec<f64>,
    pub derivative: Vec<f64>,
    /// Index range of the monotone window, inclusive.
    window: (usize, usize),
    pub monotone_window: (f64, f64),
}

impl ResponseCurve {
    /// `⟨A⟩(φ)` on `points` equally spaced angles within `center ± half_width`.
    pub fn build(
        state: &StateVector,
        a: &Operator,
        h: &Operator,
        center: f64,
        half_width: f64,
        points: usize,
    ) -> Result<Self> {
        Self::with_spectrum(state, a, h, &Spectrum::of(h)?, center, half_width, points)
    }

    pub fn with_spectrum(
        state: &StateVector,
        a: &Operator,
        h: &Operator,
        spectrum: &Spectrum,
        center: f64,
        half_width: f64,
        points: usize,
    ) -> Result<Self> {
        if points < 3 || !(half_width > 0.0) {
            return Err(Error::InvalidParameter(
                "response curve needs at least 3 points and a positive width".into(),
            ));
        }
        a.require_hermitian()?;
        check_space(state, a)?;
        check_space(state, h)?;
        let points = points | 1;
        let step = 2.0 * half_width / (points - 1) as f64;
        let phi_grid: Vec<f64> = (0..points)
            .map(|k| center - half_width + k as f64 * step)
            .collect();
        let evolved = spectrum.exp_i_batch(state.amplitudes(), &phi_grid);
        let (mean_a, derivative): (Vec<f64>, Vec<f64>) = (0..points)
            .into_par_iter()
            .map(|k| mean_and_slope(a, h, &linalg::column(&evolved, k)))
            .unzip();
        let window = monotone_window(&mean_a, points / 2);
        Ok(ResponseCurve {
            monotone_window: (phi_grid[window.0], phi_grid[window.1]),
            phi_grid,
            mean_a,
            derivative,
            window,
        })
    }

    pub fn center_index(&self) -> usize {
        self.phi_grid.len() / 2
    }

    /// Range of `⟨A⟩` over the monotone window.
    pub fn mean_range(&self) -> (f64, f64) {
        let (x, y) = (self.mean_a[self.window.0], self.mean_a[self.window.1]);
        (x.min(y), x.max(y))
    }

    /// `φ` in the monotone window with `⟨A⟩(φ) = target`.
    pub fn invert(&self, target: f64) -> Result<f64> {
        let (lo, hi) = self.window;
        let (min, max) = self.mean_range();
        if lo == hi || !(min..=max).contains(&target) {
            return Err(Error::OutOfRange {
                mean: target,
                lo: min,
                hi: max,
            });
        }
        let increasing = self.mean_a[hi] > self.mean_a[lo];
        // s(k) ≥ 0 once the curve has passed the target.
        let passed = |v: f64| if increasing { v >= target } else { v <= target };
        let k = lo + self.mean_a[lo..=hi].partition_point(|&v| !passed(v));
        if k == lo {
            return Ok(self.phi_grid[lo]);
        }
        let (i, j) = (k - 1, k.min(hi));
        let (x0, x1) = (self.phi_grid[i], self.phi_grid[j]);
        let h = x1 - x0;
        let (y0, y1, d0, d1) = (
            self.mean_a[i],
            self.mean_a[j],
            self.derivative[i] * h,
            self.derivative[j] * h,
        );
        let hermite = |t: f64| {
            let (t2, t3) = (t * t, t * t * t);
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                + (t3 - 2.0 * t2 + t) * d0
                + (-2.0 * t3 + 3.0 * t2) * y1
                + (t3 - t2) * d1
        };
        let (mut a, mut b) = (0.0f64, 1.0f64);
        while (b - a) * h > INVERSION_TOL {
            let m = 0.5 * (a + b);
            if passed(hermite(m)) {
                b = m;
            } else {
                a = m;
            }
        }
        Ok(x0 + 0.5 * (a + b) * h)
    }
}

/// Largest index window around `center` on which `values` is strictly
/// monotone in the direction of the step that leaves `center`.
fn monotone_window(values: &[f64], center: usize) -> (usize, usize) {
    let n = values.len();
    let dir = |i: usize| (values[i + 1] - values[i]).partial_cmp(&0.0);
    let sign = if center + 1 < n { dir(center) } else { dir(center - 1) };
    let Some(sign) = sign.filter(|s| s.is_ne()) else {
        return (center, center);
    };
    let mut lo = center;
    while lo > 0 && dir(lo - 1) == Some(sign) {
        lo -= 1;
    }
    let mut hi = center;
    while hi + 1 < n && dir(hi) == Some(sign) {
        hi += 1;
    }
    (lo, hi)
}

/// Sample-mean inversion.
pub fn estimate_phi(outcomes: &[f64], curve: &ResponseCurve) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput("outcome vector".into()));
    }
    curve.invert(outcomes.iter().sum::<f64>() / outcomes.len() as f64)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimationRun {
    pub phi_true: f64,
    pub shots: usize,
    pub trials: usize,
    pub seed: u64,
    pub estimates: Vec<f64>,
    pub empirical_rmse: f64,
    /// `Δφ/√ν` with `Δφ = ΔA/|∂_φ⟨A⟩|` at `phi_true`.
    pub analytic_rmse: f64,
    pub analytic_delta_phi: f64,
    pub bias: f64,
}

/// Evolve the probe to `phi_true`, draw `shots` outcomes of `A` per trial,
/// and invert each sample mean on a response curve centred at `phi_true`.
///
/// Trial `t` uses stream `t` of a ChaCha8 generator seeded with `seed`, so
/// results do not depend on thread scheduling.
pub fn run_estimation(
    probe: &StateVector,
    a: &Operator,
    h: &Operator,
    phi_true: f64,
    shots: usize,
    trials: usize,
    seed: u64,
) -> Result<EstimationRun> {
    if shots == 0 || trials == 0 {
        return Err(Error::InvalidParameter("shots and trials must be at least 1".into()));
    }
    let h_spec = Spectrum::of(h)?;
    let a_spec = Spectrum::of(a)?;
    let curve = ResponseCurve::with_spectrum(
        probe,
        a,
        h,
        &h_spec,
        phi_true,
        DEFAULT_HALF_WIDTH,
        DEFAULT_CURVE_POINTS,
    )?;
    let centre = curve.center_index();
    let slope = curve.derivative[centre].abs();
    if slope <= SIGNAL_FLOOR {
        return Err(Error::UnusableProbe(format!(
            "zero slope of <A> at phi = {phi_true}"
        )));
    }
    let evolved = StateVector::from_normalized(
        probe.space(),
        h_spec.exp_i(probe.amplitudes(), phi_true),
    );
    let (_, sd_a) = hilbert::mean_and_sd(&evolved, a)?;
    let delta_phi = sd_a / slope;
    let dist = OutcomeDistribution::new(&evolved, &a_spec);

    let estimates = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            curve.invert(dist.sample_mean(&mut rng, shots))
        })
        .collect::<Result<Vec<f64>>>()?;

    let n = trials as f64;
    let mse = estimates.iter().map(|e| (e - phi_true).powi(2)).sum::<f64>() / n;
    let bias = estimates.iter().sum::<f64>() / n - phi_true;
    Ok(EstimationRun {
        phi_true,
        shots,
        trials,
        seed,
        estimates,
        empirical_rmse: mse.sqrt(),
        analytic_rmse: delta_phi / (shots as f64).sqrt(),
        analytic_delta_phi: delta_phi,
        bias,
    })
}

/// Angle in `±half_width` closest to zero whose slope `|∂_φ⟨A⟩|` is within
/// 5% of the largest slope on the window.
pub fn working_point(state: &StateVector, a: &Operator, h: &Operator) -> Result<f64> {
    let curve = ResponseCurve::build(state, a, h, 0.0, DEFAULT_HALF_WIDTH, 401)?;
    let max = curve.derivative.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if max <= SIGNAL_FLOOR {
        return Err(Error::UnusableProbe("response curve is flat".into()));
    }
    let best = (0..curve.phi_grid.len())
        .filter(|&k| curve.derivative[k].abs() >= 0.95 * max)
        .min_by(|&x, &y| curve.phi_grid[x].abs().total_cmp(&curve.phi_grid[y].abs()))
        .expect("the maximum itself qualifies");
    Ok(curve.phi_grid[best])
}

/// Least-squares slope and r² of `ln y` against `ln x`.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter("fit needs two or more paired points".into()));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit abscissae are all equal".into()));
    }
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((sxy / sxx, r2))
}
