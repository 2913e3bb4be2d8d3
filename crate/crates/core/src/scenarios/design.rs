use faer::c64;
use rayon::prelude::*;
use serde::Serialize;

use super::{tail_diag, Family, Role, RunOptions, ScenarioResult};
use crate::hilbert::{Operator, Spectrum};
use crate::intelligent::{
    solve_intelligent_states, targeted_intelligent_state, IntelligentState, DEFAULT_ACCEPT_TOL,
};
use crate::resources::{
    gain_from_summaries, ground_energy, BoundConstants, Classification, GroundEnergy, Probe,
    ProbeCountRule, ProbeSummary,
};
use crate::{Error, Result};

/// Relative slack allowed above the energy budget.
const BUDGET_TOL: f64 = 1e-3;

/// Why no state qualified, with enough context to pick a new budget or grid.
#[derive(Clone, Debug, Serialize)]
pub struct InfeasibilityReport {
    pub reason: String,
    pub budget: f64,
    pub ground_energy: f64,
    pub lambda_grid: Vec<f64>,
    /// Trusted, usable eigenstates examined.
    pub candidates: usize,
    /// Candidates within budget but outside the good band.
    pub within_budget: usize,
    /// Smallest `ζΔH` over all candidates.
    pub min_zeta_sd_energy: Option<f64>,
}

/// `2^{k/4}` for `k = -8..=24`: λ from 1/4 to 64.
pub fn default_design_grid() -> Vec<f64> {
    (-8..=24).map(|k| 2f64.powf(k as f64 / 4.0)).collect()
}

struct Candidate {
    state: IntelligentState,
    summary: ProbeSummary,
}

impl Candidate {
    fn energy(&self) -> f64 {
        self.summary.profile.energy_above_ground
    }

    fn log_ratio(&self) -> f64 {
        self.summary.profile.energy_ratio.ln().abs()
    }
}

fn summarize(
    s: IntelligentState,
    a: &Operator,
    h: &Operator,
    e0: f64,
    c: &BoundConstants,
) -> Option<Candidate> {
    if !s.usable {
        return None;
    }
    let summary = Probe {
        state: &s.state,
        a,
        h,
        ground: GroundEnergy::Fixed(e0),
    }
    .summarize(c)
    .ok()?;
    Some(Candidate { state: s, summary })
}

/// Full spectrum of `L(λ)` plus the eigenvector aimed at `⟨H⟩ - E₀ = energy`.
fn candidates_at(
    a: &Operator,
    h: &Operator,
    lambda: f64,
    target: c64,
    e0: f64,
    c: &BoundConstants,
) -> Vec<Candidate> {
    let l = c64::new(lambda, 0.0);
    let mut states = solve_intelligent_states(a, h, l, DEFAULT_ACCEPT_TOL).unwrap_or_default();
    if let Ok(t) = targeted_intelligent_state(a, h, l, target, DEFAULT_ACCEPT_TOL) {
        let fresh = states
            .iter()
            .all(|s| s.state.overlap(&t.state).map_or(true, |o| o.norm() < 1.0 - 1e-8));
        if fresh {
            states.push(t);
        }
    }
    states
        .into_iter()
        .filter_map(|s| summarize(s, a, h, e0, c))
        .collect()
}

/// Classical reference among `λ = 1` eigenstates: the one closest to the
/// centre of the good band. The targeted state is re-aimed at `E₀ + ζΔH` for
/// a few rounds since `ΔH` depends on where it lands.
fn classical_reference(
    a: &Operator,
    h: &Operator,
    a_mid: f64,
    e0: f64,
    c: &BoundConstants,
) -> Option<Candidate> {
    let mut pool = candidates_at(a, h, 1.0, c64::new(a_mid, e0), e0, c);
    let mut sd = pool.iter().map(|s| s.summary.profile.sd_energy).next();
    for _ in 0..3 {
        let Some(d) = sd else { break };
        let target = c64::new(a_mid, e0 + c.zeta() * d);
        let Ok(t) = targeted_intelligent_state(a, h, c64::new(1.0, 0.0), target, DEFAULT_ACCEPT_TOL)
        else {
            break;
        };
        let Some(cand) = summarize(t, a, h, e0, c) else {
            break;
        };
        sd = Some(cand.summary.profile.sd_energy);
        pool.push(cand);
    }
    pool.into_iter()
        .min_by(|x, y| x.log_ratio().total_cmp(&y.log_ratio()))
}

/// Design a squeezed probe for `(A, H)` under an energy budget.
///
/// Over `grid`, collects the trusted eigenstates of `λA + iH` together with
/// the eigenvector aimed at `⟨H⟩ - E₀ = budget`. Among good strategies within
/// the budget, picks the one minimizing `|ln(E/budget)| + |ln r|`, then
/// compares it with the best good `λ = 1` reference.
pub fn design_protocol(
    a: &Operator,
    h: &Operator,
    budget: f64,
    ground: GroundEnergy,
    grid: &[f64],
    opts: &RunOptions,
) -> Result<ScenarioResult> {
    a.require_hermitian()?;
    h.require_hermitian()?;
    if a.space() != h.space() {
        return Err(Error::DimensionMismatch {
            left: a.dimension(),
            right: h.dimension(),
        });
    }
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "energy budget must be positive, got {budget}"
        )));
    }
    if grid.is_empty() {
        return Err(Error::EmptyInput("lambda grid".into()));
    }
    if let Some(bad) = grid.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::Regime(format!("lambda must be positive, got {bad}")));
    }
    let c = &opts.constants;
    c.validate()?;
    let e0 = ground_energy(h, ground)?;
    let a_spec = Spectrum::of(a)?;
    let a_mid = 0.5 * (a_spec.min() + a_spec.values().iter().copied().fold(f64::MIN, f64::max));

    let all: Vec<Candidate> = grid
        .par_iter()
        .flat_map_iter(|&l| {
            let target = c64::new(l * a_mid, e0 + budget);
            candidates_at(a, h, l, target, e0, c)
        })
        .collect();

    let in_budget = |x: &&Candidate| x.energy() <= budget * (1.0 + BUDGET_TOL);
    let score = |x: &Candidate| (x.energy() / budget).ln().abs() + x.log_ratio();
    let best = all
        .iter()
        .filter(in_budget)
        .filter(|x| x.summary.profile.classification == Classification::Good)
        .min_by(|x, y| score(x).total_cmp(&score(y)));
    let Some(best) = best else {
        let report = InfeasibilityReport {
            reason: format!(
                "no good strategy with energy at most {budget} above the ground energy"
            ),
            budget,
            ground_energy: e0,
            lambda_grid: grid.to_vec(),
            candidates: all.len(),
            within_budget: all.iter().filter(in_budget).count(),
            min_zeta_sd_energy: all
                .iter()
                .map(|x| c.zeta() * x.summary.profile.sd_energy)
                .min_by(f64::total_cmp),
        };
        return Err(Error::Infeasible(Box::new(report)));
    };

    let mut out = ScenarioResult::new(Family::Custom, budget);
    if a.space().is_fock() {
        out.dim = Some(a.dimension());
    }
    out.record_probe(Role::Squeezed, &best.summary, c);
    out.diag("lambda_selected", best.state.lambda.lambda().re);
    out.diag("eigenvalue_re", best.state.eigenvalue.re);
    out.diag("eigenvalue_im", best.state.eigenvalue.im);
    out.diag("residual_sq", best.state.residual);
    out.diag("trifonov_max_sq", best.state.max_trifonov_residual());
    out.diag("energy_sq", best.energy());
    out.diag("candidates", all.len() as f64);
    tail_diag(&mut out, "sq", &best.state.state);

    let sq_probe = Probe {
        state: &best.state.state,
        a,
        h,
        ground: GroundEnergy::Fixed(e0),
    };
    match classical_reference(a, h, a_mid, e0, c) {
        Some(cl) => {
            out.record_probe(Role::Classical, &cl.summary, c);
            tail_diag(&mut out, "cl", &cl.state.state);
            let rule = match cl.summary.profile.classification {
                Classification::Good => ProbeCountRule::EnergyRatio,
                Classification::TooMuchEnergy => {
                    out.flag("classical_reference=fallback");
                    ProbeCountRule::EnergyOverClassicalSd
                }
                Classification::TooLittleEnergy => {
                    out.flag("classical_reference=fallback");
                    ProbeCountRule::SqueezedSdOverClassicalEnergy
                }
            };
            out.record_gain(gain_from_summaries(&best.summary, &cl.summary, rule, c)?);
            let cl_probe = Probe {
                state: &cl.state.state,
                a,
                h,
                ground: GroundEnergy::Fixed(e0),
            };
            out.monte_carlo(Role::Squeezed, &sq_probe, best.summary.delta_phi, opts);
            out.monte_carlo(Role::Classical, &cl_probe, cl.summary.delta_phi, opts);
        }
        None => {
            out.flag("no_classical_reference");
            out.monte_carlo(Role::Squeezed, &sq_probe, best.summary.delta_phi, opts);
        }
    }
    Ok(out)
}
