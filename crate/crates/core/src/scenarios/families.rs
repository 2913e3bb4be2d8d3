use faer::c64;

use super::{tail_diag, with_auto_dim, Role, RunOptions, ScenarioResult};
use crate::hilbert::{
    build_fock_operator, build_spin_operator, check_sgur, FockOp, Operator, SpinOp, StateVector,
    DEFAULT_FOCK_DIM,
};
use crate::intelligent::{
    default_spin_grid, displaced_squeezed_state, spin_squeezed_search, su2_coherent_state,
    targeted_intelligent_state, IntelligentState, DEFAULT_ACCEPT_TOL,
};
use crate::linalg::ONE;
use crate::resources::{
    gain_report, gain_report_with_rule, Classification, GroundEnergy, Probe, ProbeCountRule,
};
use crate::scenarios::Family;
use crate::{Error, Result};

/// Intelligent `(X, P)` state at `λ` with `⟨X⟩ = 0` and `⟨P⟩ = ΔP = √(λ/2)`.
fn least_energetic(x: &Operator, p: &Operator, lambda: f64) -> Result<IntelligentState> {
    targeted_intelligent_state(
        x,
        p,
        c64::new(lambda, 0.0),
        c64::new(0.0, (lambda / 2.0).sqrt()),
        DEFAULT_ACCEPT_TOL,
    )
}

/// `A = X`, `H = P` with zero ground energy. The squeezed probe is the
/// intelligent state at `λ` with `⟨P⟩ = ΔP = √(λ/2)`; the classical probe is
/// its `λ = 1` counterpart.
pub fn run_position(lambda: f64, opts: &RunOptions) -> Result<ScenarioResult> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::Regime(format!(
            "position family needs lambda >= 1, got {lambda}"
        )));
    }
    let (dim, (x, p, sq, cl)) = with_auto_dim(opts.dim, DEFAULT_FOCK_DIM, |d| {
        let x = build_fock_operator(FockOp::X, d)?;
        let p = build_fock_operator(FockOp::P, d)?;
        let sq = least_energetic(&x, &p, lambda)?;
        let cl = least_energetic(&x, &p, 1.0)?;
        Ok((x, p, sq, cl))
    })?;

    let mut out = ScenarioResult::new(Family::Position, lambda);
    out.dim = Some(dim);
    let ground = GroundEnergy::Fixed(0.0);
    out.flag("ground=fixed_zero");
    let sq_probe = Probe {
        state: &sq.state,
        a: &x,
        h: &p,
        ground,
    };
    let cl_probe = Probe {
        state: &cl.state,
        a: &x,
        h: &p,
        ground,
    };
    let c = &opts.constants;
    let (sq_sum, cl_sum) = (sq_probe.summarize(c)?, cl_probe.summarize(c)?);
    out.record_probe(Role::Squeezed, &sq_sum, c);
    out.record_probe(Role::Classical, &cl_sum, c);
    out.record_gain(gain_report(&sq_probe, &cl_probe, c)?);
    out.diag("residual_sq", sq.residual);
    out.diag("trifonov_max_sq", sq.max_trifonov_residual());
    tail_diag(&mut out, "sq", &sq.state);
    tail_diag(&mut out, "cl", &cl.state);

    out.monte_carlo(Role::Squeezed, &sq_probe, sq_sum.delta_phi, opts);
    out.monte_carlo(Role::Classical, &cl_probe, cl_sum.delta_phi, opts);
    Ok(out)
}

/// Coherent state `|α⟩` with real `α` checked against the Susskind–Glogower
/// relations; `A = Ŝ`, `H = N̂`. There is no squeezed branch.
pub fn run_sg_phase(alpha: f64, opts: &RunOptions) -> Result<ScenarioResult> {
    if alpha == 0.0 {
        return Err(Error::UnusableProbe(
            "the vacuum has <C> = <S> = 0".into(),
        ));
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "SG family needs |alpha| >= 1, got {alpha}"
        )));
    }
    let (dim, state) = with_auto_dim(opts.dim, DEFAULT_FOCK_DIM, |d| {
        let s = StateVector::coherent(c64::new(alpha, 0.0), d)?;
        s.require_trusted()?;
        Ok(s)
    })?;
    let mut out = ScenarioResult::new(Family::SgPhase, alpha);
    out.dim = Some(dim);
    out.flag("no_squeezed_branch");
    tail_diag(&mut out, "cl", &state);

    let sg = check_sgur(&state)?;
    out.diag("sgur_slack_c", sg.slack_c);
    out.diag("sgur_slack_s", sg.slack_s);
    if sg.slack_c < -1e-8 || sg.slack_s < -1e-8 {
        out.flag("sgur_violated");
    }

    let sine = build_fock_operator(FockOp::Sine, dim)?;
    let number = build_fock_operator(FockOp::Number, dim)?;
    let probe = Probe {
        state: &state,
        a: &sine,
        h: &number,
        ground: GroundEnergy::Spectrum,
    };
    let c = &opts.constants;
    let summary = probe.summarize(c)?;
    out.record_probe(Role::Classical, &summary, c);
    out.diag("delta_phi_sqrt_n", summary.delta_phi * sg.mean_n.sqrt());
    out.diag("delta_n_delta_phi", sg.sd_n * summary.delta_phi);

    // Both forms of the phase spread need ⟨Ĉ⟩ and ⟨Ŝ⟩ nonzero.
    let tilted = StateVector::coherent(c64::from_polar(alpha, std::f64::consts::FRAC_PI_3), dim)?;
    let t = check_sgur(&tilted)?;
    if let (Some(from_c), Some(from_s)) = (t.phase_spread_from_cosine(), t.phase_spread_from_sine()) {
        out.diag("phase_spread_from_cosine", from_c);
        out.diag("phase_spread_from_sine", from_s);
        out.diag("phase_spread_rel_diff", (from_c - from_s).abs() / from_s);
    }

    out.monte_carlo(Role::Classical, &probe, summary.delta_phi, opts);
    Ok(out)
}

/// `A = P`, `H = N̂`. Squeezed probe `D(α_sq)S(ξ)|0⟩`, classical probe `|1⟩`
/// coherent; `α_sq` defaults to the balanced split `e^ξ/√2`.
pub fn run_quadrature_phase(
    xi: f64,
    alpha_sq: Option<f64>,
    opts: &RunOptions,
) -> Result<ScenarioResult> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::InvalidParameter(format!("xi must be positive, got {xi}")));
    }
    let balanced = alpha_sq.is_none();
    let alpha = alpha_sq.unwrap_or(xi.exp() * std::f64::consts::FRAC_1_SQRT_2);
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha_sq must be positive, got {alpha}"
        )));
    }
    let (dim, sq) = with_auto_dim(opts.dim, DEFAULT_FOCK_DIM, |d| {
        displaced_squeezed_state(c64::new(alpha, 0.0), xi, d)
    })?;
    let cl = displaced_squeezed_state(ONE, 0.0, dim)?;
    let p = build_fock_operator(FockOp::P, dim)?;
    let n = build_fock_operator(FockOp::Number, dim)?;

    let mut out = ScenarioResult::new(Family::QuadraturePhase, xi);
    out.dim = Some(dim);
    out.flag(if balanced { "split=balanced" } else { "split=custom" });
    out.diag("alpha_sq", alpha);
    out.diag("energy_exact_sq", alpha * alpha + xi.sinh().powi(2));
    out.diag("ratio_exact", (-xi).exp() / alpha);
    tail_diag(&mut out, "sq", &sq);
    tail_diag(&mut out, "cl", &cl);

    let sq_probe = Probe {
        state: &sq,
        a: &p,
        h: &n,
        ground: GroundEnergy::Spectrum,
    };
    let cl_probe = Probe {
        state: &cl,
        a: &p,
        h: &n,
        ground: GroundEnergy::Spectrum,
    };
    let c = &opts.constants;
    let (sq_sum, cl_sum) = (sq_probe.summarize(c)?, cl_probe.summarize(c)?);
    out.record_probe(Role::Squeezed, &sq_sum, c);
    out.record_probe(Role::Classical, &cl_sum, c);
    out.record_gain(gain_report(&sq_probe, &cl_probe, c)?);

    out.monte_carlo(Role::Squeezed, &sq_probe, sq_sum.delta_phi, opts);
    out.monte_carlo(Role::Classical, &cl_probe, cl_sum.delta_phi, opts);
    Ok(out)
}

/// `A = Jx`, `H = -Jy`. Classical probe `|j;-j⟩`, squeezed probe from the
/// eigenstate search. Coherent spin states carry too much energy, so `N`
/// counts the classical spread: `N = (⟨H⟩_sq - E₀)/ΔH_cl`.
pub fn run_spin(two_j: usize, opts: &RunOptions) -> Result<ScenarioResult> {
    if two_j < 8 {
        return Err(Error::InvalidParameter(format!(
            "spin family needs two_j >= 8, got {two_j}"
        )));
    }
    let jx = build_spin_operator(SpinOp::Jx, two_j)?;
    let h = build_spin_operator(SpinOp::Jy, two_j)?.scale(-ONE);
    let cl = su2_coherent_state(two_j, 0.0, 0.0)?;
    let grid = opts
        .lambda_grid
        .clone()
        .unwrap_or_else(|| default_spin_grid(two_j));
    let sq = spin_squeezed_search(two_j, &grid)?;

    let mut out = ScenarioResult::new(Family::SpinRotation, two_j as f64);
    let sq_probe = Probe {
        state: &sq.state,
        a: &jx,
        h: &h,
        ground: GroundEnergy::Spectrum,
    };
    let cl_probe = Probe {
        state: &cl,
        a: &jx,
        h: &h,
        ground: GroundEnergy::Spectrum,
    };
    let c = &opts.constants;
    let (sq_sum, cl_sum) = (sq_probe.summarize(c)?, cl_probe.summarize(c)?);
    out.record_probe(Role::Squeezed, &sq_sum, c);
    out.record_probe(Role::Classical, &cl_sum, c);
    let gain = gain_report_with_rule(
        &sq_probe,
        &cl_probe,
        ProbeCountRule::EnergyOverClassicalSd,
        c,
    )?;
    out.flag("rule_forced");
    if cl_sum.profile.classification != Classification::TooMuchEnergy {
        out.flag("rule_forced_against_classification");
    }
    out.diag("ratio_over_two_over_n", gain.ratio / (2.0 / gain.n_probes));
    out.record_gain(gain);
    out.diag("lambda_sq", sq.lambda.lambda().re);
    out.diag("residual_sq", sq.residual);
    out.diag("trifonov_max_sq", sq.max_trifonov_residual());

    out.monte_carlo(Role::Squeezed, &sq_probe, sq_sum.delta_phi, opts);
    out.monte_carlo(Role::Classical, &cl_probe, cl_sum.delta_phi, opts);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_mc() -> RunOptions {
        RunOptions {
            monte_carlo: false,
            ..RunOptions::default()
        }
    }

    #[test]
    fn position_lambda_nine() {
        let r = run_position(9.0, &no_mc()).unwrap();
        let g = r.gain.unwrap();
        assert!((g.n_probes / 3.0 - 1.0).abs() < 0.05);
        assert!((g.ratio * 3.0 - 1.0).abs() < 0.05);
        assert!(r.flags.contains(&"rule=energy_ratio".to_string()));
    }

    #[test]
    fn position_lambda_one_is_self_comparison() {
        let g = run_position(1.0, &no_mc()).unwrap().gain.unwrap();
        assert!((g.n_probes - 1.0).abs() < 1e-9);
        assert!((g.ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn position_rejects_small_lambda() {
        assert!(matches!(run_position(0.5, &no_mc()), Err(Error::Regime(_))));
    }

    #[test]
    fn sg_vacuum_is_unusable() {
        assert!(matches!(run_sg_phase(0.0, &no_mc()), Err(Error::UnusableProbe(_))));
    }

    #[test]
    fn sg_relations_hold_for_alpha_four() {
        let r = run_sg_phase(4.0, &no_mc()).unwrap();
        assert!(r.diagnostics["sgur_slack_c"] >= -1e-8);
        assert!(r.diagnostics["sgur_slack_s"] >= -1e-8);
        assert!(r.diagnostics["phase_spread_rel_diff"] <= 0.05);
        assert!(r.gain.is_none());
    }

    #[test]
    fn quadrature_balanced_xi_two() {
        let r = run_quadrature_phase(2.0, None, &no_mc()).unwrap();
        let g = r.gain.unwrap();
        assert!((g.ratio - 2f64.sqrt() * (-4f64).exp()).abs() < 1e-6);
        assert!((1.0..=2.0).contains(&g.ratio_times_n()));
    }

    #[test]
    fn quadrature_unbalanced_is_worse() {
        let bal = run_quadrature_phase(2.0, None, &no_mc()).unwrap();
        let unb = run_quadrature_phase(2.0, Some(10.0 * 2f64.exp()), &no_mc()).unwrap();
        assert!(unb.gain.unwrap().ratio_times_n() > bal.gain.unwrap().ratio_times_n());
    }

    #[test]
    fn spin_j8_counts_four_probes() {
        let r = run_spin(16, &no_mc()).unwrap();
        let g = r.gain.unwrap();
        assert!((g.n_probes - 4.0).abs() < 1e-9);
        assert!(g.ratio <= 1.5 * 2.0 / g.n_probes);
        assert!((r.delta_phi_cl.unwrap() - 0.25).abs() < 1e-9);
    }
}
