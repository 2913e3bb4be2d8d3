//! Energy accounting for phase probes.
//!
//! A probe with energy `E = ⟨H⟩ - E₀` above the ground state and spread `ΔH`
//! obeys the quantum measurement bound
//! `Δφ ≥ max(κ/(ν E), γ/(√ν ΔH))`. Strategies are classified by
//! `r = E/(ζ ΔH)` with `ζ = κ/γ`: good when `r ∈ [1/band, band]`.

use serde::{Deserialize, Serialize};

use crate::hilbert::{self, moment_report, Operator, Spectrum, StateVector};
use crate::intelligent::SIGNAL_FLOOR;
use crate::{Error, Result};

const DENOM_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub kappa: f64,
    pub gamma: f64,
    pub band: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        BoundConstants {
            kappa: 1.0,
            gamma: 1.0,
            band: 3.0,
        }
    }
}

impl BoundConstants {
    pub fn new(kappa: f64, gamma: f64, band: f64) -> Result<Self> {
        let c = BoundConstants { kappa, gamma, band };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.gamma > 0.0 && self.kappa.is_finite() && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa and gamma must be positive, got {} and {}",
                self.kappa, self.gamma
            )));
        }
        if !(self.band > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "band must exceed 1, got {}",
                self.band
            )));
        }
        Ok(())
    }

    pub fn zeta(&self) -> f64 {
        self.kappa / self.gamma
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Good,
    TooMuchEnergy,
    TooLittleEnergy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub mean_energy: f64,
    pub ground_energy: f64,
    pub energy_above_ground: f64,
    pub sd_energy: f64,
    /// `(⟨H⟩ - E₀)/(ζ ΔH)`.
    pub energy_ratio: f64,
    pub classification: Classification,
}

/// How `E₀` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundEnergy {
    /// Smallest eigenvalue of `H`.
    Spectrum,
    /// Convention value, e.g. zero for a momentum generator whose truncated
    /// spectrum has no physical ground state.
    Fixed(f64),
}

pub fn ground_energy(h: &Operator, how: GroundEnergy) -> Result<f64> {
    h.require_hermitian()?;
    match how {
        GroundEnergy::Fixed(e0) => Ok(e0),
        GroundEnergy::Spectrum => Ok(Spectrum::of(h)?.min()),
    }
}

/// Classification from precomputed `⟨H⟩`, `ΔH` and `E₀`.
pub fn classify_moments(
    mean_energy: f64,
    sd_energy: f64,
    ground_energy: f64,
    constants: &BoundConstants,
) -> Result<StrategyProfile> {
    constants.validate()?;
    if !(sd_energy > DENOM_FLOOR) {
        return Err(Error::DegenerateProbe);
    }
    let energy_above_ground = mean_energy - ground_energy;
    if energy_above_ground < -1e-9 {
        return Err(Error::InvalidParameter(format!(
            "mean energy {mean_energy} lies below the ground energy {ground_energy}"
        )));
    }
    let energy_ratio = energy_above_ground.max(0.0) / (constants.zeta() * sd_energy);
    let classification = if energy_ratio > constants.band {
        Classification::TooMuchEnergy
    } else if energy_ratio < 1.0 / constants.band {
        Classification::TooLittleEnergy
    } else {
        Classification::Good
    };
    Ok(StrategyProfile {
        mean_energy,
        ground_energy,
        energy_above_ground,
        sd_energy,
        energy_ratio,
        classification,
    })
}

pub fn classify_strategy(
    state: &StateVector,
    h: &Operator,
    ground: GroundEnergy,
    constants: &BoundConstants,
) -> Result<StrategyProfile> {
    let (mean, sd) = hilbert::mean_and_sd(state, h)?;
    classify_moments(mean, sd, ground_energy(h, ground)?, constants)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeCountRule {
    /// `N = E_sq / E_cl`.
    EnergyRatio,
    /// `N = E_sq / ΔH_cl`: only the energy the classical probe employs.
    EnergyOverClassicalSd,
    /// `N = ΔH_sq / E_cl`, for classical probes with too little energy.
    SqueezedSdOverClassicalEnergy,
}

impl ProbeCountRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProbeCountRule::EnergyRatio => "energy_ratio",
            ProbeCountRule::EnergyOverClassicalSd => "energy_over_classical_sd",
            ProbeCountRule::SqueezedSdOverClassicalEnergy => "squeezed_sd_over_classical_energy",
        }
    }
}

/// `N` under the rule implied by the classical profile.
pub fn probe_count(sq: &StrategyProfile, cl: &StrategyProfile) -> Result<(f64, ProbeCountRule)> {
    let rule = match cl.classification {
        Classification::Good => ProbeCountRule::EnergyRatio,
        _ => ProbeCountRule::EnergyOverClassicalSd,
    };
    Ok((probe_count_with_rule(sq, cl, rule)?, rule))
}

pub fn probe_count_with_rule(
    sq: &StrategyProfile,
    cl: &StrategyProfile,
    rule: ProbeCountRule,
) -> Result<f64> {
    let (num, den) = match rule {
        ProbeCountRule::EnergyRatio => (sq.energy_above_ground, cl.energy_above_ground),
        ProbeCountRule::EnergyOverClassicalSd => (sq.energy_above_ground, cl.sd_energy),
        ProbeCountRule::SqueezedSdOverClassicalEnergy => (sq.sd_energy, cl.energy_above_ground),
    };
    if !(den > DENOM_FLOOR) {
        return Err(Error::InvalidParameter(format!(
            "probe count denominator vanishes under rule {}",
            rule.as_str()
        )));
    }
    Ok(num / den)
}

/// `max(κ/(ν E), γ/(√ν ΔH))`.
pub fn heisenberg_lower_bound(
    profile: &StrategyProfile,
    nu: u64,
    constants: &BoundConstants,
) -> Result<f64> {
    constants.validate()?;
    if nu == 0 {
        return Err(Error::InvalidParameter("nu must be at least 1".into()));
    }
    if !(profile.energy_above_ground > 0.0 && profile.sd_energy > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bound needs positive energy and spread, got {} and {}",
            profile.energy_above_ground, profile.sd_energy
        )));
    }
    let nu = nu as f64;
    Ok((constants.kappa / (nu * profile.energy_above_ground))
        .max(constants.gamma / (nu.sqrt() * profile.sd_energy)))
}

/// A probe state together with the measured observable and the generator.
#[derive(Clone, Copy, Debug)]
pub struct Probe<'a> {
    pub state: &'a StateVector,
    pub a: &'a Operator,
    pub h: &'a Operator,
    pub ground: GroundEnergy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub profile: StrategyProfile,
    /// `ΔA/|⟨[A,H]⟩|`.
    pub delta_phi: f64,
}

impl Probe<'_> {
    pub fn summarize(&self, constants: &BoundConstants) -> Result<ProbeSummary> {
        let m = moment_report(self.state, self.a, self.h)?;
        let c = m.mean_c.norm();
        if c <= SIGNAL_FLOOR {
            return Err(Error::UnusableProbe(format!("|<[A,H]>| = {c:.3e}")));
        }
        let e0 = ground_energy(self.h, self.ground)?;
        Ok(ProbeSummary {
            profile: classify_moments(m.mean_h, m.sd_h(), e0, constants)?,
            delta_phi: m.sd_a() / c,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub n_probes: f64,
    pub delta_phi_sq: f64,
    pub delta_phi_cl: f64,
    /// `Δφ_sq / Δφ_cl`.
    pub ratio: f64,
    /// `1/N`, or `1/(2κN)` under [`ProbeCountRule::SqueezedSdOverClassicalEnergy`].
    pub predicted: f64,
    pub probe_count_rule: ProbeCountRule,
}

impl GainReport {
    pub fn ratio_times_n(&self) -> f64 {
        self.ratio * self.n_probes
    }
}

/// Compare a squeezed probe against a classical reference, choosing the
/// counting rule from the classical strategy: good probes count energy,
/// too-energetic ones count their spread, and too-weak ones use the energy
/// error model `Δφ_cl = κ/E_cl`.
pub fn gain_report(sq: &Probe, cl: &Probe, constants: &BoundConstants) -> Result<GainReport> {
    let cl_summary = cl.summarize(constants)?;
    let rule = match cl_summary.profile.classification {
        Classification::Good => ProbeCountRule::EnergyRatio,
        Classification::TooMuchEnergy => ProbeCountRule::EnergyOverClassicalSd,
        Classification::TooLittleEnergy => ProbeCountRule::SqueezedSdOverClassicalEnergy,
    };
    gain_from_summaries(&sq.summarize(constants)?, &cl_summary, rule, constants)
}

pub fn gain_report_with_rule(
    sq: &Probe,
    cl: &Probe,
    rule: ProbeCountRule,
    constants: &BoundConstants,
) -> Result<GainReport> {
    gain_from_summaries(&sq.summarize(constants)?, &cl.summarize(constants)?, rule, constants)
}

pub fn gain_from_summaries(
    sq: &ProbeSummary,
    cl: &ProbeSummary,
    rule: ProbeCountRule,
    constants: &BoundConstants,
) -> Result<GainReport> {
    let n = probe_count_with_rule(&sq.profile, &cl.profile, rule)?;
    if !(n > 0.0) {
        return Err(Error::InvalidParameter(format!("probe count {n} is not positive")));
    }
    let (delta_phi_cl, predicted) = match rule {
        ProbeCountRule::SqueezedSdOverClassicalEnergy => (
            constants.kappa / cl.profile.energy_above_ground,
            1.0 / (2.0 * constants.kappa * n),
        ),
        _ => (cl.delta_phi, 1.0 / n),
    };
    Ok(GainReport {
        n_probes: n,
        delta_phi_sq: sq.delta_phi,
        delta_phi_cl,
        ratio: sq.delta_phi / delta_phi_cl,
        predicted,
        probe_count_rule: rule,
    })
}
