//! End-to-end reproductions of the four probe families, the protocol
//! designer, and parameter sweeps.
//!
//! Every run compares a squeezed probe with a classical one, cross-checks the
//! analytic errors by Monte Carlo where that is meaningful, and records why
//! any check was skipped in `flags`.

mod design;
mod families;

pub use design::{default_design_grid, design_protocol, InfeasibilityReport};
pub use families::{run_position, run_quadrature_phase, run_sg_phase, run_spin};

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimation::{self, EstimationRun};
use crate::hilbert::{self, Operator, StateVector};
use crate::resources::{
    heisenberg_lower_bound, BoundConstants, GainReport, GroundEnergy, Probe, ProbeSummary,
    StrategyProfile,
};
use crate::{Error, Result};

/// Monte Carlo needs the dense spectrum of `A`; skip it above this size.
pub const MC_DENSE_LIMIT: usize = 1024;

/// Largest truncation tried by automatic sizing.
pub const AUTO_DIM_LIMIT: usize = 16384;

/// Phase estimates are only meaningful when `Δφ < 2π/20`.
pub const PERIODICITY_LIMIT: f64 = 2.0 * std::f64::consts::PI / 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Position,
    SgPhase,
    QuadraturePhase,
    SpinRotation,
    Custom,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Position => "position",
            Family::SgPhase => "sg_phase",
            Family::QuadraturePhase => "quadrature_phase",
            Family::SpinRotation => "spin_rotation",
            Family::Custom => "custom",
        }
    }

    /// Accepts the canonical names plus the short forms `sg`, `quadrature`
    /// and `spin`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "position" => Ok(Family::Position),
            "sg" | "sg_phase" => Ok(Family::SgPhase),
            "quadrature" | "quadrature_phase" => Ok(Family::QuadraturePhase),
            "spin" | "spin_rotation" => Ok(Family::SpinRotation),
            "custom" => Ok(Family::Custom),
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }

    /// Whether `φ` is an angle, so that the periodicity gate applies.
    pub fn is_phase(&self) -> bool {
        matches!(
            self,
            Family::SgPhase | Family::QuadraturePhase | Family::SpinRotation
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyParams {
    Position {
        lambda: f64,
    },
    #[serde(alias = "sg")]
    SgPhase {
        alpha: f64,
    },
    #[serde(alias = "quadrature")]
    QuadraturePhase {
        xi: f64,
        /// Displacement of the squeezed probe; `e^ξ/√2` (balanced) when absent.
        #[serde(default)]
        alpha_sq: Option<f64>,
    },
    #[serde(alias = "spin")]
    SpinRotation {
        two_j: usize,
    },
    Custom {
        a: PathBuf,
        h: PathBuf,
        budget: f64,
        /// Convention ground energy; the spectrum minimum of `H` when absent.
        #[serde(default)]
        ground: Option<f64>,
    },
}

impl FamilyParams {
    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Position { .. } => Family::Position,
            FamilyParams::SgPhase { .. } => Family::SgPhase,
            FamilyParams::QuadraturePhase { .. } => Family::QuadraturePhase,
            FamilyParams::SpinRotation { .. } => Family::SpinRotation,
            FamilyParams::Custom { .. } => Family::Custom,
        }
    }

    /// The swept scalar: λ, |α|, ξ, 2j or the energy budget.
    pub fn param(&self) -> f64 {
        match self {
            FamilyParams::Position { lambda } => *lambda,
            FamilyParams::SgPhase { alpha } => *alpha,
            FamilyParams::QuadraturePhase { xi, .. } => *xi,
            FamilyParams::SpinRotation { two_j } => *two_j as f64,
            FamilyParams::Custom { budget, .. } => *budget,
        }
    }

    /// Same family with the swept scalar replaced.
    pub fn with_param(&self, value: f64) -> Result<Self> {
        let mut p = self.clone();
        match &mut p {
            FamilyParams::Position { lambda } => *lambda = value,
            FamilyParams::SgPhase { alpha } => *alpha = value,
            FamilyParams::QuadraturePhase { xi, .. } => *xi = value,
            FamilyParams::SpinRotation { two_j } => {
                if value.fract() != 0.0 || value < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "two_j must be a non-negative integer, got {value}"
                    )));
                }
                *two_j = value as usize;
            }
            FamilyParams::Custom { budget, .. } => *budget = value,
        }
        Ok(p)
    }
}

fn default_seed() -> u64 {
    0
}
fn default_shots() -> usize {
    10_000
}
fn default_trials() -> usize {
    200
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Fock truncation; chosen automatically when absent.
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub constants: BoundConstants,
    #[serde(default = "default_true")]
    pub monte_carlo: bool,
    /// λ grid for the spin search and the designer.
    #[serde(default)]
    pub lambda_grid: Option<Vec<f64>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            dim: None,
            seed: default_seed(),
            shots: default_shots(),
            trials: default_trials(),
            constants: BoundConstants::default(),
            monte_carlo: true,
            lambda_grid: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(flatten)]
    pub params: FamilyParams,
    #[serde(flatten)]
    pub options: RunOptions,
}

impl ScenarioConfig {
    pub fn new(params: FamilyParams) -> Self {
        ScenarioConfig {
            params,
            options: RunOptions::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.options.constants.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub family: Family,
    pub param: f64,
    /// Fock truncation used, absent for spin spaces.
    pub dim: Option<usize>,
    pub gain: Option<GainReport>,
    pub sq_profile: Option<StrategyProfile>,
    pub cl_profile: Option<StrategyProfile>,
    pub delta_phi_sq: Option<f64>,
    pub delta_phi_cl: Option<f64>,
    pub sq_run: Option<EstimationRun>,
    pub cl_run: Option<EstimationRun>,
    /// Validity notes and the rules applied, e.g. `rule=energy_ratio`.
    pub flags: Vec<String>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl ScenarioResult {
    fn new(family: Family, param: f64) -> Self {
        ScenarioResult {
            family,
            param,
            dim: None,
            gain: None,
            sq_profile: None,
            cl_profile: None,
            delta_phi_sq: None,
            delta_phi_cl: None,
            sq_run: None,
            cl_run: None,
            flags: Vec::new(),
            diagnostics: BTreeMap::new(),
        }
    }

    fn flag(&mut self, f: impl Into<String>) {
        self.flags.push(f.into());
    }

    fn diag(&mut self, key: &str, value: f64) {
        self.diagnostics.insert(key.to_string(), value);
    }

    fn record_gain(&mut self, gain: GainReport) {
        self.flag(format!("rule={}", gain.probe_count_rule.as_str()));
        self.diag("ratio_times_n", gain.ratio_times_n());
        self.gain = Some(gain);
    }

    /// Store a probe's profile, analytic error and its measurement bound.
    fn record_probe(&mut self, role: Role, summary: &ProbeSummary, constants: &BoundConstants) {
        let tag = role.tag();
        self.flag(format!(
            "{tag}_class={}",
            class_name(summary.profile.classification)
        ));
        match heisenberg_lower_bound(&summary.profile, 1, constants) {
            Ok(bound) => {
                self.diag(&format!("bound_{tag}"), bound);
                // Equality is exact for minimum-uncertainty probes.
                if summary.delta_phi < 0.5 * bound * (1.0 - 1e-9) {
                    self.flag(format!("bound_violated_{tag}"));
                }
            }
            Err(_) => self.flag(format!("bound_undefined_{tag}")),
        }
        match role {
            Role::Squeezed => {
                self.sq_profile = Some(summary.profile);
                self.delta_phi_sq = Some(summary.delta_phi);
            }
            Role::Classical => {
                self.cl_profile = Some(summary.profile);
                self.delta_phi_cl = Some(summary.delta_phi);
            }
        }
    }

    /// Monte Carlo cross-check of one probe, gated on size and periodicity.
    fn monte_carlo(&mut self, role: Role, probe: &Probe, delta_phi: f64, opts: &RunOptions) {
        let tag = role.tag();
        if !opts.monte_carlo {
            return;
        }
        if probe.state.dimension() > MC_DENSE_LIMIT {
            self.flag(format!("mc_skipped_{tag}=dim"));
            return;
        }
        if self.family.is_phase() && delta_phi >= PERIODICITY_LIMIT {
            self.flag(format!("mc_skipped_{tag}=periodicity"));
            return;
        }
        let seed = derive_seed(opts.seed, role as u64);
        let run = estimation::working_point(probe.state, probe.a, probe.h).and_then(|phi| {
            estimation::run_estimation(
                probe.state,
                probe.a,
                probe.h,
                phi,
                opts.shots,
                opts.trials,
                seed,
            )
        });
        match run {
            Ok(run) => match role {
                Role::Squeezed => self.sq_run = Some(run),
                Role::Classical => self.cl_run = Some(run),
            },
            Err(e) => self.flag(format!("mc_failed_{tag}={}", e.kind())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Squeezed = 0,
    Classical = 1,
}

impl Role {
    fn tag(&self) -> &'static str {
        match self {
            Role::Squeezed => "sq",
            Role::Classical => "cl",
        }
    }
}

fn class_name(c: crate::resources::Classification) -> &'static str {
    use crate::resources::Classification::*;
    match c {
        Good => "good",
        TooMuchEnergy => "too_much_energy",
        TooLittleEnergy => "too_little_energy",
    }
}

/// Independent 64-bit seed for sub-task `index` of a run seeded with `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// Build at a fixed dimension, or grow the truncation until the builder
/// stops reporting truncation failures.
pub(crate) fn with_auto_dim<T>(
    fixed: Option<usize>,
    start: usize,
    mut build: impl FnMut(usize) -> Result<T>,
) -> Result<(usize, T)> {
    if let Some(d) = fixed {
        return build(d).map(|t| (d, t));
    }
    let mut d = start;
    loop {
        let next = match build(d) {
            Ok(t) => return Ok((d, t)),
            Err(Error::UntrustedTruncation { suggested_dim, .. }) => {
                suggested_dim.unwrap_or(2 * d).max(2 * d)
            }
            Err(Error::NoTrustedEigenstates) => 2 * d,
            Err(e) => return Err(e),
        };
        if next > AUTO_DIM_LIMIT {
            return build(d).map(|t| (d, t));
        }
        d = next;
    }
}

/// Dispatch on the configured family.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let opts = &cfg.options;
    opts.constants.validate()?;
    match &cfg.params {
        FamilyParams::Position { lambda } => run_position(*lambda, opts),
        FamilyParams::SgPhase { alpha } => run_sg_phase(*alpha, opts),
        FamilyParams::QuadraturePhase { xi, alpha_sq } => {
            run_quadrature_phase(*xi, *alpha_sq, opts)
        }
        FamilyParams::SpinRotation { two_j } => run_spin(*two_j, opts),
        FamilyParams::Custom {
            a,
            h,
            budget,
            ground,
        } => {
            let a_op = load_operator(a)?;
            let h_op = load_operator(h)?;
            let ground = ground.map_or(GroundEnergy::Spectrum, GroundEnergy::Fixed);
            let grid = opts.lambda_grid.clone().unwrap_or_else(default_design_grid);
            design_protocol(&a_op, &h_op, *budget, ground, &grid, opts)
        }
    }
}

fn load_operator(path: &std::path::Path) -> Result<Operator> {
    Ok(hilbert::read_operator(path)?.operator)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub r2: f64,
    /// What was regressed, e.g. `ln ratio ~ ln N`.
    pub model: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub results: Vec<ScenarioResult>,
    pub fit: Option<Fit>,
}

/// Run `base` at every value of its swept parameter on up to `jobs` threads.
/// Point `k` gets seed `derive_seed(master, k)`; results keep input order.
pub fn sweep(base: &ScenarioConfig, values: &[f64], jobs: usize) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::EmptyInput("sweep values".into()));
    }
    let configs = values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let mut cfg = base.clone();
            cfg.params = base.params.with_param(v)?;
            cfg.options.seed = derive_seed(base.options.seed, k as u64);
            Ok(cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results = pool.install(|| {
        configs
            .par_iter()
            .map(run_scenario)
            .collect::<Result<Vec<_>>>()
    })?;
    let fit = sweep_fit(base.params.family(), &results);
    Ok(SweepResult { results, fit })
}

/// Scaling fit appropriate to the family, when enough points carry data.
pub fn sweep_fit(family: Family, results: &[ScenarioResult]) -> Option<Fit> {
    let (model, pairs): (&'static str, Vec<(f64, f64)>) = match family {
        Family::Position | Family::QuadraturePhase | Family::Custom => (
            "ln ratio ~ ln N",
            results
                .iter()
                .filter_map(|r| r.gain.map(|g| (g.n_probes, g.ratio)))
                .collect(),
        ),
        Family::SpinRotation => (
            "ln delta_phi_sq ~ ln j",
            results
                .iter()
                .filter_map(|r| r.delta_phi_sq.map(|d| (r.param / 2.0, d)))
                .collect(),
        ),
        Family::SgPhase => (
            "ln delta_phi_cl ~ ln |alpha|",
            results
                .iter()
                .filter_map(|r| r.delta_phi_cl.map(|d| (r.param, d)))
                .collect(),
        ),
    };
    let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    estimation::log_log_fit(&x, &y)
        .ok()
        .map(|(slope, r2)| Fit { slope, r2, model })
}

pub(crate) fn tail_diag(result: &mut ScenarioResult, tag: &str, state: &StateVector) {
    result.diag(&format!("tail_weight_{tag}"), state.tail_weight());
}
