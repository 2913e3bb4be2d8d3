//! `squeezelab` command-line front end.
//!
//! Exit codes: 0 on success, 1 on validation errors or failed checks, 2 when
//! the designer reports an infeasible budget. Errors are written to stderr as
//! a single JSON object.

mod check;
mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use faer::c64;
use serde_json::json;

use crate::hilbert::{self, Operator};
use crate::intelligent::{solve_intelligent_states, DEFAULT_ACCEPT_TOL};
use crate::scenarios::{self, Family, FamilyParams, ScenarioConfig};
use crate::{Error, Result};

pub use check::{run_checks, CheckOptions, CheckReport, SuiteReport};
pub use output::{csv_row, write_csv, RunManifest, CSV_HEADER};

/// Environment variable overriding the default Fock truncation.
pub const DIM_ENV: &str = "SQUEEZELAB_DIM";

#[derive(Debug, Parser)]
#[command(name = "squeezelab", version, about = "Squeezed-probe phase estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and report its gain.
    Scenario(RunArgs),
    /// Run a scenario over several values of its parameter and fit the scaling.
    Sweep(RunArgs),
    /// Design a squeezed probe for user operators under an energy budget.
    Design(RunArgs),
    /// List the trusted eigenstates of λA + iH for user operators.
    Solve(SolveArgs),
    /// Run the invariant suites.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Scenario config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; results go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Fock truncation.
    #[arg(long)]
    dim: Option<usize>,
    /// Worker threads for sweeps.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
    /// Skip the Monte Carlo cross-checks.
    #[arg(long)]
    no_mc: bool,
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// position, sg, quadrature, spin or custom.
    #[arg(long)]
    family: Option<String>,
    /// λ (position), or the λ grid (spin, custom).
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// Coherent amplitude |α| (sg).
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    /// Squeezing ξ (quadrature).
    #[arg(long, value_delimiter = ',')]
    xi: Vec<f64>,
    /// Displacement of the squeezed probe (quadrature).
    #[arg(long = "alpha-sq")]
    alpha_sq: Option<f64>,
    /// Twice the spin (spin).
    #[arg(long = "two-j", value_delimiter = ',')]
    two_j: Vec<usize>,
    /// Observable operator file (custom).
    #[arg(long = "A")]
    a: Option<PathBuf>,
    /// Generator operator file (custom).
    #[arg(long = "H")]
    h: Option<PathBuf>,
    /// Energy budget above the ground energy (custom).
    #[arg(long, value_delimiter = ',')]
    budget: Vec<f64>,
    /// Convention ground energy of H (custom); spectrum minimum when absent.
    #[arg(long)]
    ground: Option<f64>,
}

#[derive(Debug, Clone, Args)]
struct SolveArgs {
    #[arg(long = "A")]
    a: PathBuf,
    #[arg(long = "H")]
    h: PathBuf,
    /// Real part of λ.
    #[arg(long)]
    lambda: f64,
    /// Imaginary part of λ.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda_im: f64,
    /// Residual acceptance tolerance.
    #[arg(long, default_value_t = DEFAULT_ACCEPT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Clone, Args)]
struct CheckArgs {
    /// Fock truncation for the Fock-space suites.
    #[arg(long)]
    dim: Option<usize>,
    /// Coherent amplitudes for the SG and tail suites.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 4.0, 6.0])]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random states per space in the uncertainty suite.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!(
                "{}",
                json!({ "error": "usage", "message": e.render().to_string().trim() })
            );
            return 1;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let mut body = json!({ "error": e.kind(), "message": e.to_string() });
            let mut code = 1;
            if let Error::Infeasible(report) = &e {
                body["report"] = serde_json::to_value(report).unwrap_or_default();
                code = 2;
            }
            eprintln!("{body}");
            code
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Scenario(args) => {
            let cfg = build_config(&args, false)?;
            let result = scenarios::run_scenario(&cfg)?;
            output::emit(&args.common, "scenario", &cfg, &[result], None)?;
        }
        Command::Sweep(args) => {
            let cfg = build_config(&args, false)?;
            let values = sweep_values(&args, cfg.params.family())?;
            let sweep = scenarios::sweep(&cfg, &values, args.common.jobs)?;
            output::emit(&args.common, "sweep", &cfg, &sweep.results, sweep.fit)?;
        }
        Command::Design(args) => {
            let cfg = build_config(&args, true)?;
            let result = scenarios::run_scenario(&cfg)?;
            output::emit(&args.common, "design", &cfg, &[result], None)?;
        }
        Command::Solve(args) => solve(&args)?,
        Command::Check(args) => {
            let opts = CheckOptions {
                dim: match args.dim {
                    Some(d) => d,
                    None => env_dim()?.unwrap_or(hilbert::DEFAULT_FOCK_DIM),
                },
                alphas: args.alpha.clone(),
                seed: args.seed,
                samples: args.samples,
            };
            let report = run_checks(&opts);
            let text = serde_json::to_string_pretty(&report)?;
            match &args.out {
                Some(dir) => output::write_files(dir, args.force, &[("check.json", text + "\n")])?,
                None => println!("{text}"),
            }
            return Ok(if report.pass { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn env_dim() -> Result<Option<usize>> {
    match std::env::var(DIM_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Error::InvalidParameter(format!("{DIM_ENV} must be a positive integer, got '{v}'"))
        }),
        Err(_) => Ok(None),
    }
}

fn first<T: Copy>(values: &[T], flag: &str, family: Family) -> Result<T> {
    values.first().copied().ok_or_else(|| {
        Error::InvalidParameter(format!("--{flag} is required for family {}", family.as_str()))
    })
}

fn params_from_flags(family: Family, args: &RunArgs) -> Result<FamilyParams> {
    Ok(match family {
        Family::Position => FamilyParams::Position {
            lambda: first(&args.lambda, "lambda", family)?,
        },
        Family::SgPhase => FamilyParams::SgPhase {
            alpha: first(&args.alpha, "alpha", family)?,
        },
        Family::QuadraturePhase => FamilyParams::QuadraturePhase {
            xi: first(&args.xi, "xi", family)?,
            alpha_sq: args.alpha_sq,
        },
        Family::SpinRotation => FamilyParams::SpinRotation {
            two_j: first(&args.two_j, "two-j", family)?,
        },
        Family::Custom => {
            let missing = |flag: &str| {
                Error::InvalidParameter(format!("--{flag} is required for family custom"))
            };
            FamilyParams::Custom {
                a: args.a.clone().ok_or_else(|| missing("A"))?,
                h: args.h.clone().ok_or_else(|| missing("H"))?,
                budget: first(&args.budget, "budget", family)?,
                ground: args.ground,
            }
        }
    })
}

/// Config file first, then family flags, then option overrides.
fn build_config(args: &RunArgs, design: bool) -> Result<ScenarioConfig> {
    let c = &args.common;
    let from_file = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
            Some(ScenarioConfig::from_json(&text).map_err(|e| e.in_file(path))?)
        }
        None => None,
    };
    let family = match (&args.family, design) {
        (_, true) => Some(Family::Custom),
        (Some(name), false) => Some(Family::parse(name)?),
        (None, false) => None,
    };
    let mut cfg = match (from_file, family) {
        (Some(cfg), None) => cfg,
        (Some(mut cfg), Some(f)) if f == cfg.params.family() => {
            if has_family_flags(args) {
                cfg.params = params_from_flags(f, args)?;
            }
            cfg
        }
        (Some(mut cfg), Some(f)) => {
            cfg.params = params_from_flags(f, args)?;
            cfg
        }
        (None, Some(f)) => ScenarioConfig::new(params_from_flags(f, args)?),
        (None, None) => {
            return Err(Error::InvalidParameter(
                "pass --config or --family".into(),
            ))
        }
    };
    if design && cfg.params.family() != Family::Custom {
        return Err(Error::InvalidParameter(
            "design needs operator files (family custom)".into(),
        ));
    }

    let o = &mut cfg.options;
    if let Some(s) = c.seed {
        o.seed = s;
    }
    if let Some(s) = c.shots {
        o.shots = s;
    }
    if let Some(t) = c.trials {
        o.trials = t;
    }
    if c.dim.is_some() {
        o.dim = c.dim;
    }
    if o.dim.is_none() {
        o.dim = env_dim()?;
    }
    if c.no_mc {
        o.monte_carlo = false;
    }
    let family = cfg.params.family();
    if matches!(family, Family::SpinRotation | Family::Custom) && !args.lambda.is_empty() {
        cfg.options.lambda_grid = Some(args.lambda.clone());
    }
    cfg.options.constants.validate()?;
    Ok(cfg)
}

fn has_family_flags(args: &RunArgs) -> bool {
    !args.lambda.is_empty()
        || !args.alpha.is_empty()
        || !args.xi.is_empty()
        || args.alpha_sq.is_some()
        || !args.two_j.is_empty()
        || args.a.is_some()
        || args.h.is_some()
        || !args.budget.is_empty()
}

fn sweep_values(args: &RunArgs, family: Family) -> Result<Vec<f64>> {
    let (flag, values): (&str, Vec<f64>) = match family {
        Family::Position => ("lambda", args.lambda.clone()),
        Family::SgPhase => ("alpha", args.alpha.clone()),
        Family::QuadraturePhase => ("xi", args.xi.clone()),
        Family::SpinRotation => ("two-j", args.two_j.iter().map(|&v| v as f64).collect()),
        Family::Custom => ("budget", args.budget.clone()),
    };
    if values.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "sweep over family {} needs a list in --{flag}",
            family.as_str()
        )));
    }
    Ok(values)
}

fn load(path: &Path) -> Result<Operator> {
    let loaded = hilbert::read_operator(path)?;
    if let Some(w) = loaded.warning() {
        eprintln!("{}", json!({ "warning": w, "path": path.display().to_string() }));
    }
    Ok(loaded.operator)
}

fn solve(args: &SolveArgs) -> Result<()> {
    let a = load(&args.a)?;
    let h = load(&args.h)?;
    if a.space() != h.space() {
        let err = Error::DimensionMismatch {
            left: a.dimension(),
            right: h.dimension(),
        };
        let both = PathBuf::from(format!("{} vs {}", args.a.display(), args.h.display()));
        return Err(err.in_file(&both));
    }
    let lambda = c64::new(args.lambda, args.lambda_im);
    let states = solve_intelligent_states(&a, &h, lambda, args.tol)?;
    let rows: Vec<_> = states
        .iter()
        .map(|s| {
            let m = &s.moments;
            json!({
                "eigenvalue": [s.eigenvalue.re, s.eigenvalue.im],
                "residual": s.residual,
                "trifonov_residuals": s.trifonov_residuals,
                "mean_a": m.mean_a,
                "mean_h": m.mean_h,
                "sd_a": m.sd_a(),
                "sd_h": m.sd_h(),
                "delta_phi": s.delta_phi(),
                "usable": s.usable,
                "tail_weight": s.state.tail_weight(),
            })
        })
        .collect();
    let body = json!({
        "space": a.space(),
        "lambda": [lambda.re, lambda.im],
        "states": rows,
    });
    let text = serde_json::to_string_pretty(&body)?;
    match &args.out {
        Some(dir) => output::write_files(dir, args.force, &[("solve.json", text + "\n")]),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
