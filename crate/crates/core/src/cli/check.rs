use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::estimation::derivative_identity_check;
use crate::hilbert::{
    build_fock_operator, build_spin_operator, check_sgur, moment_report, FockOp, HilbertSpec,
    Operator, SpinOp, StateVector, TRUST_TAIL,
};
use crate::intelligent::{solve_intelligent_states, DEFAULT_ACCEPT_TOL};
use crate::Result;

const SCHRODINGER_TOL: f64 = -1e-10;
const SGUR_TOL: f64 = -1e-8;
const DERIVATIVE_TOL: f64 = 1e-4;
const DERIVATIVE_STEP: f64 = 1e-4;
const SPIN_TWO_J: usize = 16;
/// Random-state derivative tuples run in a smaller Fock space.
const DERIVATIVE_FOCK_DIM: usize = 32;

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub dim: usize,
    pub alphas: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub pass: bool,
    /// Worst measured value; compared against `threshold`.
    pub worst: Option<f64>,
    pub threshold: f64,
    pub details: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub pass: bool,
    pub dim: usize,
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

struct Suite {
    name: &'static str,
    threshold: f64,
    /// `true` when larger values are worse.
    upper: bool,
    worst: Option<f64>,
    details: Vec<String>,
    failed: bool,
}

impl Suite {
    fn new(name: &'static str, threshold: f64, upper: bool) -> Self {
        Suite {
            name,
            threshold,
            upper,
            worst: None,
            details: Vec::new(),
            failed: false,
        }
    }

    fn observe(&mut self, v: f64) {
        let worse = |w: f64| if self.upper { v > w } else { v < w };
        if self.worst.is_none_or(worse) {
            self.worst = Some(v);
        }
        let bad = if self.upper { v > self.threshold } else { v < self.threshold };
        if bad || !v.is_finite() {
            self.failed = true;
        }
    }

    fn fail(&mut self, what: String) {
        self.failed = true;
        self.details.push(what);
    }

    fn record<T>(&mut self, label: &str, r: Result<T>) -> Option<T> {
        r.map_err(|e| self.fail(format!("{label}: {e}"))).ok()
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name,
            pass: !self.failed,
            worst: self.worst,
            threshold: self.threshold,
            details: self.details,
        }
    }
}

fn fock_pairs(dim: usize) -> Result<Vec<(&'static str, Operator, Operator)>> {
    Ok(vec![
        ("X,P", build_fock_operator(FockOp::X, dim)?, build_fock_operator(FockOp::P, dim)?),
        ("X,N", build_fock_operator(FockOp::X, dim)?, build_fock_operator(FockOp::Number, dim)?),
    ])
}

fn spin_pairs() -> Result<Vec<(&'static str, Operator, Operator)>> {
    Ok(vec![
        ("Jx,Jy", build_spin_operator(SpinOp::Jx, SPIN_TWO_J)?, build_spin_operator(SpinOp::Jy, SPIN_TWO_J)?),
        ("Jz,Jx", build_spin_operator(SpinOp::Jz, SPIN_TWO_J)?, build_spin_operator(SpinOp::Jx, SPIN_TWO_J)?),
    ])
}

fn uncertainty(opts: &CheckOptions, rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = Suite::new("uncertainty", SCHRODINGER_TOL, false);
    let spaces = [
        (HilbertSpec::Fock { dim: opts.dim }, fock_pairs(opts.dim)),
        (HilbertSpec::spin(SPIN_TWO_J), spin_pairs()),
    ];
    for (space, pairs) in spaces {
        let Some(pairs) = s.record(&space.to_string(), pairs) else {
            continue;
        };
        for _ in 0..opts.samples {
            let Some(psi) = s.record(&space.to_string(), StateVector::random(space, rng)) else {
                break;
            };
            for (label, a, h) in &pairs {
                if let Some(m) = s.record(label, moment_report(&psi, a, h)) {
                    s.observe(m.schrodinger_slack);
                }
            }
        }
    }
    s.finish()
}

fn coherent_states(opts: &CheckOptions) -> Vec<(f64, Result<StateVector>)> {
    opts.alphas
        .iter()
        .map(|&a| (a, StateVector::coherent(c64::new(a, 0.0), opts.dim)))
        .collect()
}

fn tail(opts: &CheckOptions) -> SuiteReport {
    let mut s = Suite::new("tail", TRUST_TAIL, true);
    for (alpha, state) in coherent_states(opts) {
        if let Some(psi) = s.record(&format!("alpha={alpha}"), state) {
            s.observe(psi.tail_weight());
            if !psi.is_trusted() {
                s.details.push(format!(
                    "alpha={alpha}: tail weight {:.3e} at dim {}",
                    psi.tail_weight(),
                    opts.dim
                ));
            }
        }
    }
    s.finish()
}

fn sgur(opts: &CheckOptions) -> SuiteReport {
    let mut s = Suite::new("sgur", SGUR_TOL, false);
    for (alpha, state) in coherent_states(opts) {
        let label = format!("alpha={alpha}");
        if let Some(r) = s.record(&label, state.and_then(|psi| check_sgur(&psi))) {
            s.observe(r.slack_c);
            s.observe(r.slack_s);
        }
    }
    s.finish()
}

fn derivative(opts: &CheckOptions, rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = Suite::new("derivative", DERIVATIVE_TOL, true);
    let dim = opts.dim.min(DERIVATIVE_FOCK_DIM);
    let spaces = [
        (HilbertSpec::Fock { dim }, fock_pairs(dim)),
        (HilbertSpec::spin(SPIN_TWO_J), spin_pairs()),
    ];
    let tuples = (opts.samples / 10).max(1);
    for (space, pairs) in spaces {
        let Some(pairs) = s.record(&space.to_string(), pairs) else {
            continue;
        };
        for _ in 0..tuples {
            let phi = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let Some(psi) = s.record(&space.to_string(), StateVector::random(space, rng)) else {
                break;
            };
            for (label, a, h) in &pairs {
                let r = derivative_identity_check(&psi, a, h, phi, DERIVATIVE_STEP);
                if let Some(d) = s.record(label, r) {
                    s.observe(d.relative_error());
                }
            }
        }
    }
    s.finish()
}

fn trifonov(opts: &CheckOptions) -> SuiteReport {
    let mut s = Suite::new("trifonov", DEFAULT_ACCEPT_TOL, true);
    let ops = build_fock_operator(FockOp::X, opts.dim)
        .and_then(|x| Ok((x, build_fock_operator(FockOp::P, opts.dim)?)));
    let Some((x, p)) = s.record("X,P", ops) else {
        return s.finish();
    };
    for lambda in [
        c64::new(1.0, 0.0),
        c64::new(2.0, 0.0),
        c64::new(4.0, 0.0),
        c64::new(9.0, 0.0),
        c64::new(1.0, 1.0),
    ] {
        let label = format!("lambda={lambda}");
        if let Some(states) = s.record(&label, solve_intelligent_states(&x, &p, lambda, DEFAULT_ACCEPT_TOL)) {
            for st in states {
                s.observe(st.max_trifonov_residual());
            }
        }
    }
    s.finish()
}

/// Run every invariant suite. Failures are report content, never errors.
pub fn run_checks(opts: &CheckOptions) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let suites = vec![
        uncertainty(opts, &mut rng),
        tail(opts),
        sgur(opts),
        derivative(opts, &mut rng),
        trifonov(opts),
    ];
    CheckReport {
        pass: suites.iter().all(|s| s.pass),
        dim: opts.dim,
        seed: opts.seed,
        suites,
    }
}
