//! One test per acceptance criterion. Each prints a single `PASS`/`FAIL`
//! line with the measured worst case, then asserts.
//!
//! `cargo test -p squeezelab --test acceptance -- --nocapture --test-threads 1`

use std::process::Command;

use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use squeezelab::estimation::{derivative_identity_check, log_log_fit, run_estimation, working_point};
use squeezelab::hilbert::{
    build_fock_operator, build_spin_operator, check_sgur, moment_report, FockOp, HilbertSpec,
    Operator, SpinOp, StateVector,
};
use squeezelab::intelligent::{solve_intelligent_states, targeted_intelligent_state, DEFAULT_ACCEPT_TOL};
use squeezelab::resources::{heisenberg_lower_bound, BoundConstants};
use squeezelab::scenarios::{
    run_position, run_quadrature_phase, run_sg_phase, run_spin, RunOptions, ScenarioResult,
};

const TRIFONOV_TOL: f64 = 1e-6;
const SCHRODINGER_TOL: f64 = -1e-10;
const SGUR_TOL: f64 = -1e-8;
const DERIVATIVE_TOL: f64 = 1e-4;
const POSITION_TOL: f64 = 0.05;
const SLOPE_TOL: f64 = 0.05;
const SPIN_EXACT_TOL: f64 = 1e-9;
const SPIN_SLOPE_TOL: f64 = 0.1;
const SPIN_SLACK: f64 = 1.5;
const MC_TOL: f64 = 0.10;
const CLT_SLOPE_TOL: f64 = 0.05;
const BOUND_SLACK: f64 = 0.5;

fn report(id: &str, ok: bool, what: &str) {
    println!("{} {id} {what}", if ok { "PASS" } else { "FAIL" });
}

fn no_mc() -> RunOptions {
    RunOptions {
        monte_carlo: false,
        ..RunOptions::default()
    }
}

fn xp(dim: usize) -> (Operator, Operator) {
    (
        build_fock_operator(FockOp::X, dim).unwrap(),
        build_fock_operator(FockOp::P, dim).unwrap(),
    )
}

#[test]
fn ac01_intelligent_state_identities() {
    let (x, p) = xp(256);
    let mut worst = 0f64;
    let mut count = 0;
    for lambda in [
        c64::new(1.0, 0.0),
        c64::new(2.0, 0.0),
        c64::new(4.0, 0.0),
        c64::new(9.0, 0.0),
        c64::new(1.0, 1.0),
    ] {
        for s in solve_intelligent_states(&x, &p, lambda, DEFAULT_ACCEPT_TOL).unwrap() {
            worst = worst.max(s.max_trifonov_residual());
            count += 1;
        }
    }
    let ok = worst <= TRIFONOV_TOL && count > 0;
    report(
        "ac01",
        ok,
        &format!("moment identities over {count} eigenstates: worst residual {worst:.3e} <= {TRIFONOV_TOL:.0e}"),
    );
    assert!(ok);
}

#[test]
fn ac02_uncertainty_theorems() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pairs: Vec<(HilbertSpec, Operator, Operator)> = vec![
        {
            let (x, p) = xp(256);
            (HilbertSpec::Fock { dim: 256 }, x, p)
        },
        (
            HilbertSpec::spin(16),
            build_spin_operator(SpinOp::Jx, 16).unwrap(),
            build_spin_operator(SpinOp::Jy, 16).unwrap(),
        ),
        (
            HilbertSpec::spin(7),
            build_spin_operator(SpinOp::Jz, 7).unwrap(),
            build_spin_operator(SpinOp::Jx, 7).unwrap(),
        ),
    ];
    let mut worst_schrodinger = f64::INFINITY;
    for (space, a, h) in &pairs {
        for _ in 0..1000 {
            let psi = StateVector::random(*space, &mut rng).unwrap();
            worst_schrodinger = worst_schrodinger.min(moment_report(&psi, a, h).unwrap().schrodinger_slack);
        }
    }
    let mut worst_sg = f64::INFINITY;
    for alpha in [2.0, 4.0, 6.0] {
        let r = check_sgur(&StateVector::coherent(c64::new(alpha, 0.0), 256).unwrap()).unwrap();
        worst_sg = worst_sg.min(r.slack_c).min(r.slack_s);
    }
    let ok = worst_schrodinger >= SCHRODINGER_TOL && worst_sg >= SGUR_TOL;
    report(
        "ac02",
        ok,
        &format!(
            "Schrodinger slack min {worst_schrodinger:.3e} >= {SCHRODINGER_TOL:.0e}; SG slack min {worst_sg:.3e} >= {SGUR_TOL:.0e}"
        ),
    );
    assert!(ok);
}

#[test]
fn ac03_derivative_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (x, p) = xp(32);
    let n = build_fock_operator(FockOp::Number, 32).unwrap();
    let jx = build_spin_operator(SpinOp::Jx, 12).unwrap();
    let jy = build_spin_operator(SpinOp::Jy, 12).unwrap();
    let jz = build_spin_operator(SpinOp::Jz, 12).unwrap();
    let cases: [(&Operator, &Operator); 4] = [(&x, &p), (&x, &n), (&jx, &jy), (&jz, &jx)];
    let mut worst = 0f64;
    for t in 0..100 {
        let (a, h) = cases[t % cases.len()];
        let psi = StateVector::random(a.space(), &mut rng).unwrap();
        let phi = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let d = derivative_identity_check(&psi, a, h, phi, 1e-4).unwrap();
        worst = worst.max(d.relative_error());
    }
    let ok = worst <= DERIVATIVE_TOL;
    report(
        "ac03",
        ok,
        &format!("100 tuples: worst relative error {worst:.3e} <= {DERIVATIVE_TOL:.0e}"),
    );
    assert!(ok);
}

#[test]
fn ac04_position_family() {
    let results: Vec<ScenarioResult> = [4.0, 9.0, 16.0, 25.0]
        .iter()
        .map(|&l| run_position(l, &no_mc()).unwrap())
        .collect();
    let gains: Vec<_> = results.iter().map(|r| r.gain.unwrap()).collect();
    let worst = gains
        .iter()
        .map(|g| (g.ratio_times_n() - 1.0).abs())
        .fold(0.0, f64::max);
    let (n, ratio): (Vec<f64>, Vec<f64>) = gains.iter().map(|g| (g.n_probes, g.ratio)).unzip();
    let (slope, _) = log_log_fit(&n, &ratio).unwrap();
    let ok = worst <= POSITION_TOL && (slope + 1.0).abs() <= SLOPE_TOL;
    report(
        "ac04",
        ok,
        &format!("ratio*N max deviation {worst:.3e} <= {POSITION_TOL}; slope {slope:.4} = -1 +- {SLOPE_TOL}"),
    );
    assert!(ok);
}

#[test]
fn ac05_quadrature_family() {
    let xis = [1.5, 2.0, 2.5, 3.0];
    let gains: Vec<_> = xis
        .iter()
        .map(|&xi| run_quadrature_phase(xi, None, &no_mc()).unwrap().gain.unwrap())
        .collect();
    let products: Vec<f64> = gains.iter().map(|g| g.ratio_times_n()).collect();
    let in_band = products.iter().all(|p| (1.0..=2.0).contains(p));
    let (n, ratio): (Vec<f64>, Vec<f64>) = gains.iter().map(|g| (g.n_probes, g.ratio)).unzip();
    let (slope, _) = log_log_fit(&n, &ratio).unwrap();

    // Splits ×3 and ÷3 away from balance at every ξ, plus α_sq = 10e² at ξ = 2.
    let mut strict = true;
    let mut unbalanced = Vec::new();
    for (k, &xi) in xis.iter().enumerate() {
        let balanced = xi.exp() * std::f64::consts::FRAC_1_SQRT_2;
        for alpha in [balanced * 3.0, balanced / 3.0] {
            unbalanced.push((k, xi, alpha));
        }
    }
    unbalanced.push((1, 2.0, 10.0 * 2f64.exp()));
    for (k, xi, alpha) in unbalanced {
        let g = run_quadrature_phase(xi, Some(alpha), &no_mc())
            .unwrap()
            .gain
            .unwrap();
        strict &= g.ratio_times_n() > products[k];
    }
    let ok = in_band && (slope + 1.0).abs() <= SLOPE_TOL && strict;
    report(
        "ac05",
        ok,
        &format!(
            "ratio*N {:?} in [1, 2]; slope {slope:.4} = -1 +- {SLOPE_TOL}; unbalanced strictly worse: {strict}",
            products.iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>()
        ),
    );
    assert!(ok);
}

#[test]
fn ac06_spin_family() {
    let mut worst_cl = 0f64;
    let mut worst_n = 0f64;
    let mut worst_slack = 0f64;
    let mut js = Vec::new();
    let mut dphi = Vec::new();
    for two_j in [8usize, 16, 32, 64] {
        let j = two_j as f64 / 2.0;
        let r = run_spin(two_j, &no_mc()).unwrap();
        let g = r.gain.unwrap();
        worst_cl = worst_cl.max((r.delta_phi_cl.unwrap() - 1.0 / (2.0 * j).sqrt()).abs());
        worst_n = worst_n.max((g.n_probes - (2.0 * j).sqrt()).abs());
        worst_slack = worst_slack.max(g.ratio / (2.0 / g.n_probes));
        js.push(j);
        dphi.push(r.delta_phi_sq.unwrap());
    }
    let (slope, _) = log_log_fit(&js, &dphi).unwrap();
    let ok = worst_cl <= SPIN_EXACT_TOL
        && worst_n <= SPIN_EXACT_TOL
        && (slope + 1.0).abs() <= SPIN_SLOPE_TOL
        && worst_slack <= SPIN_SLACK;
    report(
        "ac06",
        ok,
        &format!(
            "|dphi_cl - 1/sqrt(2j)| {worst_cl:.2e}, |N - sqrt(2j)| {worst_n:.2e} <= {SPIN_EXACT_TOL:.0e}; \
             slope {slope:.4} = -1 +- {SPIN_SLOPE_TOL}; max ratio/(2/N) {worst_slack:.4} <= {SPIN_SLACK}"
        ),
    );
    assert!(ok);
}

#[test]
fn ac07_monte_carlo_consistency() {
    let opts = RunOptions {
        seed: 7,
        ..RunOptions::default()
    };
    let runs = [
        ("position sq", run_position(9.0, &opts).unwrap().sq_run),
        ("sg cl", run_sg_phase(4.0, &opts).unwrap().cl_run),
        ("quadrature sq", run_quadrature_phase(1.5, None, &opts).unwrap().sq_run),
        ("spin cl", run_spin(16, &opts).unwrap().cl_run),
    ];
    let mut worst = 0f64;
    let mut parts = Vec::new();
    for (label, run) in &runs {
        let run = run.as_ref().expect("Monte Carlo run present");
        let dev = (run.empirical_rmse / run.analytic_rmse - 1.0).abs();
        worst = worst.max(dev);
        parts.push(format!("{label} {dev:.3}"));
    }

    let (x, p) = xp(256);
    let probe = targeted_intelligent_state(
        &x,
        &p,
        c64::new(9.0, 0.0),
        c64::new(0.0, 4.5f64.sqrt()),
        DEFAULT_ACCEPT_TOL,
    )
    .unwrap();
    let phi = working_point(&probe.state, &x, &p).unwrap();
    let shots = [100usize, 1000, 10_000];
    let rmse: Vec<f64> = shots
        .iter()
        .map(|&s| {
            run_estimation(&probe.state, &x, &p, phi, s, 200, 11)
                .unwrap()
                .empirical_rmse
        })
        .collect();
    let nu: Vec<f64> = shots.iter().map(|&s| s as f64).collect();
    let (slope, _) = log_log_fit(&nu, &rmse).unwrap();

    let ok = worst <= MC_TOL && (slope + 0.5).abs() <= CLT_SLOPE_TOL;
    report(
        "ac07",
        ok,
        &format!(
            "rmse*sqrt(nu)/dphi - 1: [{}] <= {MC_TOL}; CLT slope {slope:.4} = -0.5 +- {CLT_SLOPE_TOL}",
            parts.join(", ")
        ),
    );
    assert!(ok);
}

#[test]
fn ac08_bound_consistency() {
    let c = BoundConstants::default();
    let mut results = Vec::new();
    for l in [1.0, 4.0, 9.0, 16.0, 25.0] {
        results.push(run_position(l, &no_mc()).unwrap());
    }
    for a in [2.0, 4.0, 6.0] {
        results.push(run_sg_phase(a, &no_mc()).unwrap());
    }
    for xi in [1.5, 2.0, 2.5, 3.0] {
        results.push(run_quadrature_phase(xi, None, &no_mc()).unwrap());
    }
    for two_j in [8, 16, 32, 64] {
        results.push(run_spin(two_j, &no_mc()).unwrap());
    }
    // Smallest Δφ / bound over all probes; equality (0.5) is attained by
    // minimum-uncertainty probes with ⟨H⟩ - E₀ = ΔH.
    let mut worst = f64::INFINITY;
    let mut probes = 0;
    for r in &results {
        for (profile, dphi) in [(r.sq_profile, r.delta_phi_sq), (r.cl_profile, r.delta_phi_cl)] {
            let (Some(profile), Some(dphi)) = (profile, dphi) else { continue };
            let bound = heisenberg_lower_bound(&profile, 1, &c).unwrap();
            worst = worst.min(dphi / bound);
            probes += 1;
        }
    }
    let ok = worst >= BOUND_SLACK * (1.0 - 1e-9);
    report(
        "ac08",
        ok,
        &format!("{probes} probes: min dphi/bound {worst:.6} >= {BOUND_SLACK}"),
    );
    assert!(ok);
}

#[test]
fn ac09_monotone_in_lambda() {
    let (x, p) = xp(256);
    let mut spans = Vec::new();
    for lambda in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let dphi: Vec<f64> = solve_intelligent_states(&x, &p, c64::new(lambda, 0.0), DEFAULT_ACCEPT_TOL)
            .unwrap()
            .iter()
            .filter_map(|s| s.delta_phi())
            .collect();
        assert!(!dphi.is_empty());
        let lo = dphi.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = dphi.iter().copied().fold(0.0, f64::max);
        spans.push((lambda, lo, hi));
    }
    let ok = spans.windows(2).all(|w| w[1].2 < w[0].1);
    report(
        "ac09",
        ok,
        &format!(
            "dphi ranges by lambda: {}",
            spans
                .iter()
                .map(|(l, lo, hi)| format!("{l}: [{lo:.6}, {hi:.6}]"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
    assert!(ok);
}

#[test]
fn ac10_cli_sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_squeezelab"))
            .args([
                "sweep", "--family", "position", "--lambda", "4,9", "--seed", "42", "--shots",
                "2000", "--trials", "40", "--jobs", jobs, "--out",
            ])
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(out.join("results.csv")).unwrap()
    };
    let a = run("a", "1");
    let b = run("b", "1");
    let c = run("c", "2");
    let ok = a == b && a == c && !a.is_empty();
    report(
        "ac10",
        ok,
        &format!("repeated sweeps (1 and 2 jobs) give byte-identical CSV ({} bytes)", a.len()),
    );
    assert!(ok);
}
