use faer::{c64, Mat};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use squeezelab::hilbert::{
    build_fock_operator, build_spin_operator, commutator, moment_report, FockOp, HilbertSpec,
    Operator, Spectrum, SpinOp, StateVector,
};
use squeezelab::intelligent::displaced_squeezed_state;
use squeezelab::resources::{classify_moments, heisenberg_lower_bound, BoundConstants};

const I: c64 = c64 { re: 0.0, im: 1.0 };

fn random_hermitian(space: HilbertSpec, rng: &mut ChaCha8Rng) -> Operator {
    let d = space.dimension();
    let m = Mat::from_fn(d, d, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let h = Mat::from_fn(d, d, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    Operator::from_dense(space, &h).unwrap()
}

fn max_entry_diff(a: &Operator, b: &Operator) -> f64 {
    let (a, b) = (a.to_dense().unwrap(), b.to_dense().unwrap());
    let mut worst = 0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schrodinger_slack_is_nonnegative(seed in any::<u64>(), dim in 2usize..24) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = HilbertSpec::fock(dim).unwrap();
        let a = random_hermitian(space, &mut rng);
        let h = random_hermitian(space, &mut rng);
        let psi = StateVector::random(space, &mut rng).unwrap();
        let m = moment_report(&psi, &a, &h).unwrap();
        prop_assert!(m.schrodinger_slack >= -1e-10);
        prop_assert!(m.robertson_slack() >= -1e-10);
        prop_assert!(m.var_a * m.var_h - 0.25 * m.mean_c.norm_sqr() >= m.schrodinger_slack - 1e-10);
    }

    #[test]
    fn commutator_of_hermitians_is_anti_hermitian(seed in any::<u64>(), dim in 2usize..16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = HilbertSpec::fock(dim).unwrap();
        let a = random_hermitian(space, &mut rng);
        let b = random_hermitian(space, &mut rng);
        let c = commutator(&a, &b).unwrap().scale(I);
        prop_assert!(c.is_hermitian());
    }

    #[test]
    fn su2_closure(two_j in 1usize..24) {
        let op = |k| build_spin_operator(k, two_j).unwrap();
        let (jx, jy, jz) = (op(SpinOp::Jx), op(SpinOp::Jy), op(SpinOp::Jz));
        prop_assert!(max_entry_diff(&commutator(&jx, &jy).unwrap(), &jz.scale(I)) < 1e-10);
        prop_assert!(max_entry_diff(&commutator(&jy, &jz).unwrap(), &jx.scale(I)) < 1e-10);
        prop_assert!(max_entry_diff(&commutator(&jz, &jx).unwrap(), &jy.scale(I)) < 1e-10);
        let j = two_j as f64 / 2.0;
        let casimir = jx.matmul(&jx).unwrap()
            .add(&jy.matmul(&jy).unwrap()).unwrap()
            .add(&jz.matmul(&jz).unwrap()).unwrap();
        let id = Operator::identity(jx.space()).scale(c64::new(j * (j + 1.0), 0.0));
        prop_assert!(max_entry_diff(&casimir, &id) < 1e-9);
    }

    #[test]
    fn moments_are_basis_independent(seed in any::<u64>(), dim in 2usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = HilbertSpec::fock(dim).unwrap();
        let a = random_hermitian(space, &mut rng);
        let h = random_hermitian(space, &mut rng);
        let psi = StateVector::random(space, &mut rng).unwrap();
        let spec = Spectrum::of(&random_hermitian(space, &mut rng)).unwrap();
        let u = spec.vectors().unwrap();
        let rotate = |op: &Operator| {
            let m = u.adjoint() * op.to_dense().unwrap() * u;
            Operator::from_dense(space, &m).unwrap()
        };
        let psi_u = StateVector::new(space, spec.coefficients(psi.amplitudes())).unwrap();
        let m0 = moment_report(&psi, &a, &h).unwrap();
        let m1 = moment_report(&psi_u, &rotate(&a), &rotate(&h)).unwrap();
        for (x, y) in [
            (m0.mean_a, m1.mean_a),
            (m0.mean_h, m1.mean_h),
            (m0.var_a, m1.var_a),
            (m0.var_h, m1.var_h),
            (m0.cov_ah, m1.cov_ah),
            (m0.schrodinger_slack, m1.schrodinger_slack),
        ] {
            prop_assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()));
        }
        prop_assert!((m0.mean_c - m1.mean_c).norm() < 1e-9);
    }

    #[test]
    fn xp_commutator_is_i_below_the_edge(dim in 2usize..64) {
        let x = build_fock_operator(FockOp::X, dim).unwrap();
        let p = build_fock_operator(FockOp::P, dim).unwrap();
        let c = commutator(&x, &p).unwrap();
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i == j && i + 1 < dim { I } else { c64::new(0.0, 0.0) };
                if i + 1 < dim && j + 1 < dim {
                    prop_assert!((c.get(i, j) - expected).norm() < 1e-12);
                }
            }
        }
        // The truncation edge carries the compensating -(d-1)i.
        prop_assert!((c.get(dim - 1, dim - 1) - I * (1.0 - dim as f64)).norm() < 1e-10);
    }

    #[test]
    fn bound_is_monotone(e in 0.01f64..100.0, sd in 0.01f64..100.0, nu in 1u64..1000, s in 1.0f64..4.0) {
        let c = BoundConstants::default();
        let p = classify_moments(e, sd, 0.0, &c).unwrap();
        let b = heisenberg_lower_bound(&p, nu, &c).unwrap();
        prop_assert!(heisenberg_lower_bound(&p, nu + 1, &c).unwrap() <= b);
        let more_energy = classify_moments(e * s, sd, 0.0, &c).unwrap();
        prop_assert!(heisenberg_lower_bound(&more_energy, nu, &c).unwrap() <= b);
        let more_spread = classify_moments(e, sd * s, 0.0, &c).unwrap();
        prop_assert!(heisenberg_lower_bound(&more_spread, nu, &c).unwrap() <= b);
    }

    #[test]
    fn classification_is_scale_consistent(e in 0.0f64..50.0, sd in 0.01f64..20.0, k in 0.1f64..10.0) {
        let base = classify_moments(e, sd, 0.0, &BoundConstants::default()).unwrap();
        let scaled = classify_moments(e, sd, 0.0, &BoundConstants::new(k, k, 3.0).unwrap()).unwrap();
        prop_assert_eq!(base.classification, scaled.classification);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn displaced_squeezed_moments(xi in 0.0f64..1.5, alpha in -3.0f64..3.0) {
        let psi = displaced_squeezed_state(c64::new(alpha, 0.0), xi, 256).unwrap();
        let x = build_fock_operator(FockOp::X, 256).unwrap();
        let p = build_fock_operator(FockOp::P, 256).unwrap();
        let m = moment_report(&psi, &x, &p).unwrap();
        // A trusted tail of up to 1e-8 shifts moments by about that much.
        let tol = 1e-6;
        prop_assert!((m.mean_a - 2f64.sqrt() * alpha).abs() < tol);
        prop_assert!(m.mean_h.abs() < tol);
        prop_assert!((m.var_h - 0.5 * (-2.0 * xi).exp()).abs() < tol);
        prop_assert!((m.var_a - 0.5 * (2.0 * xi).exp()).abs() < tol);
        prop_assert!(m.schrodinger_slack.abs() < tol);
    }
}
