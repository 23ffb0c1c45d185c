use std::f64::consts::{FRAC_2_PI, TAU};

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use aqpe_core::evolution::{
    evolve_dispersive, fidelity_series, ideal_cavity_analytic, reduced_series, SpectrumPopulations,
};
use aqpe_core::hamiltonians::build_aqpe;
use aqpe_core::linalg::{
    eig_hermitian, hermiticity_deviation, kron, max_abs, partial_trace, pure_density, trace,
    trace_distance, uhlmann_fidelity, unitarity_deviation,
};
use aqpe_core::qstates::{
    eigenstate_superposition, rotation, squeezed_coherent, QubitRegisterState,
};
use aqpe_core::tomography::{angular_profile, detect_peaks, estimate_spectrum, wigner_points};
use aqpe_core::{
    Complex64, ComplexMatrix, CompositeSpace, FockTruncation, SqueezedCoherentSpec, StateVector,
};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn matrix(n: usize, parts: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        cx(parts[2 * (i * n + j)], parts[2 * (i * n + j) + 1])
    })
}

fn hermitian(n: usize, parts: &[f64]) -> ComplexMatrix {
    let m = matrix(n, parts);
    (&m + m.adjoint()) * cx(0.5, 0.0)
}

fn density(n: usize, parts: &[f64]) -> ComplexMatrix {
    let g = matrix(n, parts);
    let rho = &g * g.adjoint();
    let tr = trace(&rho);
    rho / tr
}

fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * n)
}

/// Scaling-and-squaring Taylor exponential, independent of any eigensolver.
fn taylor_expm(a: &ComplexMatrix) -> ComplexMatrix {
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * cx(scale, 0.0);
    let n = a.nrows();
    let mut term = ComplexMatrix::identity(n, n);
    let mut sum = ComplexMatrix::identity(n, n);
    for k in 1..=24 {
        term = &term * &x / cx(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kron_mixed_product(a in entries(2), b in entries(3), c in entries(2), d in entries(3)) {
        let (a, b, c, d) = (matrix(2, &a), matrix(3, &b), matrix(2, &c), matrix(3, &d));
        let lhs = kron(&a, &b).unwrap() * kron(&c, &d).unwrap();
        let rhs = kron(&(&a * &c), &(&b * &d)).unwrap();
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in entries(4), b in entries(4)) {
        let (r, s) = (density(4, &a), density(4, &b));
        let f1 = uhlmann_fidelity(&r, &s).unwrap();
        let f2 = uhlmann_fidelity(&s, &r).unwrap();
        prop_assert!((f1 - f2).abs() < 1e-10);
        prop_assert!((0.0..=1.0).contains(&f1));
        prop_assert!((uhlmann_fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(parts in entries(12), mask in 1usize..7) {
        let rho = density(12, &parts);
        let space = CompositeSpace::new(vec![3, 2, 2]).unwrap();
        let keep: Vec<usize> = (0..3).filter(|k| mask >> k & 1 == 1).collect();
        let red = partial_trace(&rho, &space, &keep).unwrap();
        prop_assert!((trace(&red) - cx(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(hermiticity_deviation(&red) < 1e-12);
    }

    #[test]
    fn propagator_is_unitary_with_group_law(parts in entries(5), t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let eig = eig_hermitian(&hermitian(5, &parts)).unwrap();
        let (u1, u2) = (eig.propagator(t1), eig.propagator(t2));
        prop_assert!(unitarity_deviation(&u1) < 1e-12);
        prop_assert!(max_abs(&(&u1 * &u2 - eig.propagator(t1 + t2))) < 1e-12);
    }

    #[test]
    fn propagator_matches_taylor_oracle(parts in entries(6), t in -2.0f64..2.0) {
        let h = hermitian(6, &parts);
        let u = eig_hermitian(&h).unwrap().propagator(t);
        prop_assert!(max_abs(&(u - taylor_expm(&(&h * cx(0.0, -t))))) < 1e-10);
    }

    #[test]
    fn dispersive_blocks_are_scaled_target_propagators(parts in entries(4), t in -1.5f64..1.5) {
        let ht = hermitian(4, &parts);
        let trunc = FockTruncation::new(5).unwrap();
        let u = taylor_expm(&(build_aqpe(&ht, trunc).unwrap() * cx(0.0, -t)));
        let teig = eig_hermitian(&ht).unwrap();
        for n in 0..=5 {
            let block = u.view((4 * n, 4 * n), (4, 4)).into_owned();
            prop_assert!(max_abs(&(block - teig.propagator(n as f64 * t))) < 1e-10);
        }
    }

    #[test]
    fn fidelity_series_is_symmetric(a in entries(4), b in entries(4), t in 0.1f64..2.0) {
        let spec = SqueezedCoherentSpec::new(cx(1.0, 0.0), cx(-0.2, 0.0), FockTruncation::new(16).unwrap()).unwrap();
        let reg = QubitRegisterState::basis("01").unwrap();
        let times = [0.0, 0.5 * t, t];
        let ta = evolve_dispersive(&hermitian(4, &a), &spec, &reg, &times).unwrap();
        let tb = evolve_dispersive(&hermitian(4, &b), &spec, &reg, &times).unwrap();
        let (_, fab) = fidelity_series(&ta, &tb, &[0]).unwrap();
        let (_, fba) = fidelity_series(&tb, &ta, &[0]).unwrap();
        for (x, y) in fab.iter().zip(&fba) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        for s in ta.states() {
            prop_assert!((s.weight() - 1.0).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn analytic_cavity_matches_brute_force(
        parts in entries(4),
        weights in prop::collection::vec(-1.0f64..1.0, 8),
        t in 0.05f64..3.0,
    ) {
        let ht = hermitian(4, &parts);
        let teig = eig_hermitian(&ht).unwrap();
        let w: Vec<Complex64> = weights.chunks(2).map(|p| cx(p[0], p[1])).collect();
        prop_assume!(w.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
        let reg = eigenstate_superposition(&teig, &w).unwrap();
        let sp = SpectrumPopulations::from_register(&teig, &reg).unwrap();
        let spec = SqueezedCoherentSpec::new(cx(1.8, 0.0), cx(-0.4, 0.0), FockTruncation::new(40).unwrap()).unwrap();
        let tr = evolve_dispersive(&ht, &spec, &reg, &[t]).unwrap();
        let brute = &reduced_series(&tr, &[0]).unwrap()[0];
        let analytic = ideal_cavity_analytic(&sp, &spec, t).unwrap();
        prop_assert!(trace_distance(brute, &analytic).unwrap() < 1e-7);
    }

    #[test]
    fn wigner_rotates_with_the_state(theta in -3.0f64..3.0, re in -1.5f64..1.5, im in -1.5f64..1.5) {
        let trunc = FockTruncation::new(24).unwrap();
        let spec = SqueezedCoherentSpec::new(cx(1.4, 0.3), cx(-0.3, 0.2), trunc).unwrap();
        let rho = pure_density(&squeezed_coherent(&spec).unwrap());
        let r = rotation::<f64>(theta, trunc);
        let rotated = &r * &rho * r.adjoint();
        let alpha = cx(re, im);
        let a = wigner_points(&rotated, &[alpha]).unwrap()[0];
        let b = wigner_points(&rho, &[alpha * Complex64::from_polar(1.0, -theta)]).unwrap()[0];
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn diagonal_spectra_are_recovered(
        start in -2.4f64..-2.0,
        gaps in prop::collection::vec(0.8f64..1.4, 3),
    ) {
        let t = 2.0e-5;
        let mut angles = vec![start];
        for g in &gaps {
            angles.push(angles.last().unwrap() + g);
        }
        let energies: Vec<f64> = angles.iter().map(|a| -a / t).collect();
        let ht = ComplexMatrix::from_diagonal(&StateVector::from_iterator(4, energies.iter().map(|&e| cx(e, 0.0))));
        let reg = QubitRegisterState::new(StateVector::from_element(4, cx(0.5, 0.0))).unwrap();
        let spec = SqueezedCoherentSpec::new(cx(1.8, 0.0), cx(-0.4, 0.0), FockTruncation::new(30).unwrap()).unwrap();
        let tr = evolve_dispersive(&ht, &spec, &reg, &[t]).unwrap();
        let rho = &reduced_series(&tr, &[0]).unwrap()[0];
        let n_theta = 360;
        let profile = angular_profile(rho, 1.8, n_theta).unwrap();
        let peaks = detect_peaks(&profile, 0.02).unwrap();
        prop_assert_eq!(peaks.len(), 4);
        let est = estimate_spectrum(&peaks, t, FRAC_2_PI).unwrap();
        let mut got: Vec<f64> = est.components.iter().map(|c| c.energy).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want = energies.clone();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let bound = TAU / (n_theta as f64 * t);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < bound, "{} vs {}", g, w);
        }
        for c in &est.components {
            assert_abs_diff_eq!(c.weight, 0.25, epsilon = 0.05);
        }
    }
}
