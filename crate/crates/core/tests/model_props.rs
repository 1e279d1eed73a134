mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use trp_core::linalg::{pauli, ComplexMatrix, HermitianMatrix};
use trp_core::model::*;
use trp_core::symmetrize::SymmetryGroup;

fn sweep_strategy() -> impl Strategy<Value = SweepParameters> {
    (0.5f64..10.0, 1e-5f64..1e-2, 1.0f64..200.0, any::<bool>()).prop_map(|(l, e, t, printed)| {
        let p = SweepParameters::new(l, e, t).unwrap();
        if printed {
            p.with_twist(TwistSense::AsPrinted)
        } else {
            p
        }
    })
}

fn system_strategy() -> impl Strategy<Value = TwoQubitSystemParameters> {
    (-5.0f64..5.0, -150.0f64..150.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(
        |(c4, d1, d2, d3, d4)| TwoQubitSystemParameters { c4, d1, d2, d3, d4 },
    )
}

#[test]
fn h2_is_hermitian_on_random_inputs() {
    let mut rng = common::rng(5);
    use rand::Rng;
    for _ in 0..1000 {
        let p = SweepParameters::new(rng.random_range(0.5..10.0), rng.random_range(1e-5..1e-2), 100.0).unwrap();
        let s = TwoQubitSystemParameters {
            c4: rng.random_range(-5.0..5.0),
            d1: rng.random_range(-150.0..150.0),
            d2: rng.random_range(-2.0..2.0),
            d3: rng.random_range(-2.0..2.0),
            d4: rng.random_range(-2.0..2.0),
        };
        let tau = rng.random_range(-100.0..100.0);
        let h = build_h2(tau, &p, &s).unwrap();
        assert!(h.as_matrix().hermiticity_defect() <= 1e-12);
    }
}

#[test]
fn vcp_commutes_with_the_parity_group() {
    let v = target_gate(GateName::ModifiedControlledPhase).matrix;
    for r in SymmetryGroup::z_parity_2q().elements() {
        let c = v.as_matrix().commutator(r.as_matrix()).unwrap();
        assert_eq!(c.max_abs(), 0.0);
    }
}

#[test]
fn resonance_roots_solve_the_resonance_equation() {
    for eta in [1e-5, 2.9280e-4, 3.0e-4, 0.1, 1.0, 7.0] {
        let p = SweepParameters::new(5.0, eta, 80.0).unwrap();
        for r in resonance_times(&p) {
            let t = r.tau;
            let scale = 1.0 + t.abs();
            assert!((t - eta * t * t * t).abs() / scale <= 1e-12, "eta {eta} tau {t}");
        }
    }
}

#[test]
fn resonant_twist_rotating_frame_field_vanishes_at_roots() {
    // In the frame co-rotating with the twist, the longitudinal field of the
    // resonant sense is (τ − η₄τ³)/λ; check it through the phase derivative.
    let p = SweepParameters::new(5.04, 3.0e-4, 120.0).unwrap();
    for r in resonance_times(&p) {
        let field = r.tau / p.lambda - 0.5 * phase_quartic_rate(r.tau, &p);
        assert!(field.abs() < 1e-12);
    }
}

#[test]
fn table1_window_contains_only_the_origin_resonance() {
    let p = SweepParameters::new(5.8511, 2.9280e-4, 80.0).unwrap();
    let inside: Vec<f64> = resonance_times(&p)
        .into_iter()
        .filter(|r| r.inside_window)
        .map(|r| r.tau)
        .collect();
    assert_eq!(inside, vec![0.0]);
    assert!((resonance_times(&p)[2].tau - 58.44).abs() < 5e-3);
}

#[test]
fn lab_scaling_in_field_strength() {
    let mut rng = common::rng(3);
    use rand::Rng;
    for _ in 0..200 {
        let q = OneQubitLabParameters {
            a: rng.random_range(0.1..10.0),
            b: rng.random_range(0.1..10.0),
            twist_b: rng.random_range(0.01..10.0),
            t0: rng.random_range(0.1..10.0),
        };
        let hbar = rng.random_range(0.5..2.0);
        let p = lab_to_dimensionless_1q(&q, hbar).unwrap();
        let q2 = OneQubitLabParameters { b: 2.0 * q.b, ..q };
        let p2 = lab_to_dimensionless_1q(&q2, hbar).unwrap();
        assert!((p2.lambda / p.lambda - 0.25).abs() < 1e-12);
        assert!((p2.eta4 / p.eta4 - 4.0).abs() < 1e-12);
        assert!((p2.tau0 / p.tau0 - 0.5).abs() < 1e-12);
        // λ·η₄ = ħ²B/a²
        assert!((p.lambda * p.eta4 - hbar * hbar * q.twist_b / (q.a * q.a)).abs() <= 1e-12 * p.lambda * p.eta4);
    }
}

#[test]
fn two_qubit_conversion_identities() {
    let mut rng = common::rng(4);
    use rand::Rng;
    for _ in 0..200 {
        let q = TwoQubitLabParameters {
            gamma1: rng.random_range(-5.0..5.0),
            gamma2: rng.random_range(0.5..5.0),
            brf: rng.random_range(0.1..3.0),
            b0: rng.random_range(1.0..100.0),
            delta: rng.random_range(-1.0..1.0),
            j: rng.random_range(-1.0..1.0),
            a: rng.random_range(0.1..5.0),
            twist_b: rng.random_range(0.01..1.0),
            t0: rng.random_range(1.0..10.0),
        };
        let (p, s) = lab_to_dimensionless_2q(&q, 1.5, 1.0).unwrap();
        assert!((s.d3 - q.gamma1 / q.gamma2).abs() <= 1e-12 * (1.0 + s.d3.abs()));
        let b2 = q.gamma2 * q.brf / 2.0;
        assert!((p.lambda - q.a / (b2 * b2)).abs() <= 1e-12 * p.lambda);
        // d₁/d₄ = (ω₁ − ω₂)/J
        let expect = (q.gamma1 - q.gamma2) * q.b0 / q.j;
        assert!((s.d1 / s.d4 - expect).abs() <= 1e-9 * (1.0 + expect.abs()));
        assert_eq!(s.c4, 1.5);
    }
    let zero_detuning = TwoQubitLabParameters {
        gamma1: 1.0,
        gamma2: 2.0,
        brf: 1.0,
        b0: 1.0,
        delta: 0.0,
        j: 0.1,
        a: 1.0,
        twist_b: 0.1,
        t0: 1.0,
    };
    assert_eq!(lab_to_dimensionless_2q(&zero_detuning, 0.0, 1.0).unwrap().1.d2, 0.0);
    assert!(lab_to_dimensionless_2q(&TwoQubitLabParameters { gamma2: 0.0, ..zero_detuning }, 0.0, 1.0).is_err());
}

#[test]
fn projector_is_gauge_invariant() {
    let mut rng = common::rng(8);
    for _ in 0..100 {
        let h = common::random_hermitian(&mut rng, 4, 2.0);
        let e = h.eigh().unwrap();
        let v = e.eigenvector(3);
        let phase = Complex64::from_polar(1.0, 1.234);
        let rotated: Vec<Complex64> = v.iter().map(|z| z * phase).collect();
        let outer = ComplexMatrix::from_fn(4, |i, j| rotated[i] * rotated[j].conj()).unwrap();
        let p = project_e4(&h).unwrap();
        assert!(p.as_matrix().max_diff(&outer) <= 1e-12);
    }
}

proptest! {
    #[test]
    fn phase_is_even(tau in -200.0f64..200.0, p in sweep_strategy()) {
        prop_assert_eq!(phase_quartic(tau, &p), phase_quartic(-tau, &p));
    }

    #[test]
    fn h1_pauli_coefficients_round_trip(tau in -100.0f64..100.0, p in sweep_strategy()) {
        let h = build_h1(tau, &p).unwrap();
        let c = pauli_coefficients(&h).unwrap();
        let phi = phase_quartic(tau, &p);
        let l = p.lambda;
        // relative to the largest coefficient, |τ|/λ
        let tol = 1e-14 * (1.0 + tau.abs() / l);
        prop_assert!(c[0].abs() <= tol);
        prop_assert!((c[1] + phi.cos() / l).abs() <= tol);
        prop_assert!((c[2] + p.twist.sign() * phi.sin() / l).abs() <= tol);
        prop_assert!((c[3] + tau / l).abs() <= tol);
        prop_assert!(h.as_matrix().trace().norm() <= tol);
    }

    #[test]
    fn h1_spectrum(tau in -100.0f64..100.0, p in sweep_strategy()) {
        let e = build_h1(tau, &p).unwrap().eigh().unwrap();
        let expected = (tau * tau + 1.0).sqrt() / p.lambda;
        prop_assert!((e.eigenvalues()[1] - expected).abs() <= 1e-12 * (1.0 + expected));
        prop_assert!((e.eigenvalues()[0] + expected).abs() <= 1e-12 * (1.0 + expected));
    }

    #[test]
    fn h2_without_shift_is_traceless(tau in -100.0f64..100.0, p in sweep_strategy(), s in system_strategy()) {
        let s = TwoQubitSystemParameters { c4: 0.0, ..s };
        let h = build_h2(tau, &p, &s).unwrap();
        prop_assert!(h.as_matrix().trace().norm() <= 1e-12);
    }

    #[test]
    fn h2_trace_is_c4(tau in -100.0f64..100.0, p in sweep_strategy(), s in system_strategy()) {
        let h = build_h2(tau, &p, &s).unwrap();
        prop_assert!((h.as_matrix().trace().re - s.c4).abs() <= 1e-11);
    }

    #[test]
    fn projector_is_idempotent_with_unit_trace(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let h = common::random_hermitian(&mut rng, 4, 1.0);
        let p = project_e4(&h).unwrap();
        let pm = *p.as_matrix();
        prop_assert!((pm * pm).max_diff(&pm) <= 1e-12);
        prop_assert!((pm.trace().re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn shifted_top_level_keeps_eigenvectors(seed in any::<u64>(), c4 in 0.0f64..3.0) {
        // base + c₄|E₄⟩⟨E₄| has the same top eigenvector when c₄ ≥ 0
        let mut rng = common::rng(seed);
        let base = common::random_hermitian(&mut rng, 4, 1.0);
        let p = project_e4(&base).unwrap();
        let full = HermitianMatrix::combine(&[(1.0, &base), (c4, &p)]).unwrap();
        let q = project_e4(&full).unwrap();
        prop_assert!(p.as_matrix().max_diff(q.as_matrix()) <= 1e-10);
    }
}

#[test]
fn one_qubit_targets() {
    let pi8 = target_gate(GateName::ModifiedPi8).matrix;
    let c = (std::f64::consts::PI / 8.0).cos();
    let s = (std::f64::consts::PI / 8.0).sin();
    // cos σx − sin σy has (0,1) entry cos + i sin
    assert!((pi8.as_matrix()[(0, 1)] - Complex64::new(c, s)).norm() < 1e-15);
    let not = target_gate(GateName::Not).matrix;
    assert_eq!(*not.as_matrix(), pauli::x());
}
