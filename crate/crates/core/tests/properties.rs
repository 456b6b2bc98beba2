use proptest::prelude::*;
use std::f64::consts::PI;
use unipulse::analytic::*;
use unipulse::dynamics::*;
use unipulse::protocols::*;
use unipulse::quantum::*;
use unipulse::register::*;
use unipulse::Complex64;

fn amp() -> impl Strategy<Value = f64> {
    -40.0..40.0f64
}

fn det() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn schedule() -> impl Strategy<Value = Schedule> {
    (det(), prop::collection::vec((amp(), 0.0..0.5f64), 1..5)).prop_map(|(d, segs)| {
        segs.into_iter().fold(Schedule::qubit(d), |s, (a, t)| s.pulse(a, t))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gate_fidelity_ignores_global_phase(s in schedule(), phase in 0.0..(2.0 * PI)) {
        let u = evolve_unitary(&s).unwrap();
        let v = UnitaryOperator::new(u.matrix().scale(Complex64::from_polar(1.0, phase))).unwrap();
        prop_assert!((gate_fidelity(&u, &v).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn bloch_vector_is_unit(s in schedule()) {
        let psi = evolve_unitary(&s).unwrap().apply(&StateVector::ground()).unwrap();
        let b = bloch_vector(&psi).unwrap();
        prop_assert!(((b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn qubit_spectrum_is_symmetric(d in det(), e in amp()) {
        let eig = hermitian_eigendecomposition(&single_qubit_hamiltonian(d, e).unwrap());
        prop_assert!((eig.values[0] + eig.values[1]).abs() <= 1e-12 * (1.0 + e.abs()));
        prop_assert!((eig.values[1] - 0.5 * (d * d + e * e).sqrt()).abs() <= 1e-12 * (1.0 + e.abs()));
    }

    #[test]
    fn probabilities_stay_in_range(d in det(), a in amp(), tau in 0.0..1.0f64, tau_r in 0.0..5.0f64) {
        let p = unipolar_probability(&RectPulse::new(a, tau).unwrap(), d).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let w = ramsey_probability_unipolar(&PulsePair::symmetric(a, tau, tau_r).unwrap(), d).unwrap();
        prop_assert!((0.0..=1.0).contains(&w));
    }

    #[test]
    fn unipolar_probability_is_the_matrix_element(d in det(), a in amp(), tau in 0.0..1.0f64) {
        let p = RectPulse::new(a, tau).unwrap();
        let u = compose_pulse_sequence(&[SequenceStep::Pulse(p)], d).unwrap();
        prop_assert!((unipolar_probability(&p, d).unwrap() - u.entry(1, 0).norm_sqr()).abs() <= 1e-12);
    }

    #[test]
    fn ramsey_closed_form_matches_composition(d in det(), a in amp(), tau in 0.0..0.5f64, tau_r in 0.0..5.0f64) {
        let pair = PulsePair::symmetric(a, tau, tau_r).unwrap();
        let u = compose_pulse_sequence(&pair_sequence(&pair), d).unwrap();
        prop_assert!((ramsey_probability_unipolar(&pair, d).unwrap() - u.transition_probability(0, 1)).abs() <= 1e-12);
    }

    #[test]
    fn three_stage_is_symmetric_and_bounded(
        d in 0.1..3.0f64, j in 0.1..3.0f64, tau1 in 0.0..0.5f64, tau2 in 0.0..0.5f64, a1 in amp(), a2 in amp()
    ) {
        let p = three_stage_probability(&ThreeStageSpec::new(tau1, tau2, j, a1, a2).unwrap(), d, KickModel::Exact).unwrap();
        let q = three_stage_probability(&ThreeStageSpec::new(tau1, tau2, j, a2, a1).unwrap(), d, KickModel::Exact).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((p - q).abs() <= 1e-12);
    }

    #[test]
    fn time_reversal_inverts(s in schedule()) {
        let u = evolve_unitary(&s).unwrap();
        let r = evolve_unitary(&s.time_reversed()).unwrap();
        prop_assert!(u.followed_by(&r).matrix().max_diff(UnitaryOperator::identity(2).matrix()) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sweeps_are_deterministic(d in det(), hi in 1.0..40.0f64, n in 2usize..9) {
        let spec = SweepSpec::new(Axis::new("amplitude", 0.0, hi, n), Axis::new("time", 0.0, 0.5, n + 1)).with("delta", d);
        let (a, b) = (sweep_single_pulse(&spec).unwrap(), sweep_single_pulse(&spec).unwrap());
        prop_assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
