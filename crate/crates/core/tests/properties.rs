use std::f64::consts::{LN_2, PI};

use central_spin::observables::{entanglement_entropy_central, magnetization_central, magnetization_sat};
use central_spin::{Backend, DriveParams, FloquetOperator, SpinState};
use num_complex::Complex64;
use proptest::prelude::*;

fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn full_case() -> impl Strategy<Value = (usize, SpinState)> {
    (1usize..=7).prop_flat_map(|n| {
        amplitudes(1 << (n + 1))
            .prop_map(move |a| (n, SpinState::from_amplitudes(n, Backend::Full, a).unwrap()))
    })
}

fn symmetric_case() -> impl Strategy<Value = (usize, SpinState)> {
    (1usize..=30).prop_flat_map(|n| {
        amplitudes(2 * (n + 1))
            .prop_map(move |a| (n, SpinState::from_amplitudes(n, Backend::Symmetric, a).unwrap()))
    })
}

fn angle() -> impl Strategy<Value = f64> {
    -4.0 * PI..4.0 * PI
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_preserves_norm((n, mut s) in full_case(), lambda in angle(), g in angle(), steps in 1usize..40) {
        let op = FloquetOperator::new(&DriveParams::uniform(lambda, g), n, Backend::Full).unwrap();
        op.steps(&mut s, steps).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_evolution_preserves_norm((n, mut s) in symmetric_case(), lambda in angle(), g in angle(), steps in 1usize..40) {
        let op = FloquetOperator::new(&DriveParams::uniform(lambda, g), n, Backend::Symmetric).unwrap();
        op.steps(&mut s, steps).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn observables_are_bounded((n, s) in symmetric_case()) {
        let m = magnetization_sat(&s);
        prop_assert!(m.abs() <= n as f64 / 2.0 + 1e-12);
        prop_assert!(magnetization_central(&s).abs() <= 0.5 + 1e-12);
        let e = entanglement_entropy_central(&s);
        prop_assert!((0.0..=LN_2).contains(&e), "S = {}", e);
    }

    #[test]
    fn full_observables_are_bounded((n, s) in full_case()) {
        prop_assert!(magnetization_sat(&s).abs() <= n as f64 / 2.0 + 1e-12);
        let e = entanglement_entropy_central(&s);
        prop_assert!((0.0..=LN_2).contains(&e), "S = {}", e);
    }

    #[test]
    fn backends_agree_on_symmetric_states((n, s) in symmetric_case().prop_filter("small", |(n, _)| *n <= 8),
                                           lambda in angle(), g in angle(), steps in 1usize..20) {
        let p = DriveParams::uniform(lambda, g);
        let mut full = s.to_full().unwrap();
        let mut sym = s.clone();
        FloquetOperator::new(&p, n, Backend::Full).unwrap().steps(&mut full, steps).unwrap();
        FloquetOperator::new(&p, n, Backend::Symmetric).unwrap().steps(&mut sym, steps).unwrap();
        let lifted = sym.to_full().unwrap();
        for (a, b) in full.amplitudes().iter().zip(lifted.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
        prop_assert!((magnetization_sat(&full) - magnetization_sat(&sym)).abs() < 1e-10);
        prop_assert!((entanglement_entropy_central(&full) - entanglement_entropy_central(&sym)).abs() < 1e-9);
    }
}
