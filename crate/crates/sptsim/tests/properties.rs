//! Randomized invariants over the Pauli algebra, circuit text format,
//! state evolution and channels.

use num_complex::Complex64;
use proptest::prelude::*;

use sptsim::circuits::{exact_outcome_distribution, Circuit};
use sptsim::linalg::matmul;
use sptsim::noise::{dephasing_channel, depolarizing_channel, BiasVariant, NoiseModel};
use sptsim::state::{MixedState, PureState};
use sptsim::{Gate, Letter, PauliString, Phase};

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![
        Just(Letter::I),
        Just(Letter::X),
        Just(Letter::Y),
        Just(Letter::Z)
    ]
}

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (proptest::collection::vec(letter(), n), 0u8..4)
        .prop_map(|(ls, e)| PauliString::from_letters(ls).with_phase(Phase::new(e)))
}

/// Pauli string with a real phase, usable inside exponentials.
fn hermitian_pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (proptest::collection::vec(letter(), n), prop_oneof![Just(0u8), Just(2u8)])
        .prop_map(|(ls, e)| PauliString::from_letters(ls).with_phase(Phase::new(e)))
}

fn gate(n: usize) -> BoxedStrategy<Gate<f64>> {
    let q = 0..n;
    let single = prop_oneof![
        q.clone().prop_map(Gate::H),
        q.clone().prop_map(Gate::X),
        q.clone().prop_map(Gate::Y),
        q.clone().prop_map(Gate::Z),
        q.clone().prop_map(Gate::S),
        q.prop_map(Gate::Sdg),
        (hermitian_pauli(n), -10.0..10.0f64)
            .prop_map(|(string, theta)| Gate::PauliExp { string, theta }),
    ];
    if n < 2 {
        return single.boxed();
    }
    let pair = (0..n, 1..n).prop_map(move |(a, d)| (a, (a + d) % n));
    prop_oneof![
        4 => single,
        1 => pair.clone().prop_map(|(a, b)| Gate::Cz(a, b)),
        1 => pair.prop_map(|(control, target)| Gate::Cnot { control, target }),
    ]
    .boxed()
}

fn gates(n: usize, max: usize) -> impl Strategy<Value = Vec<Gate<f64>>> {
    proptest::collection::vec(gate(n), 0..max)
}

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n)
        .prop_map(|pairs| pairs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
        .prop_filter("nonzero norm", |amps: &Vec<Complex64>| {
            amps.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-3
        })
}

fn normalized_state(amps: Vec<Complex64>) -> PureState<f64> {
    let mut state = PureState::from_amplitudes(amps).expect("power-of-two length");
    state.renormalize().expect("nonzero norm");
    state
}

proptest! {
    #[test]
    fn pauli_product_matches_matrix_product(
        (a, b) in (1usize..=3).prop_flat_map(|n| (pauli(n), pauli(n)))
    ) {
        let n = a.n_sites();
        let product = a.mul(&b).unwrap();
        let lhs = product.to_matrix::<f64>();
        let rhs = matmul(&a.to_matrix::<f64>(), &b.to_matrix::<f64>(), 1 << n);
        for (l, r) in lhs.iter().zip(&rhs) {
            prop_assert!((l - r).norm() <= 1e-12);
        }
    }

    #[test]
    fn pauli_product_is_associative(
        (a, b, c) in (1usize..=6).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))
    ) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn pauli_commutation_is_a_phase_swap(
        (a, b) in (1usize..=6).prop_flat_map(|n| (pauli(n), pauli(n)))
    ) {
        let ab = a.mul(&b).unwrap();
        let ba = b.mul(&a).unwrap();
        prop_assert_eq!(ab.letters(), ba.letters());
        let delta = (4 + ab.phase().exponent() - ba.phase().exponent()) % 4;
        if a.commutes_with(&b).unwrap() {
            prop_assert_eq!(delta, 0);
        } else {
            prop_assert_eq!(delta, 2);
        }
    }

    #[test]
    fn pauli_times_dagger_is_identity(
        a in (1usize..=6).prop_flat_map(pauli)
    ) {
        let product = a.mul(&a.dagger()).unwrap();
        prop_assert!(product.is_identity_letters());
        prop_assert_eq!(product.phase(), Phase::ONE);
    }

    #[test]
    fn circuit_text_round_trips(
        (n, pre, post) in (2usize..=4)
            .prop_flat_map(|n| (Just(n), gates(n, 12), gates(n, 6)))
    ) {
        let mut circuit = Circuit::new("prop", n, n).unwrap();
        for g in pre {
            circuit.gate(g).unwrap();
        }
        circuit.measure(0, 0).unwrap();
        circuit.controlled(Gate::X(1), 0).unwrap();
        for g in post {
            circuit.gate(g).unwrap();
        }
        for q in 1..n {
            circuit.measure(q, q).unwrap();
        }
        let parsed = Circuit::from_text(&circuit.to_text()).unwrap();
        prop_assert_eq!(parsed, circuit);
    }

    #[test]
    fn gates_preserve_the_norm(
        (amps, gs) in (1usize..=4)
            .prop_flat_map(|n| (amplitudes(n), gates(n, 16)))
    ) {
        let mut state = normalized_state(amps);
        for g in &gs {
            state.apply_gate(g).unwrap();
        }
        prop_assert!((state.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn pauli_exponential_inverts(
        (amps, string, theta) in (1usize..=4)
            .prop_flat_map(|n| (amplitudes(n), hermitian_pauli(n), -10.0..10.0f64))
    ) {
        let state = normalized_state(amps);
        let mut evolved = state.clone();
        evolved.apply_pauli_exponential(&string, theta).unwrap();
        evolved.apply_pauli_exponential(&string, -theta).unwrap();
        for (a, b) in evolved.amplitudes().iter().zip(state.amplitudes()) {
            prop_assert!((a - b).norm() <= 1e-9);
        }
    }

    #[test]
    fn channels_preserve_trace_and_validity(
        (amps, target, p, depolarize) in (1usize..=3)
            .prop_flat_map(|n| (amplitudes(n), 0..n, 0.0..1.0f64, any::<bool>()))
    ) {
        let channel = if depolarize {
            depolarizing_channel::<f64>(p).unwrap()
        } else {
            dephasing_channel::<f64>(p).unwrap()
        };
        let mut rho = MixedState::from_pure(&normalized_state(amps));
        rho.apply_kraus(&channel, &[target]).unwrap();
        prop_assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-9);
        prop_assert!(rho.validate().is_ok());
    }

    #[test]
    fn exact_distributions_are_distributions(
        (n, gs, eps, symmetric) in (2usize..=4)
            .prop_flat_map(|n| (Just(n), gates(n, 10), 0.0..0.24f64, any::<bool>()))
    ) {
        let mut circuit = Circuit::new("prop", n, n).unwrap();
        for g in gs {
            circuit.gate(g).unwrap();
        }
        for q in 0..n {
            circuit.measure(q, q).unwrap();
        }
        let variant = if symmetric {
            BiasVariant::Symmetric
        } else {
            BiasVariant::Asymmetric
        };
        let noise = NoiseModel::new(None, None, eps, variant).unwrap();
        for model in [None, Some(&noise)] {
            let dist = exact_outcome_distribution(&circuit, model).unwrap();
            prop_assert_eq!(dist.len(), 1 << n);
            let mut total = 0.0;
            for &p in &dist {
                prop_assert!(p >= -1e-12);
                total += p;
            }
            prop_assert!((total - 1.0).abs() <= 1e-9);
        }
    }
}
