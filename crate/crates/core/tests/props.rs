//! Property tests over the simulator and kernel invariants.

use proptest::prelude::*;
use qmlkit_core::featmap::{self, FeatureMapKind, FeatureMapSpec};
use qmlkit_core::nn;
use qmlkit_core::qsim::{Gate, StateVector};
use qmlkit_testkit as testkit;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn feature_vec(len: core::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..PI, len)
}

proptest! {
    #[test]
    fn gate_sequences_preserve_norm(seed in any::<u64>(), n_gates in 1usize..60, n_qubits in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circuit = testkit::random_circuit(n_qubits, n_gates, &mut rng);
        let mut state = StateVector::zero(n_qubits).unwrap();
        state.apply_circuit(&circuit).unwrap();
        prop_assert!((state.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn involutions_restore_the_state(seed in any::<u64>(), wire in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = testkit::random_state(3, &mut rng);
        let pairs = [
            Gate::H { wire },
            Gate::CNOT { control: wire, target: (wire + 1) % 3 },
            Gate::CZ { control: wire, target: (wire + 1) % 3 },
        ];
        for gate in pairs {
            let mut twice = state.clone();
            twice.apply_gate(&gate).unwrap();
            twice.apply_gate(&gate).unwrap();
            prop_assert!(testkit::max_abs_diff(twice.amps(), state.amps()) < 1e-12);
        }
    }

    #[test]
    fn rotations_add_angles(seed in any::<u64>(), a in -PI..PI, b in -PI..PI) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = testkit::random_state(1, &mut rng);
        let mut split = state.clone();
        split.apply_gate(&Gate::RY { wire: 0, angle: a }).unwrap();
        split.apply_gate(&Gate::RY { wire: 0, angle: b }).unwrap();
        let mut joined = state;
        joined.apply_gate(&Gate::RY { wire: 0, angle: a + b }).unwrap();
        prop_assert!(testkit::max_abs_diff(split.amps(), joined.amps()) < 1e-12);
    }

    #[test]
    fn z_expectation_is_one_minus_twice_probability(seed in any::<u64>(), wire in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = testkit::random_state(3, &mut rng);
        let z = state.z_expectation(wire).unwrap();
        prop_assert!((-1.0..=1.0).contains(&z));
        let mask = 1usize << wire;
        let p_one: f64 = state
            .amps()
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, amp)| amp.norm_sqr())
            .sum();
        prop_assert!((z - (1.0 - 2.0 * p_one)).abs() < 1e-12);
    }

    #[test]
    fn kernel_is_symmetric_and_self_similar(
        x in feature_vec(1..7),
        seed in any::<u64>(),
        zz in any::<bool>(),
    ) {
        let kind = if zz { FeatureMapKind::Zz } else { FeatureMapKind::Angle };
        let spec = FeatureMapSpec::for_features(kind, x.len()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: Vec<f64> = (0..x.len()).map(|_| rand::Rng::random_range(&mut rng, 0.0..PI)).collect();
        let xz = featmap::quantum_kernel(&spec, &x, &z).unwrap();
        let zx = featmap::quantum_kernel(&spec, &z, &x).unwrap();
        prop_assert!((xz - zx).abs() < 1e-12);
        prop_assert!((-1e-10..=1.0 + 1e-10).contains(&xz));
        let xx = featmap::quantum_kernel(&spec, &x, &x).unwrap();
        prop_assert!((xx - 1.0).abs() < 1e-10);
    }

    #[test]
    fn softmax_is_a_shift_invariant_distribution(
        logits in prop::collection::vec(-30.0f64..30.0, 1..8),
        shift in -50.0f64..50.0,
    ) {
        let mut probs = logits.clone();
        nn::softmax_in_place(&mut probs);
        let sum: f64 = probs.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        let mut shifted: Vec<f64> = logits.iter().map(|v| v + shift).collect();
        nn::softmax_in_place(&mut shifted);
        for (p, q) in probs.iter().zip(shifted.iter()) {
            prop_assert!((p - q).abs() < 1e-12);
        }
    }
}
