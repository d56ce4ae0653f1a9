//! Brute-force oracle checks: the in-place simulator against full
//! Kronecker-product unitaries, the inner product against compensated
//! summation, and the fidelity kernel against its adjoint-composition form.

use num_complex::Complex64;
use qmlkit_core::featmap::{self, FeatureMapKind, FeatureMapSpec};
use qmlkit_core::qsim::{Circuit, Gate, StateVector};
use qmlkit_core::quanv::{self, PixelGrid, QuanvSpec};
use qmlkit_testkit as testkit;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_three_qubit_circuit_matches_matrix_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let circuit = testkit::random_circuit(3, 20, &mut rng);
    let mut state = StateVector::zero(3).unwrap();
    state.apply_circuit(&circuit).unwrap();
    let expected = testkit::apply_by_matrix(&circuit, &StateVector::zero(3).unwrap());
    assert!(testkit::max_abs_diff(state.amps(), &expected) < 1e-10);
}

#[test]
fn simulator_agrees_with_kronecker_oracle_up_to_four_qubits() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..40 {
        let n_qubits = rng.random_range(1..=4);
        let n_gates = rng.random_range(1..=25);
        let circuit = testkit::random_circuit(n_qubits, n_gates, &mut rng);
        let start = testkit::random_state(n_qubits, &mut rng);
        let mut simulated = start.clone();
        simulated.apply_circuit(&circuit).unwrap();
        let expected = testkit::apply_by_matrix(&circuit, &start);
        let diff = testkit::max_abs_diff(simulated.amps(), &expected);
        assert!(diff < 1e-10, "trial {trial}: diff {diff}");
        assert!((simulated.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn inner_product_matches_compensated_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..20 {
        let a = testkit::random_state(3, &mut rng);
        let b = testkit::random_state(3, &mut rng);
        let fast = a.inner_product(&b).unwrap();
        let careful = testkit::kahan_complex_sum(
            a.amps().iter().zip(b.amps().iter()).map(|(x, y)| x.conj() * y),
        );
        assert!((fast - careful).norm() < 1e-12);
    }
}

#[test]
fn zz_map_on_two_pi_inputs_matches_matrix_oracle() {
    use std::f64::consts::PI;
    let spec = FeatureMapSpec::new(FeatureMapKind::Zz, 2, 1).unwrap();
    let circuit = featmap::build_feature_circuit(&spec, &[PI, PI]).unwrap();
    // the ring entangler angle (π−π)(π−π) vanishes, so every RZ(0) sandwich
    // collapses to CNOT·CNOT = I
    let state = featmap::feature_state(&spec, &[PI, PI]).unwrap();
    let expected = testkit::apply_by_matrix(&circuit, &StateVector::zero(2).unwrap());
    assert!(testkit::max_abs_diff(state.amps(), &expected) < 1e-10);

    // and explicitly: H⊗H then RZ(π) per qubit
    let mut reference = Circuit::new(2).unwrap();
    reference.push(Gate::H { wire: 0 }).unwrap();
    reference.push(Gate::H { wire: 1 }).unwrap();
    reference.push(Gate::RZ { wire: 0, angle: PI }).unwrap();
    reference.push(Gate::RZ { wire: 1, angle: PI }).unwrap();
    let by_hand = testkit::apply_by_matrix(&reference, &StateVector::zero(2).unwrap());
    assert!(testkit::max_abs_diff(state.amps(), &by_hand) < 1e-10);
}

#[test]
fn kernel_matches_adjoint_composition_form() {
    // the overlap can also be read as the |0…0⟩ amplitude of
    // U(z)† U(x) |0…0⟩, the form shot-based estimators sample
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for kind in [FeatureMapKind::Angle, FeatureMapKind::Zz] {
        for n_qubits in 1..=3 {
            let spec = FeatureMapSpec::new(kind, n_qubits, 2).unwrap();
            for _ in 0..10 {
                let dim = rng.random_range(1..=2 * n_qubits);
                let x: Vec<f64> = (0..dim)
                    .map(|_| rng.random_range(0.0..std::f64::consts::PI))
                    .collect();
                let z: Vec<f64> = (0..dim)
                    .map(|_| rng.random_range(0.0..std::f64::consts::PI))
                    .collect();
                let direct = featmap::quantum_kernel(&spec, &x, &z).unwrap();

                let mut composed = featmap::feature_state(&spec, &x).unwrap();
                let adjoint = featmap::build_feature_circuit(&spec, &z).unwrap().adjoint();
                composed.apply_circuit(&adjoint).unwrap();
                let alt = composed.amps()[0].norm_sqr();
                assert!((direct - alt).abs() < 1e-10, "{direct} vs {alt}");
            }
        }
    }
}

#[test]
fn quanvolution_matches_full_unitary_oracle() {
    let spec = QuanvSpec::new(2, 42, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pixels: Vec<f64> = (0..16).map(|_| rng.random_range(0.0..=1.0)).collect();
    let image = PixelGrid::new(4, 4, pixels).unwrap();
    let tensor = quanv::quanvolve(&image, &spec).unwrap();
    assert_eq!((tensor.height(), tensor.width(), tensor.channels()), (2, 2, 4));

    let filter = testkit::circuit_unitary(&quanv::random_circuit(&spec));
    for oy in 0..2 {
        for ox in 0..2 {
            // encode the patch through the dense 16x16 unitary instead
            let mut encode = Circuit::new(4).unwrap();
            let (iy, ix) = (oy * 2, ox * 2);
            let patch = [
                image.get(iy, ix),
                image.get(iy, ix + 1),
                image.get(iy + 1, ix),
                image.get(iy + 1, ix + 1),
            ];
            for (wire, &p) in patch.iter().enumerate() {
                encode
                    .push(Gate::RY {
                        wire,
                        angle: std::f64::consts::PI * p,
                    })
                    .unwrap();
            }
            let encoded = testkit::apply_by_matrix(&encode, &StateVector::zero(4).unwrap());
            let final_amps = filter.apply(&encoded);
            for wire in 0..4 {
                let mask = 1usize << wire;
                let expectation: f64 = final_amps
                    .iter()
                    .enumerate()
                    .map(|(i, amp)| {
                        let sign = if i & mask == 0 { 1.0 } else { -1.0 };
                        sign * amp.norm_sqr()
                    })
                    .sum();
                let got = tensor.get(oy, ox, wire);
                assert!(
                    (got - expectation).abs() < 1e-10,
                    "patch ({oy},{ox}) wire {wire}: {got} vs {expectation}"
                );
            }
        }
    }
}

#[test]
fn gram_matrix_matches_pairwise_kernel_calls() {
    let spec = FeatureMapSpec::new(FeatureMapKind::Angle, 3, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let samples: Vec<Vec<f64>> = (0..5)
        .map(|_| {
            (0..3)
                .map(|_| rng.random_range(0.0..std::f64::consts::PI))
                .collect()
        })
        .collect();
    let gram = featmap::gram_matrix(&spec, &samples).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let direct = featmap::quantum_kernel(&spec, &samples[i], &samples[j]).unwrap();
            assert!(
                (gram.get(i, j) - direct).abs() < 1e-12,
                "entry ({i},{j})"
            );
        }
    }
}

#[test]
fn norm_is_preserved_across_long_random_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..10 {
        let n_qubits = rng.random_range(1..=5);
        let circuit = testkit::random_circuit(n_qubits, 120, &mut rng);
        let mut state = StateVector::zero(n_qubits).unwrap();
        state.apply_circuit(&circuit).unwrap();
        assert!((state.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn self_overlap_has_unit_magnitude() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let state = testkit::random_state(4, &mut rng);
    let overlap: Complex64 = state.inner_product(&state).unwrap();
    assert!((overlap.norm() - 1.0).abs() < 1e-10);
}
