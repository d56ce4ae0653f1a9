//! Feature-map circuits and the quantum fidelity kernel.
//!
//! A feature map compiles a real vector x (pre-scaled to [0, π]) into a
//! circuit U(x); the kernel between two vectors is the state fidelity
//! k(x, z) = |⟨ψ(z)|ψ(x)⟩|² with ψ(v) = U(v)|0…0⟩.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::qsim::{Circuit, Gate, StateVector};

/// Slack allowed when validating that features sit in [0, π].
const RANGE_SLACK: f64 = 1e-9;

/// Default cap on the bytes spent caching prepared states during Gram
/// computation; past it, states are recomputed per pair.
pub const DEFAULT_STATE_CACHE_BYTES: usize = 2 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum FeatureMapKind {
    /// Per layer: RY(x_i) on qubit i mod n for every feature i, then a CNOT
    /// ring q → q+1 (skipped on a single qubit).
    Angle,
    /// Per layer: H on every qubit, RZ of one feature per qubit (features
    /// wrap across layers), then CNOT·RZ((π−x_a)(π−x_b))·CNOT on each ring
    /// pair.
    Zz,
}

/// Shape of a feature-map circuit. Inputs are expected in [0, π]; scaling is
/// the caller's job.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureMapSpec {
    pub kind: FeatureMapKind,
    pub n_qubits: usize,
    pub n_layers: usize,
}

impl FeatureMapSpec {
    pub fn new(kind: FeatureMapKind, n_qubits: usize, n_layers: usize) -> Result<Self> {
        let spec = FeatureMapSpec {
            kind,
            n_qubits,
            n_layers,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default shape for a feature count: at most 10 qubits, with enough
    /// layers that every feature is uploaded at least once.
    pub fn for_features(kind: FeatureMapKind, n_features: usize) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::Empty("feature vector"));
        }
        let n_qubits = n_features.min(10);
        Self::new(kind, n_qubits, n_features.div_ceil(n_qubits))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > crate::qsim::MAX_QUBITS {
            return Err(Error::Capacity {
                requested: self.n_qubits,
                max: crate::qsim::MAX_QUBITS,
            });
        }
        if self.n_layers == 0 {
            return Err(Error::Empty("layer count"));
        }
        Ok(())
    }

    /// Closed-form gate count of the compiled circuit for `n_features`
    /// inputs.
    pub fn gate_count(&self, n_features: usize) -> usize {
        let ring = if self.n_qubits > 1 { self.n_qubits } else { 0 };
        match self.kind {
            FeatureMapKind::Angle => self.n_layers * (n_features + ring),
            FeatureMapKind::Zz => self.n_layers * (2 * self.n_qubits + 3 * ring),
        }
    }
}

fn validate_features(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Empty("feature vector"));
    }
    for &v in x {
        if !v.is_finite() || v < -RANGE_SLACK || v > PI + RANGE_SLACK {
            return Err(Error::OutOfRange {
                what: "feature",
                value: v,
                lo: 0.0,
                hi: PI,
            });
        }
    }
    Ok(())
}

/// Compile `x` into its feature-map circuit. Deterministic: the same
/// (spec, x) always yields an identical gate list.
pub fn build_feature_circuit(spec: &FeatureMapSpec, x: &[f64]) -> Result<Circuit> {
    spec.validate()?;
    validate_features(x)?;
    let q = spec.n_qubits;
    let mut circuit = Circuit::new(q)?;
    match spec.kind {
        FeatureMapKind::Angle => {
            for _ in 0..spec.n_layers {
                for (i, &xi) in x.iter().enumerate() {
                    circuit.push(Gate::RY {
                        wire: i % q,
                        angle: xi,
                    })?;
                }
                if q > 1 {
                    for w in 0..q {
                        circuit.push(Gate::CNOT {
                            control: w,
                            target: (w + 1) % q,
                        })?;
                    }
                }
            }
        }
        FeatureMapKind::Zz => {
            for layer in 0..spec.n_layers {
                for w in 0..q {
                    circuit.push(Gate::H { wire: w })?;
                }
                // feature loaded on qubit w in this layer
                let feat = |w: usize| x[(layer * q + w) % x.len()];
                for w in 0..q {
                    circuit.push(Gate::RZ {
                        wire: w,
                        angle: feat(w),
                    })?;
                }
                if q > 1 {
                    for w in 0..q {
                        let next = (w + 1) % q;
                        circuit.push(Gate::CNOT {
                            control: w,
                            target: next,
                        })?;
                        circuit.push(Gate::RZ {
                            wire: next,
                            angle: (PI - feat(w)) * (PI - feat(next)),
                        })?;
                        circuit.push(Gate::CNOT {
                            control: w,
                            target: next,
                        })?;
                    }
                }
            }
        }
    }
    debug_assert_eq!(circuit.len(), spec.gate_count(x.len()));
    Ok(circuit)
}

/// ψ(x) = U(x)|0…0⟩.
pub fn feature_state(spec: &FeatureMapSpec, x: &[f64]) -> Result<StateVector> {
    let circuit = build_feature_circuit(spec, x)?;
    let mut state = StateVector::zero(spec.n_qubits)?;
    state.apply_circuit(&circuit)?;
    Ok(state)
}

/// |⟨a|b⟩|² of two prepared states.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner_product(b)?.norm_sqr())
}

/// Fidelity kernel k(x, z) = |⟨ψ(z)|ψ(x)⟩|², symmetric in (x, z).
pub fn quantum_kernel(spec: &FeatureMapSpec, x: &[f64], z: &[f64]) -> Result<f64> {
    if x.len() != z.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: z.len(),
        });
    }
    let psi_x = feature_state(spec, x)?;
    let psi_z = feature_state(spec, z)?;
    fidelity(&psi_z, &psi_x)
}

/// Kernel matrix with the spec that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    spec: FeatureMapSpec,
}

impl GramMatrix {
    pub fn from_values(
        rows: usize,
        cols: usize,
        values: Vec<f64>,
        spec: FeatureMapSpec,
    ) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: rows * cols,
            });
        }
        Ok(GramMatrix {
            rows,
            cols,
            values,
            spec,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    /// Row-major backing slice.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spec(&self) -> &FeatureMapSpec {
        &self.spec
    }
}

fn check_dims(samples: &[Vec<f64>], dim: usize) -> Result<()> {
    for s in samples {
        if s.len() != dim {
            return Err(Error::DimensionMismatch {
                left: s.len(),
                right: dim,
            });
        }
    }
    Ok(())
}

fn cache_bytes(n_states: usize, n_qubits: usize) -> usize {
    n_states
        .saturating_mul(1 << n_qubits)
        .saturating_mul(core::mem::size_of::<num_complex::Complex64>())
}

/// Square Gram matrix over one sample set: only the upper triangle is
/// computed, then mirrored. Each row's state is prepared once and reused
/// while the cache fits in `DEFAULT_STATE_CACHE_BYTES`.
pub fn gram_matrix(spec: &FeatureMapSpec, samples: &[Vec<f64>]) -> Result<GramMatrix> {
    gram_matrix_with_cap(spec, samples, DEFAULT_STATE_CACHE_BYTES)
}

/// As [`gram_matrix`] with an explicit state-cache cap in bytes; past the
/// cap, states are recomputed per pair.
pub fn gram_matrix_with_cap(
    spec: &FeatureMapSpec,
    samples: &[Vec<f64>],
    cap_bytes: usize,
) -> Result<GramMatrix> {
    if samples.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    check_dims(samples, samples[0].len())?;
    let n = samples.len();
    let mut values = alloc::vec![0.0; n * n];

    if cache_bytes(n, spec.n_qubits) <= cap_bytes {
        let states: Vec<StateVector> = samples
            .iter()
            .map(|x| feature_state(spec, x))
            .collect::<Result<_>>()?;
        for i in 0..n {
            for j in i..n {
                let k = fidelity(&states[i], &states[j])?;
                values[i * n + j] = k;
                values[j * n + i] = k;
            }
        }
    } else {
        for i in 0..n {
            let psi_i = feature_state(spec, &samples[i])?;
            for j in i..n {
                let psi_j = feature_state(spec, &samples[j])?;
                let k = fidelity(&psi_i, &psi_j)?;
                values[i * n + j] = k;
                values[j * n + i] = k;
            }
        }
    }
    GramMatrix::from_values(n, n, values, *spec)
}

/// Rectangular Gram matrix: entry (i, j) = k(rows[i], cols[j]).
pub fn gram_matrix_rect(
    spec: &FeatureMapSpec,
    rows: &[Vec<f64>],
    cols: &[Vec<f64>],
) -> Result<GramMatrix> {
    gram_matrix_rect_with_cap(spec, rows, cols, DEFAULT_STATE_CACHE_BYTES)
}

pub fn gram_matrix_rect_with_cap(
    spec: &FeatureMapSpec,
    rows: &[Vec<f64>],
    cols: &[Vec<f64>],
    cap_bytes: usize,
) -> Result<GramMatrix> {
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    let dim = rows[0].len();
    check_dims(rows, dim)?;
    check_dims(cols, dim)?;
    let (n, m) = (rows.len(), cols.len());
    let mut values = alloc::vec![0.0; n * m];

    if cache_bytes(m + 1, spec.n_qubits) <= cap_bytes {
        let col_states: Vec<StateVector> = cols
            .iter()
            .map(|x| feature_state(spec, x))
            .collect::<Result<_>>()?;
        for i in 0..n {
            let psi_i = feature_state(spec, &rows[i])?;
            for (j, psi_j) in col_states.iter().enumerate() {
                values[i * m + j] = fidelity(&psi_i, psi_j)?;
            }
        }
    } else {
        for i in 0..n {
            let psi_i = feature_state(spec, &rows[i])?;
            for (j, col) in cols.iter().enumerate() {
                let psi_j = feature_state(spec, col)?;
                values[i * m + j] = fidelity(&psi_i, &psi_j)?;
            }
        }
    }
    GramMatrix::from_values(n, m, values, *spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn angle(n_qubits: usize, n_layers: usize) -> FeatureMapSpec {
        FeatureMapSpec::new(FeatureMapKind::Angle, n_qubits, n_layers).unwrap()
    }

    #[test]
    fn angle_zero_vector_keeps_ground_state() {
        let state = feature_state(&angle(2, 1), &[0.0, 0.0]).unwrap();
        assert!((state.amps()[0].re - 1.0).abs() < 1e-12);
        for amp in &state.amps()[1..] {
            assert!(amp.norm() < 1e-12);
        }
    }

    #[test]
    fn angle_single_qubit_pi_flips() {
        let state = feature_state(&angle(1, 1), &[PI]).unwrap();
        assert!(state.amps()[0].norm() < 1e-12);
        assert!((state.amps()[1].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_examples() {
        let spec = angle(1, 1);
        assert!((quantum_kernel(&spec, &[0.7], &[0.7]).unwrap() - 1.0).abs() < 1e-10);
        assert!(quantum_kernel(&spec, &[0.0], &[PI]).unwrap().abs() < 1e-12);
        assert!((quantum_kernel(&spec, &[0.0], &[PI / 2.0]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kernel_rejects_length_mismatch() {
        let spec = angle(2, 1);
        assert_eq!(
            quantum_kernel(&spec, &[0.1, 0.2], &[0.1]),
            Err(Error::DimensionMismatch { left: 2, right: 1 })
        );
    }

    #[test]
    fn feature_range_is_validated() {
        let spec = angle(2, 1);
        assert!(build_feature_circuit(&spec, &[0.0, PI]).is_ok());
        assert!(matches!(
            build_feature_circuit(&spec, &[0.0, PI + 1e-6]),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            build_feature_circuit(&spec, &[-0.5, 0.0]),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            build_feature_circuit(&spec, &[]),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn gate_counts_match_closed_form() {
        for (kind, q, layers, feats) in [
            (FeatureMapKind::Angle, 1, 1, 1),
            (FeatureMapKind::Angle, 2, 1, 2),
            (FeatureMapKind::Angle, 3, 2, 7),
            (FeatureMapKind::Zz, 1, 2, 3),
            (FeatureMapKind::Zz, 2, 1, 2),
            (FeatureMapKind::Zz, 4, 3, 9),
        ] {
            let spec = FeatureMapSpec::new(kind, q, layers).unwrap();
            let x: Vec<f64> = (0..feats).map(|i| 0.1 * i as f64).collect();
            let circuit = build_feature_circuit(&spec, &x).unwrap();
            assert_eq!(circuit.len(), spec.gate_count(feats));
        }
    }

    #[test]
    fn circuits_are_deterministic() {
        let spec = FeatureMapSpec::new(FeatureMapKind::Zz, 3, 2).unwrap();
        let x = vec![0.3, 1.1, 2.0, 0.4];
        assert_eq!(
            build_feature_circuit(&spec, &x).unwrap(),
            build_feature_circuit(&spec, &x).unwrap()
        );
    }

    #[test]
    fn default_spec_covers_all_features() {
        let spec = FeatureMapSpec::for_features(FeatureMapKind::Angle, 21).unwrap();
        assert_eq!(spec.n_qubits, 10);
        assert_eq!(spec.n_layers, 3);
        let spec = FeatureMapSpec::for_features(FeatureMapKind::Angle, 4).unwrap();
        assert_eq!(spec.n_qubits, 4);
        assert_eq!(spec.n_layers, 1);
    }

    #[test]
    fn duplicate_points_give_unit_gram() {
        let spec = angle(2, 1);
        let x = vec![vec![0.4, 1.2], vec![0.4, 1.2]];
        let gram = gram_matrix(&spec, &x).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((gram.get(i, j) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rect_gram_shape_and_range() {
        let spec = angle(2, 1);
        let rows = vec![vec![0.1, 0.2], vec![1.0, 2.0], vec![3.0, 0.5]];
        let cols = vec![vec![0.9, 0.9], vec![2.2, 0.1]];
        let gram = gram_matrix_rect(&spec, &rows, &cols).unwrap();
        assert_eq!((gram.rows(), gram.cols()), (3, 2));
        for &v in gram.values() {
            assert!((-1e-10..=1.0 + 1e-10).contains(&v));
        }
    }

    #[test]
    fn capped_gram_matches_cached_gram_exactly() {
        let spec = angle(3, 2);
        let samples: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                (0..4)
                    .map(|j| (i as f64 * 0.37 + j as f64 * 0.71) % PI)
                    .collect()
            })
            .collect();
        let cached = gram_matrix(&spec, &samples).unwrap();
        let streamed = gram_matrix_with_cap(&spec, &samples, 0).unwrap();
        assert_eq!(cached.values(), streamed.values());

        let rect_cached = gram_matrix_rect(&spec, &samples[..3], &samples[3..]).unwrap();
        let rect_streamed =
            gram_matrix_rect_with_cap(&spec, &samples[..3], &samples[3..], 0).unwrap();
        assert_eq!(rect_cached.values(), rect_streamed.values());
    }
}
