//! Brute-force oracles for the test suites: every gate is expanded to its
//! full 2^n x 2^n unitary via Kronecker products and applied by dense
//! matrix-vector multiplication. Deliberately slow and obvious; never used
//! by the library itself.

use num_complex::Complex64;
use qmlkit_core::qsim::{Circuit, Gate, StateVector};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        DenseMatrix { dim, data }
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim);
            data.extend_from_slice(row);
        }
        DenseMatrix { dim, data }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    /// Kronecker product; `other` becomes the faster-varying (low-bit) block.
    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let dim = self.dim * other.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        data[(i * other.dim + k) * dim + (j * other.dim + l)] =
                            a * other.get(k, l);
                    }
                }
            }
        }
        DenseMatrix { dim, data }
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        DenseMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    data[i * dim + j] += a * other.get(k, j);
                }
            }
        }
        DenseMatrix { dim, data }
    }

    pub fn apply(&self, vector: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(vector.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.get(i, j) * vector[j])
                    .sum::<Complex64>()
            })
            .collect()
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single_qubit_matrix(gate: &Gate) -> DenseMatrix {
    let f = core::f64::consts::FRAC_1_SQRT_2;
    match *gate {
        Gate::H { .. } => {
            DenseMatrix::from_rows(&[&[c(f, 0.0), c(f, 0.0)], &[c(f, 0.0), c(-f, 0.0)]])
        }
        Gate::RX { angle, .. } => {
            let (ch, sh) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            DenseMatrix::from_rows(&[&[c(ch, 0.0), c(0.0, -sh)], &[c(0.0, -sh), c(ch, 0.0)]])
        }
        Gate::RY { angle, .. } => {
            let (ch, sh) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            DenseMatrix::from_rows(&[&[c(ch, 0.0), c(-sh, 0.0)], &[c(sh, 0.0), c(ch, 0.0)]])
        }
        Gate::RZ { angle, .. } => DenseMatrix::from_rows(&[
            &[Complex64::from_polar(1.0, -angle / 2.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), Complex64::from_polar(1.0, angle / 2.0)],
        ]),
        _ => panic!("not a single-qubit gate"),
    }
}

/// Kronecker chain with `factors[w]` on wire w (wire 0 least significant).
fn kron_chain(n_qubits: usize, factors: &[DenseMatrix]) -> DenseMatrix {
    assert_eq!(factors.len(), n_qubits);
    let mut out = factors[n_qubits - 1].clone();
    for wire in (0..n_qubits - 1).rev() {
        out = out.kron(&factors[wire]);
    }
    out
}

/// Full 2^n x 2^n unitary of one gate.
pub fn gate_matrix(n_qubits: usize, gate: &Gate) -> DenseMatrix {
    let identity = DenseMatrix::identity(2);
    let p0 = DenseMatrix::from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0)]]);
    let p1 = DenseMatrix::from_rows(&[&[c(0.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]]);
    let x = DenseMatrix::from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]]);
    let z = DenseMatrix::from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(-1.0, 0.0)]]);

    match *gate {
        Gate::H { wire } | Gate::RX { wire, .. } | Gate::RY { wire, .. } | Gate::RZ { wire, .. } => {
            let mut factors = vec![identity; n_qubits];
            factors[wire] = single_qubit_matrix(gate);
            kron_chain(n_qubits, &factors)
        }
        Gate::CNOT { control, target } | Gate::CZ { control, target } => {
            let flip = if matches!(gate, Gate::CNOT { .. }) { x } else { z };
            let mut rest = vec![identity.clone(); n_qubits];
            rest[control] = p0;
            let term0 = kron_chain(n_qubits, &rest);
            let mut act = vec![identity; n_qubits];
            act[control] = p1;
            act[target] = flip;
            let term1 = kron_chain(n_qubits, &act);
            term0.add(&term1)
        }
    }
}

/// Product of all gate matrices of `circuit`, in application order.
pub fn circuit_unitary(circuit: &Circuit) -> DenseMatrix {
    let dim = 1usize << circuit.n_qubits();
    let mut unitary = DenseMatrix::identity(dim);
    for gate in circuit.gates() {
        unitary = gate_matrix(circuit.n_qubits(), gate).matmul(&unitary);
    }
    unitary
}

/// Apply `circuit` to `state` through the dense unitary.
pub fn apply_by_matrix(circuit: &Circuit, state: &StateVector) -> Vec<Complex64> {
    circuit_unitary(circuit).apply(state.amps())
}

/// Compensated (Kahan) complex summation, the "extended precision" reference
/// for inner products.
pub fn kahan_complex_sum(terms: impl Iterator<Item = Complex64>) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for term in terms {
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Largest elementwise distance between two amplitude vectors.
pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Uniformly random circuit from the supported gate set.
pub fn random_circuit(n_qubits: usize, n_gates: usize, rng: &mut impl rand::Rng) -> Circuit {
    use core::f64::consts::TAU;
    let mut circuit = Circuit::new(n_qubits).unwrap();
    for _ in 0..n_gates {
        let kind = if n_qubits == 1 {
            rng.random_range(0..4)
        } else {
            rng.random_range(0..6)
        };
        let wire = rng.random_range(0..n_qubits);
        let angle = rng.random_range(0.0..TAU);
        let gate = match kind {
            0 => Gate::H { wire },
            1 => Gate::RX { wire, angle },
            2 => Gate::RY { wire, angle },
            3 => Gate::RZ { wire, angle },
            k => {
                let mut other = rng.random_range(0..n_qubits - 1);
                if other >= wire {
                    other += 1;
                }
                if k == 4 {
                    Gate::CNOT {
                        control: wire,
                        target: other,
                    }
                } else {
                    Gate::CZ {
                        control: wire,
                        target: other,
                    }
                }
            }
        };
        circuit.push(gate).unwrap();
    }
    circuit
}

/// A random normalized state: a random circuit applied to |0…0⟩.
pub fn random_state(n_qubits: usize, rng: &mut impl rand::Rng) -> StateVector {
    let circuit = random_circuit(n_qubits, 4 * n_qubits + 4, rng);
    let mut state = StateVector::zero(n_qubits).unwrap();
    state.apply_circuit(&circuit).unwrap();
    state
}
