//! Exact dense statevector simulation of small quantum circuits.
//!
//! Amplitudes are indexed with qubit 0 as the least significant bit, so the
//! basis state |q_{n-1} … q_1 q_0⟩ sits at index Σ q_k·2^k. Rotation
//! conventions follow RX(θ)=exp(−iθX/2), RY(θ)=exp(−iθY/2),
//! RZ(θ)=exp(−iθZ/2). Gates update amplitudes in place; no 2^n×2^n matrix is
//! ever built outside of test oracles.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Hard cap on register width: 2^20 amplitudes (16 MiB) per state.
pub const MAX_QUBITS: usize = 20;

/// A single gate from the supported set.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Gate {
    H { wire: usize },
    RX { wire: usize, angle: f64 },
    RY { wire: usize, angle: f64 },
    RZ { wire: usize, angle: f64 },
    /// Controlled NOT; flips `target` where `control` is 1.
    CNOT { control: usize, target: usize },
    /// Controlled Z; negates amplitudes where both wires are 1.
    CZ { control: usize, target: usize },
}

impl Gate {
    /// Check wire indices against a register of `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |wire: usize| {
            if wire < n_qubits {
                Ok(())
            } else {
                Err(Error::WireOutOfRange { wire, n_qubits })
            }
        };
        match *self {
            Gate::H { wire }
            | Gate::RX { wire, .. }
            | Gate::RY { wire, .. }
            | Gate::RZ { wire, .. } => check(wire),
            Gate::CNOT { control, target } | Gate::CZ { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::DuplicateWires(control));
                }
                Ok(())
            }
        }
    }

    /// The inverse gate: rotations negate their angle, everything else is
    /// its own inverse.
    pub fn adjoint(&self) -> Gate {
        match *self {
            Gate::RX { wire, angle } => Gate::RX { wire, angle: -angle },
            Gate::RY { wire, angle } => Gate::RY { wire, angle: -angle },
            Gate::RZ { wire, angle } => Gate::RZ { wire, angle: -angle },
            other => other,
        }
    }
}

/// An ordered gate list over a fixed register width.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(Circuit {
            n_qubits,
            gates: Vec::new(),
        })
    }

    /// Append a gate after validating its wires.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The inverse circuit: gates reversed, each replaced by its adjoint.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }
}

/// Dense amplitude vector over `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Wrap an existing amplitude vector; the length must be 2^n_qubits.
    pub fn from_amps(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: 1 << n_qubits,
            });
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// L2 norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// Apply one gate in place.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::H { wire } => {
                let f = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(wire, f, f, f, -f);
            }
            Gate::RX { wire, angle } => {
                let c = Complex64::new((angle / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(angle / 2.0).sin());
                self.apply_single(wire, c, s, s, c);
            }
            Gate::RY { wire, angle } => {
                let c = Complex64::new((angle / 2.0).cos(), 0.0);
                let s = (angle / 2.0).sin();
                self.apply_single(
                    wire,
                    c,
                    Complex64::new(-s, 0.0),
                    Complex64::new(s, 0.0),
                    c,
                );
            }
            Gate::RZ { wire, angle } => {
                let phase0 = Complex64::from_polar(1.0, -angle / 2.0);
                let phase1 = Complex64::from_polar(1.0, angle / 2.0);
                let mask = 1usize << wire;
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= if i & mask == 0 { phase0 } else { phase1 };
                }
            }
            Gate::CNOT { control, target } => {
                let cmask = 1usize << control;
                let tmask = 1usize << target;
                for i in 0..self.amps.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amps.swap(i, i | tmask);
                    }
                }
            }
            Gate::CZ { control, target } => {
                let mask = (1usize << control) | (1usize << target);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
        }
        Ok(())
    }

    /// Apply every gate of `circuit` in order. The empty circuit is the
    /// identity.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: circuit.n_qubits(),
                right: self.n_qubits,
            });
        }
        for gate in circuit.gates() {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    /// ⟨self|other⟩ = Σ conj(a_i)·b_i.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Expectation of Pauli Z on `wire`: 1 − 2·P(bit = 1), clamped so that
    /// rounding in the probability sum cannot push it below −1.
    pub fn z_expectation(&self, wire: usize) -> Result<f64> {
        if wire >= self.n_qubits {
            return Err(Error::WireOutOfRange {
                wire,
                n_qubits: self.n_qubits,
            });
        }
        let mask = 1usize << wire;
        let prob_one: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        Ok((1.0 - 2.0 * prob_one).max(-1.0))
    }

    /// 2x2 unitary [[u00, u01], [u10, u11]] on `target`, updating amplitude
    /// pairs that differ only in the target bit.
    fn apply_single(
        &mut self,
        target: usize,
        u00: Complex64,
        u01: Complex64,
        u10: Complex64,
        u11: Complex64,
    ) {
        let step = 1usize << target;
        for base in (0..self.amps.len()).step_by(2 * step) {
            for offset in 0..step {
                let lo = base + offset;
                let hi = lo + step;
                let a = self.amps[lo];
                let b = self.amps[hi];
                self.amps[lo] = u00 * a + u01 * b;
                self.amps[hi] = u10 * a + u11 * b;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn approx(a: Complex64, re: f64, im: f64) -> bool {
        (a.re - re).abs() < 1e-12 && (a.im - im).abs() < 1e-12
    }

    #[test]
    fn zero_state_is_all_zeros_basis() {
        let s = StateVector::zero(1).unwrap();
        assert!(approx(s.amps()[0], 1.0, 0.0));
        assert!(approx(s.amps()[1], 0.0, 0.0));

        let s = StateVector::zero(2).unwrap();
        assert_eq!(s.amps().len(), 4);
        assert!(approx(s.amps()[0], 1.0, 0.0));
        for amp in &s.amps()[1..] {
            assert!(approx(*amp, 0.0, 0.0));
        }
    }

    #[test]
    fn zero_state_capacity_bounds() {
        assert_eq!(
            StateVector::zero(21),
            Err(Error::Capacity {
                requested: 21,
                max: 20
            })
        );
        assert!(StateVector::zero(0).is_err());
        assert!(StateVector::zero(20).is_ok());
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_gate(&Gate::H { wire: 0 }).unwrap();
        assert!(approx(s.amps()[0], FRAC_1_SQRT_2, 0.0));
        assert!(approx(s.amps()[1], FRAC_1_SQRT_2, 0.0));
    }

    #[test]
    fn ry_pi_flips_qubit() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_gate(&Gate::RY { wire: 0, angle: PI }).unwrap();
        assert!(s.amps()[0].norm() < 1e-12);
        assert!(approx(s.amps()[1], 1.0, 0.0));
    }

    #[test]
    fn cnot_truth_table() {
        // |10⟩ means qubit 1 = 1, qubit 0 = 0, i.e. amplitude index 0b10.
        let mut s = StateVector::zero(2).unwrap();
        s.apply_gate(&Gate::RY { wire: 1, angle: PI }).unwrap(); // -> |10⟩
        s.apply_gate(&Gate::CNOT {
            control: 1,
            target: 0,
        })
        .unwrap();
        assert!((s.amps()[0b11].norm() - 1.0).abs() < 1e-12);

        // Control 0 leaves the target untouched.
        let mut s = StateVector::zero(2).unwrap();
        s.apply_gate(&Gate::CNOT {
            control: 1,
            target: 0,
        })
        .unwrap();
        assert!((s.amps()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cz_negates_only_on_both_ones() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply_gate(&Gate::H { wire: 0 }).unwrap();
        s.apply_gate(&Gate::H { wire: 1 }).unwrap();
        s.apply_gate(&Gate::CZ {
            control: 0,
            target: 1,
        })
        .unwrap();
        assert!(approx(s.amps()[0], 0.5, 0.0));
        assert!(approx(s.amps()[1], 0.5, 0.0));
        assert!(approx(s.amps()[2], 0.5, 0.0));
        assert!(approx(s.amps()[3], -0.5, 0.0));
    }

    #[test]
    fn empty_circuit_is_identity() {
        let mut s = StateVector::zero(3).unwrap();
        s.apply_gate(&Gate::H { wire: 1 }).unwrap();
        let before = s.clone();
        s.apply_circuit(&Circuit::new(3).unwrap()).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn double_hadamard_is_identity() {
        let mut c = Circuit::new(1).unwrap();
        c.push(Gate::H { wire: 0 }).unwrap();
        c.push(Gate::H { wire: 0 }).unwrap();
        let mut s = StateVector::zero(1).unwrap();
        s.apply_circuit(&c).unwrap();
        assert!((s.amps()[0].re - 1.0).abs() < 1e-12);
        assert!(s.amps()[1].norm() < 1e-12);
    }

    #[test]
    fn circuit_qubit_mismatch_rejected() {
        let c = Circuit::new(2).unwrap();
        let mut s = StateVector::zero(3).unwrap();
        assert_eq!(
            s.apply_circuit(&c),
            Err(Error::QubitMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn gate_wire_validation() {
        let mut s = StateVector::zero(2).unwrap();
        assert_eq!(
            s.apply_gate(&Gate::H { wire: 2 }),
            Err(Error::WireOutOfRange {
                wire: 2,
                n_qubits: 2
            })
        );
        assert_eq!(
            s.apply_gate(&Gate::CNOT {
                control: 1,
                target: 1
            }),
            Err(Error::DuplicateWires(1))
        );
    }

    #[test]
    fn inner_product_basics() {
        let a = StateVector::zero(1).unwrap();
        let mut b = StateVector::zero(1).unwrap();
        b.apply_gate(&Gate::RY { wire: 0, angle: PI }).unwrap();
        // orthogonal states
        assert!(a.inner_product(&b).unwrap().norm() < 1e-12);
        // self-overlap of a normalized state has unit magnitude
        let mut c = StateVector::zero(3).unwrap();
        c.apply_gate(&Gate::H { wire: 0 }).unwrap();
        c.apply_gate(&Gate::RX {
            wire: 2,
            angle: 0.7,
        })
        .unwrap();
        assert!((c.inner_product(&c).unwrap().norm() - 1.0).abs() < 1e-10);
        // size mismatch
        let d = StateVector::zero(2).unwrap();
        assert!(a.inner_product(&d).is_err());
    }

    #[test]
    fn z_expectation_cases() {
        let s = StateVector::zero(4).unwrap();
        for wire in 0..4 {
            assert!((s.z_expectation(wire).unwrap() - 1.0).abs() < 1e-12);
        }
        let mut s = StateVector::zero(2).unwrap();
        s.apply_gate(&Gate::RY { wire: 0, angle: PI }).unwrap();
        assert!((s.z_expectation(0).unwrap() + 1.0).abs() < 1e-12);
        assert!((s.z_expectation(1).unwrap() - 1.0).abs() < 1e-12);

        let mut s = StateVector::zero(1).unwrap();
        s.apply_gate(&Gate::RY {
            wire: 0,
            angle: PI / 2.0,
        })
        .unwrap();
        assert!(s.z_expectation(0).unwrap().abs() < 1e-12);

        assert!(s.z_expectation(1).is_err());
    }

    #[test]
    fn adjoint_reverses_and_negates() {
        let mut c = Circuit::new(2).unwrap();
        c.push(Gate::RY {
            wire: 0,
            angle: 0.3,
        })
        .unwrap();
        c.push(Gate::CNOT {
            control: 0,
            target: 1,
        })
        .unwrap();
        let adj = c.adjoint();
        assert_eq!(
            adj.gates()[0],
            Gate::CNOT {
                control: 0,
                target: 1
            }
        );
        assert_eq!(
            adj.gates()[1],
            Gate::RY {
                wire: 0,
                angle: -0.3
            }
        );

        // circuit followed by its adjoint restores the state
        let mut s = StateVector::zero(2).unwrap();
        s.apply_circuit(&c).unwrap();
        s.apply_circuit(&adj).unwrap();
        assert!((s.amps()[0].re - 1.0).abs() < 1e-12);
    }
}
