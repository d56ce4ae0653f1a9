//! Quanvolution pre-processing: a seeded random 4-qubit circuit slides over
//! 2x2 image patches and each qubit's Z expectation becomes one output
//! channel.
//!
//! The circuit is shared across all patches of an image, playing the role of
//! convolutional weight sharing. Randomness comes from ChaCha8 seeded with
//! `QuanvSpec::seed`; per layer the generator draws the rotation kind, one
//! angle per qubit in wire order, then the CNOT control and target. That
//! draw order is frozen by a golden test.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qsim::{Circuit, Gate, StateVector};

const RANGE_SLACK: f64 = 1e-9;

/// Shape of the quanvolution filter. Patches are fixed at 2x2, one qubit per
/// pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuanvSpec {
    /// Random layers in the shared circuit; 0 means encoding only.
    pub depth: usize,
    pub seed: u64,
    pub stride: usize,
}

impl QuanvSpec {
    pub const PATCH_SIZE: usize = 2;
    pub const N_QUBITS: usize = 4;

    pub fn new(depth: usize, seed: u64, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::OutOfRange {
                what: "stride",
                value: 0.0,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        Ok(QuanvSpec {
            depth,
            seed,
            stride,
        })
    }
}

impl Default for QuanvSpec {
    fn default() -> Self {
        QuanvSpec {
            depth: 2,
            seed: 42,
            stride: 2,
        }
    }
}

/// Row-major grayscale image with pixels in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct PixelGrid {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl PixelGrid {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != height * width {
            return Err(Error::DimensionMismatch {
                left: pixels.len(),
                right: height * width,
            });
        }
        Ok(PixelGrid {
            height,
            width,
            pixels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }
}

/// Output of a quanvolution pass: `channels` values per output pixel, all in
/// [-1, 1], stored row-major as (y, x, channel).
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTensor {
    height: usize,
    width: usize,
    channels: usize,
    values: Vec<f64>,
}

impl FeatureTensor {
    pub fn from_values(
        height: usize,
        width: usize,
        channels: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != height * width * channels {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: height * width * channels,
            });
        }
        for &v in &values {
            if !v.is_finite() || v < -1.0 - RANGE_SLACK || v > 1.0 + RANGE_SLACK {
                return Err(Error::OutOfRange {
                    what: "feature value",
                    value: v,
                    lo: -1.0,
                    hi: 1.0,
                });
            }
        }
        Ok(FeatureTensor {
            height,
            width,
            channels,
            values,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn get(&self, y: usize, x: usize, channel: usize) -> f64 {
        self.values[(y * self.width + x) * self.channels + channel]
    }

    /// Flat (y, x, channel) row-major view, the order fed to the classifier.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Build the shared filter circuit for a spec. Deterministic in the seed;
/// depth 0 yields an empty circuit.
pub fn random_circuit(spec: &QuanvSpec) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut circuit = Circuit::new(QuanvSpec::N_QUBITS).expect("fixed 4-qubit register");
    for _ in 0..spec.depth {
        let kind = rng.random_range(0..3u8);
        for wire in 0..QuanvSpec::N_QUBITS {
            let angle = rng.random_range(0.0..TAU);
            let gate = match kind {
                0 => Gate::RX { wire, angle },
                1 => Gate::RY { wire, angle },
                _ => Gate::RZ { wire, angle },
            };
            circuit.push(gate).expect("wire in range");
        }
        let control = rng.random_range(0..QuanvSpec::N_QUBITS);
        let mut target = rng.random_range(0..QuanvSpec::N_QUBITS - 1);
        if target >= control {
            target += 1;
        }
        circuit
            .push(Gate::CNOT { control, target })
            .expect("distinct wires in range");
    }
    circuit
}

/// One patch through the filter: pixel k drives qubit k via RY(π·p_k)
/// (row-major within the patch), then the shared circuit runs and each
/// qubit's Z expectation is read out.
pub fn patch_response(pixels: [f64; 4], circuit: &Circuit) -> Result<[f64; 4]> {
    let mut state = StateVector::zero(QuanvSpec::N_QUBITS)?;
    for (wire, &p) in pixels.iter().enumerate() {
        state.apply_gate(&Gate::RY {
            wire,
            angle: PI * p,
        })?;
    }
    state.apply_circuit(circuit)?;
    let mut out = [0.0; 4];
    for (wire, slot) in out.iter_mut().enumerate() {
        *slot = state.z_expectation(wire)?;
    }
    Ok(out)
}

/// Validate an image against a spec and give the output grid dims:
/// floor((H−2)/stride)+1 × floor((W−2)/stride)+1. Edge pixels not covered
/// by a full patch are dropped.
pub fn output_dims(image: &PixelGrid, spec: &QuanvSpec) -> Result<(usize, usize)> {
    validate_image(image)?;
    Ok((
        (image.height() - QuanvSpec::PATCH_SIZE) / spec.stride + 1,
        (image.width() - QuanvSpec::PATCH_SIZE) / spec.stride + 1,
    ))
}

/// Slide the filter over the image, emitting 4 channels per output pixel.
pub fn quanvolve(image: &PixelGrid, spec: &QuanvSpec) -> Result<FeatureTensor> {
    let (out_h, out_w) = output_dims(image, spec)?;
    let circuit = random_circuit(spec);
    let mut values = vec![0.0; out_h * out_w * QuanvSpec::N_QUBITS];
    for oy in 0..out_h {
        for ox in 0..out_w {
            let iy = oy * spec.stride;
            let ix = ox * spec.stride;
            let patch = [
                image.get(iy, ix),
                image.get(iy, ix + 1),
                image.get(iy + 1, ix),
                image.get(iy + 1, ix + 1),
            ];
            let response = patch_response(patch, &circuit)?;
            let base = (oy * out_w + ox) * QuanvSpec::N_QUBITS;
            values[base..base + 4].copy_from_slice(&response);
        }
    }
    FeatureTensor::from_values(out_h, out_w, QuanvSpec::N_QUBITS, values)
}

fn validate_image(image: &PixelGrid) -> Result<()> {
    if image.height() < QuanvSpec::PATCH_SIZE || image.width() < QuanvSpec::PATCH_SIZE {
        return Err(Error::DimensionMismatch {
            left: image.height().min(image.width()),
            right: QuanvSpec::PATCH_SIZE,
        });
    }
    for &p in image.pixels() {
        if !p.is_finite() || p < -RANGE_SLACK || p > 1.0 + RANGE_SLACK {
            return Err(Error::OutOfRange {
                what: "pixel",
                value: p,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    Ok(())
}
