//! Binary soft-margin SVM trained in the dual with simplified SMO.
//!
//! The solver does pairwise coordinate ascent with a seeded random choice of
//! the second index, keeping a running error cache. It accepts either a
//! computable kernel over stored samples or a precomputed square kernel
//! matrix, which is how the quantum fidelity kernel plugs in.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Classical kernel families plus the precomputed-matrix marker.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase", tag = "kind"))]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
    Poly { gamma: f64, degree: u32, coef0: f64 },
    /// Kernel values are supplied by the caller as a matrix.
    Precomputed,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { gamma } => {
                if gamma <= 0.0 || !gamma.is_finite() {
                    return Err(Error::OutOfRange {
                        what: "gamma",
                        value: gamma,
                        lo: 0.0,
                        hi: f64::INFINITY,
                    });
                }
            }
            KernelSpec::Poly { gamma, degree, .. } => {
                if gamma <= 0.0 || !gamma.is_finite() {
                    return Err(Error::OutOfRange {
                        what: "gamma",
                        value: gamma,
                        lo: 0.0,
                        hi: f64::INFINITY,
                    });
                }
                if degree < 1 {
                    return Err(Error::OutOfRange {
                        what: "degree",
                        value: degree as f64,
                        lo: 1.0,
                        hi: f64::INFINITY,
                    });
                }
            }
            KernelSpec::Linear | KernelSpec::Precomputed => {}
        }
        Ok(())
    }
}

/// Evaluate a computable kernel on two equal-length vectors.
pub fn kernel_eval(spec: &KernelSpec, x: &[f64], z: &[f64]) -> Result<f64> {
    spec.validate()?;
    if x.len() != z.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: z.len(),
        });
    }
    if matches!(spec, KernelSpec::Precomputed) {
        return Err(Error::BadKernelKind(
            "precomputed kernels have no pointwise evaluation",
        ));
    }
    Ok(kernel_eval_unchecked(spec, x, z))
}

fn dot(x: &[f64], z: &[f64]) -> f64 {
    x.iter().zip(z.iter()).map(|(a, b)| a * b).sum()
}

fn kernel_eval_unchecked(spec: &KernelSpec, x: &[f64], z: &[f64]) -> f64 {
    match *spec {
        KernelSpec::Linear => dot(x, z),
        KernelSpec::Rbf { gamma } => {
            let sq_dist: f64 = x
                .iter()
                .zip(z.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (-gamma * sq_dist).exp()
        }
        KernelSpec::Poly {
            gamma,
            degree,
            coef0,
        } => (gamma * dot(x, z) + coef0).powi(degree as i32),
        KernelSpec::Precomputed => unreachable!("checked by kernel_eval"),
    }
}

/// The RBF gamma default 1 / (n_features · Var(X)) over all matrix entries.
pub fn rbf_gamma_scale(samples: &[Vec<f64>]) -> f64 {
    let d = samples.first().map_or(0, Vec::len);
    let count = samples.len() * d;
    if count == 0 {
        return 1.0;
    }
    let mean: f64 = samples.iter().flatten().sum::<f64>() / count as f64;
    let var: f64 = samples
        .iter()
        .flatten()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / count as f64;
    if var > 0.0 {
        1.0 / (d as f64 * var)
    } else {
        1.0 / d as f64
    }
}

/// SMO knobs. `tol` is both the KKT violation tolerance and the smallest
/// alpha step counted as a change.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SmoParams {
    pub c: f64,
    pub tol: f64,
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SmoParams {
    fn default() -> Self {
        SmoParams {
            c: 1.0,
            tol: 1e-3,
            max_passes: 10,
            seed: 42,
        }
    }
}

impl SmoParams {
    fn validate(&self) -> Result<()> {
        if self.c <= 0.0 || !self.c.is_finite() {
            return Err(Error::OutOfRange {
                what: "C",
                value: self.c,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        if self.tol <= 0.0 || !self.tol.is_finite() {
            return Err(Error::OutOfRange {
                what: "tol",
                value: self.tol,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(())
    }
}

/// A trained dual-form model. For computable kernels the training inputs are
/// retained; for precomputed kernels predictions take a kernel row indexed by
/// training sample.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmModel {
    kernel: KernelSpec,
    c: f64,
    alphas: Vec<f64>,
    bias: f64,
    labels: Vec<f64>,
    train_x: Vec<Vec<f64>>,
}

impl SvmModel {
    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// Training labels in {-1, +1}.
    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn n_train(&self) -> usize {
        self.labels.len()
    }

    /// Retained training inputs; empty for precomputed-kernel models.
    pub fn train_x(&self) -> &[Vec<f64>] {
        &self.train_x
    }

    /// Indices with alpha > 0.
    pub fn support_indices(&self) -> Vec<usize> {
        self.alphas
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Rebuild a model from stored parts (persistence path). Validates the
    /// model invariants.
    pub fn from_parts(
        kernel: KernelSpec,
        c: f64,
        alphas: Vec<f64>,
        bias: f64,
        labels: Vec<f64>,
        train_x: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if alphas.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                left: alphas.len(),
                right: labels.len(),
            });
        }
        if !matches!(kernel, KernelSpec::Precomputed) && train_x.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                left: train_x.len(),
                right: labels.len(),
            });
        }
        for &y in &labels {
            if y != 1.0 && y != -1.0 {
                return Err(Error::InvalidLabel(y));
            }
        }
        for &a in &alphas {
            if !(0.0..=c).contains(&a) {
                return Err(Error::OutOfRange {
                    what: "alpha",
                    value: a,
                    lo: 0.0,
                    hi: c,
                });
            }
        }
        Ok(SvmModel {
            kernel,
            c,
            alphas,
            bias,
            labels,
            train_x,
        })
    }

    /// Raw margin Σ α_i·y_i·k(x_i, x) + b for a feature vector.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if matches!(self.kernel, KernelSpec::Precomputed) {
            return Err(Error::BadKernelKind(
                "precomputed model needs a kernel row, see decision_value_precomputed",
            ));
        }
        let dim = self.train_x[0].len();
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: dim,
            });
        }
        let mut sum = 0.0;
        for i in 0..self.alphas.len() {
            if self.alphas[i] > 0.0 {
                sum += self.alphas[i]
                    * self.labels[i]
                    * kernel_eval_unchecked(&self.kernel, &self.train_x[i], x);
            }
        }
        Ok(sum + self.bias)
    }

    /// Raw margin from a precomputed kernel row, `row[i] = k(x_i, x)`.
    pub fn decision_value_precomputed(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                left: row.len(),
                right: self.labels.len(),
            });
        }
        let mut sum = 0.0;
        for i in 0..self.alphas.len() {
            if self.alphas[i] > 0.0 {
                sum += self.alphas[i] * self.labels[i] * row[i];
            }
        }
        Ok(sum + self.bias)
    }

    pub fn decision_values(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.decision_value(x)).collect()
    }

    /// Predicted label in {-1, +1}; an exact zero margin resolves to +1.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(label_of(self.decision_value(x)?))
    }

    pub fn predict_precomputed(&self, row: &[f64]) -> Result<f64> {
        Ok(label_of(self.decision_value_precomputed(row)?))
    }
}

fn label_of(decision: f64) -> f64 {
    if decision >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn validate_labels(y: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::Empty("labels"));
    }
    let mut seen_pos = false;
    let mut seen_neg = false;
    for &label in y {
        if label == 1.0 {
            seen_pos = true;
        } else if label == -1.0 {
            seen_neg = true;
        } else {
            return Err(Error::InvalidLabel(label));
        }
    }
    if !(seen_pos && seen_neg) {
        return Err(Error::SingleClass);
    }
    Ok(())
}

enum KernelSource<'a> {
    Computed {
        samples: &'a [Vec<f64>],
        kernel: &'a KernelSpec,
    },
    Precomputed {
        gram: &'a [f64],
        n: usize,
    },
}

impl KernelSource<'_> {
    fn eval(&self, i: usize, j: usize) -> f64 {
        match self {
            KernelSource::Computed { samples, kernel } => {
                kernel_eval_unchecked(kernel, &samples[i], &samples[j])
            }
            KernelSource::Precomputed { gram, n } => gram[i * n + j],
        }
    }
}

/// Train on feature vectors with a computable kernel.
pub fn train_smo(
    samples: &[Vec<f64>],
    y: &[f64],
    kernel: &KernelSpec,
    params: &SmoParams,
) -> Result<SvmModel> {
    kernel.validate()?;
    params.validate()?;
    if matches!(kernel, KernelSpec::Precomputed) {
        return Err(Error::BadKernelKind(
            "use train_smo_precomputed for precomputed kernel matrices",
        ));
    }
    validate_labels(y)?;
    if samples.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: samples.len(),
            right: y.len(),
        });
    }
    let dim = samples[0].len();
    for s in samples {
        if s.len() != dim {
            return Err(Error::DimensionMismatch {
                left: s.len(),
                right: dim,
            });
        }
    }
    let source = KernelSource::Computed { samples, kernel };
    let (alphas, bias) = solve(&source, y, params);
    Ok(SvmModel {
        kernel: *kernel,
        c: params.c,
        alphas,
        bias,
        labels: y.to_vec(),
        train_x: samples.to_vec(),
    })
}

/// Train on a precomputed square kernel matrix, row-major, sized by `y`.
pub fn train_smo_precomputed(gram: &[f64], y: &[f64], params: &SmoParams) -> Result<SvmModel> {
    params.validate()?;
    validate_labels(y)?;
    let n = y.len();
    if gram.len() != n * n {
        return Err(Error::BadGramShape {
            len: gram.len(),
            n,
        });
    }
    let source = KernelSource::Precomputed { gram, n };
    let (alphas, bias) = solve(&source, y, params);
    Ok(SvmModel {
        kernel: KernelSpec::Precomputed,
        c: params.c,
        alphas,
        bias,
        labels: y.to_vec(),
        train_x: Vec::new(),
    })
}

/// Simplified SMO: sweep all indices, fix KKT violators against a seeded
/// random partner, and stop after `max_passes` consecutive sweeps without an
/// alpha change beyond `tol`. A cache of margins (`u[k]`, bias excluded) is
/// kept exact across updates.
fn solve(kernel: &KernelSource, y: &[f64], params: &SmoParams) -> (Vec<f64>, f64) {
    let n = y.len();
    let c = params.c;
    let mut alphas = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut bias = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut quiet_passes = 0;

    // Dual objective tracking is debug-only; accepted steps must never
    // decrease W(α).
    #[cfg(debug_assertions)]
    let mut objective = 0.0_f64;

    while quiet_passes < params.max_passes {
        let mut changed = 0usize;
        for i in 0..n {
            let e_i = u[i] + bias - y[i];
            let r = y[i] * e_i;
            let violates = (r < -params.tol && alphas[i] < c) || (r > params.tol && alphas[i] > 0.0);
            if !violates {
                continue;
            }
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let e_j = u[j] + bias - y[j];
            let (a_i_old, a_j_old) = (alphas[i], alphas[j]);
            let (lo, hi) = if y[i] != y[j] {
                ((a_j_old - a_i_old).max(0.0), (c + a_j_old - a_i_old).min(c))
            } else {
                ((a_i_old + a_j_old - c).max(0.0), (a_i_old + a_j_old).min(c))
            };
            if lo >= hi {
                continue;
            }
            let k_ii = kernel.eval(i, i);
            let k_jj = kernel.eval(j, j);
            let k_ij = kernel.eval(i, j);
            let eta = 2.0 * k_ij - k_ii - k_jj;
            if eta >= 0.0 {
                continue;
            }
            let a_j = (a_j_old - y[j] * (e_i - e_j) / eta).clamp(lo, hi);
            if (a_j - a_j_old).abs() < params.tol {
                continue;
            }
            // in exact arithmetic this lands inside [0, C]; clamp away the
            // last-ulp rounding overshoot
            let a_i = (a_i_old + y[i] * y[j] * (a_j_old - a_j)).clamp(0.0, c);
            let (d_i, d_j) = (a_i - a_i_old, a_j - a_j_old);
            let b1 = bias - e_i - y[i] * d_i * k_ii - y[j] * d_j * k_ij;
            let b2 = bias - e_j - y[i] * d_i * k_ij - y[j] * d_j * k_jj;
            alphas[i] = a_i;
            alphas[j] = a_j;
            bias = if 0.0 < a_i && a_i < c {
                b1
            } else if 0.0 < a_j && a_j < c {
                b2
            } else {
                (b1 + b2) / 2.0
            };
            for k in 0..n {
                u[k] += y[i] * d_i * kernel.eval(i, k) + y[j] * d_j * kernel.eval(j, k);
            }
            changed += 1;

            #[cfg(debug_assertions)]
            {
                let next = dual_objective(&alphas, y, &u);
                debug_assert!(
                    next >= objective - 1e-9 * objective.abs().max(1.0),
                    "dual objective decreased: {objective} -> {next}"
                );
                objective = next;
            }
        }
        if changed == 0 {
            quiet_passes += 1;
        } else {
            quiet_passes = 0;
        }
    }
    (alphas, bias)
}

/// W(α) = Σα − ½ Σ α_i y_i u_i with u_i = Σ_j α_j y_j K_ij.
#[cfg(debug_assertions)]
fn dual_objective(alphas: &[f64], y: &[f64], u: &[f64]) -> f64 {
    let linear: f64 = alphas.iter().sum();
    let quad: f64 = alphas
        .iter()
        .zip(y.iter())
        .zip(u.iter())
        .map(|((&a, &yi), &ui)| a * yi * ui)
        .sum();
    linear - 0.5 * quad
}
