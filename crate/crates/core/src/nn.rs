//! Minimal dense feed-forward classifier: flatten → fully connected →
//! softmax, trained with plain SGD on cross-entropy. Hidden layers, when
//! configured, use ReLU.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Probabilities are floored at this value before taking the log.
pub const PROB_FLOOR: f64 = 1e-12;

/// One fully connected layer; weights are out×in row-major.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl DenseLayer {
    pub fn new(in_dim: usize, out_dim: usize, weights: Vec<f64>, biases: Vec<f64>) -> Result<Self> {
        if weights.len() != in_dim * out_dim {
            return Err(Error::DimensionMismatch {
                left: weights.len(),
                right: in_dim * out_dim,
            });
        }
        if biases.len() != out_dim {
            return Err(Error::DimensionMismatch {
                left: biases.len(),
                right: out_dim,
            });
        }
        Ok(DenseLayer {
            in_dim,
            out_dim,
            weights,
            biases,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    fn affine(&self, input: &[f64], out: &mut [f64]) {
        for o in 0..self.out_dim {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            out[o] = self.biases[o]
                + row
                    .iter()
                    .zip(input.iter())
                    .map(|(w, x)| w * x)
                    .sum::<f64>();
        }
    }
}

/// Stack of dense layers; the final layer feeds a softmax.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DenseNet {
    layers: Vec<DenseLayer>,
}

impl DenseNet {
    /// Seeded initialization: every weight and bias is drawn uniformly from
    /// [−1/√fan_in, 1/√fan_in), layer by layer, weights before biases.
    pub fn init(sizes: &[usize], seed: u64) -> Result<Self> {
        validate_sizes(sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for pair in sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let weights = (0..fan_in * fan_out)
                .map(|_| rng.random_range(-bound..bound))
                .collect();
            let biases = (0..fan_out).map(|_| rng.random_range(-bound..bound)).collect();
            layers.push(DenseLayer::new(fan_in, fan_out, weights, biases)?);
        }
        Ok(DenseNet { layers })
    }

    /// All-zero parameters; with them the softmax output is uniform.
    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        validate_sizes(sizes)?;
        let layers = sizes
            .windows(2)
            .map(|pair| {
                DenseLayer::new(pair[0], pair[1], vec![0.0; pair[0] * pair[1]], vec![0.0; pair[1]])
            })
            .collect::<Result<_>>()?;
        Ok(DenseNet { layers })
    }

    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Empty("layer stack"));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::DimensionMismatch {
                    left: pair[0].out_dim,
                    right: pair[1].in_dim,
                });
            }
        }
        Ok(DenseNet { layers })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    pub fn n_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// Class probabilities for one input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: self.input_dim(),
            });
        }
        let mut activation = x.to_vec();
        let last = self.layers.len() - 1;
        for (idx, layer) in self.layers.iter().enumerate() {
            let mut z = vec![0.0; layer.out_dim];
            layer.affine(&activation, &mut z);
            if idx < last {
                for v in &mut z {
                    *v = v.max(0.0);
                }
            } else {
                softmax_in_place(&mut z);
            }
            activation = z;
        }
        Ok(activation)
    }

    /// Forward pass keeping every layer's pre-activation and activation,
    /// for backprop.
    fn forward_trace(&self, x: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let last = self.layers.len() - 1;
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        activations.push(x.to_vec());
        for (idx, layer) in self.layers.iter().enumerate() {
            let mut z = vec![0.0; layer.out_dim];
            layer.affine(&activations[idx], &mut z);
            pre_activations.push(z.clone());
            if idx < last {
                for v in &mut z {
                    *v = v.max(0.0);
                }
            } else {
                softmax_in_place(&mut z);
            }
            activations.push(z);
        }
        (activations, pre_activations)
    }

    /// Accumulate the cross-entropy gradient of one sample into `grads`.
    fn accumulate_gradient(&self, x: &[f64], label: usize, grads: &mut Gradients) {
        let (activations, pre_activations) = self.forward_trace(x);
        let probs = &activations[self.layers.len()];
        // softmax + cross-entropy: delta = p − onehot(label)
        let mut delta: Vec<f64> = probs.to_vec();
        delta[label] -= 1.0;
        for idx in (0..self.layers.len()).rev() {
            let layer = &self.layers[idx];
            let input = &activations[idx];
            let gw = &mut grads.weights[idx];
            for o in 0..layer.out_dim {
                let row = &mut gw[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (slot, &a) in row.iter_mut().zip(input.iter()) {
                    *slot += delta[o] * a;
                }
                grads.biases[idx][o] += delta[o];
            }
            if idx > 0 {
                let mut next = vec![0.0; layer.in_dim];
                for o in 0..layer.out_dim {
                    let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                    for (slot, &w) in next.iter_mut().zip(row.iter()) {
                        *slot += delta[o] * w;
                    }
                }
                // ReLU mask of the previous layer
                for (v, &z) in next.iter_mut().zip(pre_activations[idx - 1].iter()) {
                    if z <= 0.0 {
                        *v = 0.0;
                    }
                }
                delta = next;
            }
        }
    }
}

fn validate_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::Empty("layer sizes"));
    }
    if sizes.iter().any(|&s| s == 0) {
        return Err(Error::Empty("layer width"));
    }
    Ok(())
}

/// Numerically stable softmax (max subtraction) in place.
pub fn softmax_in_place(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in logits.iter_mut() {
        *v /= sum;
    }
}

/// −ln probs[label], with probabilities floored at [`PROB_FLOOR`].
pub fn cross_entropy(probs: &[f64], label: usize) -> Result<f64> {
    if label >= probs.len() {
        return Err(Error::ClassOutOfRange {
            label,
            n_classes: probs.len(),
        });
    }
    Ok(-probs[label].max(PROB_FLOOR).ln())
}

struct Gradients {
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeros(net: &DenseNet) -> Self {
        Gradients {
            weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            biases: net.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect(),
        }
    }

    fn reset(&mut self) {
        for g in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
    }
}

/// SGD hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SgdParams {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for SgdParams {
    fn default() -> Self {
        SgdParams {
            lr: 0.01,
            epochs: 10,
            batch_size: 4,
            seed: 42,
        }
    }
}

/// Metrics recorded after one completed epoch. Losses are mean
/// cross-entropy in nats.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_loss: f64,
    pub test_acc: f64,
}

/// Per-epoch training history.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainLog {
    records: Vec<EpochRecord>,
}

impl TrainLog {
    pub fn records(&self) -> &[EpochRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&EpochRecord> {
        self.records.last()
    }
}

/// Mean loss and accuracy of the net on a labelled set.
pub fn evaluate(net: &DenseNet, inputs: &[Vec<f64>], labels: &[usize]) -> Result<(f64, f64)> {
    if inputs.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    if inputs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            left: inputs.len(),
            right: labels.len(),
        });
    }
    let mut loss = 0.0;
    let mut correct = 0usize;
    for (x, &y) in inputs.iter().zip(labels.iter()) {
        let probs = net.forward(x)?;
        loss += cross_entropy(&probs, y)?;
        if argmax(&probs) == y {
            correct += 1;
        }
    }
    Ok((loss / inputs.len() as f64, correct as f64 / inputs.len() as f64))
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Mini-batch SGD on cross-entropy. The train set is reshuffled every epoch
/// with the seeded generator; each batch applies the mean gradient. Metrics
/// for both splits are logged after every epoch; everything is deterministic
/// given the seed.
pub fn train_sgd(
    net: &mut DenseNet,
    train_inputs: &[Vec<f64>],
    train_labels: &[usize],
    test_inputs: &[Vec<f64>],
    test_labels: &[usize],
    params: &SgdParams,
) -> Result<TrainLog> {
    validate_dataset(net, train_inputs, train_labels)?;
    validate_dataset(net, test_inputs, test_labels)?;
    if params.batch_size == 0 {
        return Err(Error::Empty("batch size"));
    }
    if !params.lr.is_finite() || params.lr < 0.0 {
        return Err(Error::OutOfRange {
            what: "learning rate",
            value: params.lr,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..train_inputs.len()).collect();
    let mut grads = Gradients::zeros(net);
    let mut log = TrainLog::default();

    for epoch in 1..=params.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(params.batch_size) {
            grads.reset();
            for &idx in batch {
                net.accumulate_gradient(&train_inputs[idx], train_labels[idx], &mut grads);
            }
            let scale = params.lr / batch.len() as f64;
            for (layer, (gw, gb)) in net
                .layers
                .iter_mut()
                .zip(grads.weights.iter().zip(grads.biases.iter()))
            {
                for (w, g) in layer.weights.iter_mut().zip(gw.iter()) {
                    *w -= scale * g;
                }
                for (b, g) in layer.biases.iter_mut().zip(gb.iter()) {
                    *b -= scale * g;
                }
            }
        }
        let (train_loss, train_acc) = evaluate(net, train_inputs, train_labels)?;
        let (test_loss, test_acc) = evaluate(net, test_inputs, test_labels)?;
        log.records.push(EpochRecord {
            epoch,
            train_loss,
            train_acc,
            test_loss,
            test_acc,
        });
    }
    Ok(log)
}

fn validate_dataset(net: &DenseNet, inputs: &[Vec<f64>], labels: &[usize]) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    if inputs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            left: inputs.len(),
            right: labels.len(),
        });
    }
    for x in inputs {
        if x.len() != net.input_dim() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: net.input_dim(),
            });
        }
    }
    for &y in labels {
        if y >= net.output_dim() {
            return Err(Error::ClassOutOfRange {
                label: y,
                n_classes: net.output_dim(),
            });
        }
    }
    Ok(())
}

/// Compare the backprop gradient of one sample's cross-entropy against
/// central finite differences. Returns the largest relative error
/// |g_bp − g_fd| / max(1e-8, |g_bp| + |g_fd|) over all parameters.
pub fn gradient_check(net: &DenseNet, x: &[f64], label: usize, epsilon: f64) -> Result<f64> {
    if label >= net.output_dim() {
        return Err(Error::ClassOutOfRange {
            label,
            n_classes: net.output_dim(),
        });
    }
    let mut grads = Gradients::zeros(net);
    net.accumulate_gradient(x, label, &mut grads);

    fn param_mut(net: &mut DenseNet, layer_idx: usize, param_idx: usize) -> &mut f64 {
        let layer = &mut net.layers[layer_idx];
        if param_idx < layer.weights.len() {
            &mut layer.weights[param_idx]
        } else {
            &mut layer.biases[param_idx - layer.weights.len()]
        }
    }

    let loss_of = |net: &DenseNet| -> Result<f64> { cross_entropy(&net.forward(x)?, label) };
    let mut worst = 0.0_f64;
    let mut probe = net.clone();
    for layer_idx in 0..net.layers.len() {
        for param_idx in 0..net.layers[layer_idx].weights.len() + net.layers[layer_idx].biases.len()
        {
            let original = *param_mut(&mut probe, layer_idx, param_idx);
            *param_mut(&mut probe, layer_idx, param_idx) = original + epsilon;
            let plus = loss_of(&probe)?;
            *param_mut(&mut probe, layer_idx, param_idx) = original - epsilon;
            let minus = loss_of(&probe)?;
            *param_mut(&mut probe, layer_idx, param_idx) = original;

            let fd = (plus - minus) / (2.0 * epsilon);
            let bp = if param_idx < grads.weights[layer_idx].len() {
                grads.weights[layer_idx][param_idx]
            } else {
                grads.biases[layer_idx][param_idx - grads.weights[layer_idx].len()]
            };
            let rel = (bp - fd).abs() / (bp.abs() + fd.abs()).max(1e-8);
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}
