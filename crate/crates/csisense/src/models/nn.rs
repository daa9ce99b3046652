//! Fully connected feedforward network: four ELU hidden layers
//! (64, 32, 16, 8) and a two-way softmax output, trained on mean categorical
//! cross-entropy with Adam.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_training_set, Standardizer, TrainConfig};
use crate::error::{Error, Result};

/// Hidden layer widths.
pub const HIDDEN: [usize; 4] = [64, 32, 16, 8];
/// Output classes.
pub const CLASSES: usize = 2;
/// ELU slope parameter for negative inputs.
pub const ELU_ALPHA: f64 = 1.0;

#[inline]
pub fn elu(x: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        ELU_ALPHA * x.exp_m1()
    }
}

#[inline]
fn elu_grad(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        ELU_ALPHA * x.exp()
    }
}

/// Layer widths from input to output for an `input_dim`-feature network.
pub fn layer_dims(input_dim: usize) -> Vec<usize> {
    let mut dims = vec![input_dim];
    dims.extend_from_slice(&HIDDEN);
    dims.push(CLASSES);
    dims
}

/// One dense layer; `weights` is `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Network parameters without any input scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub layers: Vec<Dense>,
}

/// Per-layer gradients, shaped like the parameters.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<Dense>,
}

impl Network {
    /// Glorot-uniform weights and zero biases.
    pub fn init(dims: &[usize], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = dims
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                Dense {
                    weights: Array2::from_shape_fn((fan_out, fan_in), |_| {
                        rng.random_range(-limit..limit)
                    }),
                    bias: Array1::zeros(fan_out),
                }
            })
            .collect();
        Self { layers }
    }

    /// All parameters zero.
    pub fn zeros(dims: &[usize]) -> Self {
        let layers = dims
            .windows(2)
            .map(|w| Dense {
                weights: Array2::zeros((w[1], w[0])),
                bias: Array1::zeros(w[1]),
            })
            .collect();
        Self { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.weights.ncols())
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.input_dim()];
        d.extend(self.layers.iter().map(|l| l.weights.nrows()));
        d
    }

    /// Trainable parameters per layer.
    pub fn param_counts(&self) -> Vec<usize> {
        self.layers.iter().map(Dense::param_count).collect()
    }

    pub fn param_count(&self) -> usize {
        self.param_counts().iter().sum()
    }

    /// Flatten parameters layer by layer, weights (row-major) then bias.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend(l.weights.iter());
            out.extend(l.bias.iter());
        }
        out
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::arg(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                flat.len()
            )));
        }
        let mut it = flat.iter();
        for l in &mut self.layers {
            l.weights.iter_mut().chain(l.bias.iter_mut()).for_each(|p| {
                *p = *it.next().expect("length checked");
            });
        }
        Ok(())
    }

    fn check_input(&self, x: &Array2<f64>) -> Result<()> {
        if x.ncols() != self.input_dim() {
            return Err(Error::arg(format!(
                "network expects {} inputs, got {}",
                self.input_dim(),
                x.ncols()
            )));
        }
        Ok(())
    }

    /// Pre-activations of every layer for a batch (rows are samples).
    fn pre_activations(&self, x: &Array2<f64>) -> Vec<Array2<f64>> {
        let mut zs = Vec::with_capacity(self.layers.len());
        let mut a = x.clone();
        for (i, l) in self.layers.iter().enumerate() {
            let z = a.dot(&l.weights.t()) + &l.bias;
            if i + 1 < self.layers.len() {
                a = z.mapv(elu);
            }
            zs.push(z);
        }
        zs
    }

    /// Class probabilities, one row per sample.
    pub fn forward(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_input(x)?;
        let logits = self.pre_activations(x).pop().expect("at least one layer");
        Ok(softmax_rows(&logits))
    }

    /// Mean cross-entropy over the batch.
    pub fn loss(&self, x: &Array2<f64>, y: &[usize]) -> Result<f64> {
        self.check_input(x)?;
        let logits = self.pre_activations(x).pop().expect("at least one layer");
        Ok(mean_cross_entropy(&logits, y))
    }

    /// Mean cross-entropy and its gradient with respect to every parameter.
    pub fn loss_and_grad(&self, x: &Array2<f64>, y: &[usize]) -> Result<(f64, Gradients)> {
        self.check_input(x)?;
        if y.len() != x.nrows() {
            return Err(Error::arg("label count does not match batch size"));
        }
        let zs = self.pre_activations(x);
        let logits = zs.last().expect("at least one layer");
        let loss = mean_cross_entropy(logits, y);

        let batch = x.nrows() as f64;
        let mut delta = softmax_rows(logits);
        for (mut row, &c) in delta.axis_iter_mut(Axis(0)).zip(y) {
            row[c] -= 1.0;
        }
        delta /= batch;

        let mut grads: Vec<Dense> = Vec::with_capacity(self.layers.len());
        for i in (0..self.layers.len()).rev() {
            let input = if i == 0 {
                x.clone()
            } else {
                zs[i - 1].mapv(elu)
            };
            let gw = delta.t().dot(&input);
            let gb = delta.sum_axis(Axis(0));
            if i > 0 {
                let back = delta.dot(&self.layers[i].weights);
                delta = back * zs[i - 1].mapv(elu_grad);
            }
            grads.push(Dense {
                weights: gw,
                bias: gb,
            });
        }
        grads.reverse();
        Ok((loss, Gradients { layers: grads }))
    }
}

impl Gradients {
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend(l.weights.iter());
            out.extend(l.bias.iter());
        }
        out
    }
}

fn softmax_rows(z: &Array2<f64>) -> Array2<f64> {
    let mut p = z.clone();
    for mut row in p.axis_iter_mut(Axis(0)) {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    p
}

fn mean_cross_entropy(logits: &Array2<f64>, y: &[usize]) -> f64 {
    let total: f64 = logits
        .axis_iter(Axis(0))
        .zip(y)
        .map(|(row, &c)| {
            let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
            let lse = row.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
            lse - row[c]
        })
        .sum();
    total / logits.nrows() as f64
}

/// Adam moment estimates.
#[derive(Debug, Clone)]
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl Adam {
    pub fn new(params: usize, cfg: &TrainConfig) -> Self {
        Self {
            m: vec![0.0; params],
            v: vec![0.0; params],
            t: 0,
            lr: cfg.learning_rate,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            eps: cfg.epsilon,
        }
    }

    pub fn step(&mut self, net: &mut Network, grads: &Gradients) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t);
        let bc2 = 1.0 - self.beta2.powi(self.t);
        let mut k = 0;
        for (layer, grad) in net.layers.iter_mut().zip(&grads.layers) {
            let params = layer.weights.iter_mut().chain(layer.bias.iter_mut());
            let gs = grad.weights.iter().chain(grad.bias.iter());
            for (p, &g) in params.zip(gs) {
                self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g;
                self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g;
                let m_hat = self.m[k] / bc1;
                let v_hat = self.v[k] / bc2;
                *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
                k += 1;
            }
        }
    }
}

/// Network plus the input scaling learned from its training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "NnModelFile", try_from = "NnModelFile")]
pub struct NnModel {
    pub network: Network,
    pub standardizer: Standardizer,
    pub config: TrainConfig,
}

impl NnModel {
    /// Freshly initialized model with identity input scaling.
    pub fn init(input_dim: usize, cfg: &TrainConfig) -> Self {
        Self {
            network: Network::init(&layer_dims(input_dim), cfg.seed),
            standardizer: Standardizer {
                mean: vec![0.0; input_dim],
                std: vec![1.0; input_dim],
            },
            config: cfg.clone(),
        }
    }

    pub fn forward(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        self.network.forward(&self.standardizer.apply(x)?)
    }

    /// Most probable class; ties go to the lower index.
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> Result<u8> {
        let row = Array2::from_shape_vec((1, x.len()), x.to_vec()).expect("row shape");
        Ok(self.predict_batch(&row)?[0])
    }

    pub fn predict_batch(&self, x: &Array2<f64>) -> Result<Vec<u8>> {
        let p = self.forward(x)?;
        Ok(p.axis_iter(Axis(0)).map(|r| argmax(r) as u8).collect())
    }
}

fn argmax(row: ArrayView1<'_, f64>) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Train from a fresh Glorot initialization seeded by `cfg.seed`.
pub fn nn_train(x: &Array2<f64>, y: &[u8], cfg: &TrainConfig) -> Result<NnModel> {
    let model = NnModel::init(x.ncols(), cfg);
    nn_train_from(model, x, y, cfg)
}

/// Continue training `model` on `(x, y)`; the standardizer is refit on `x`.
pub fn nn_train_from(
    mut model: NnModel,
    x: &Array2<f64>,
    y: &[u8],
    cfg: &TrainConfig,
) -> Result<NnModel> {
    check_training_set(x, y)?;
    if cfg.epochs == 0 || cfg.batch_size == 0 {
        return Err(Error::arg("epochs and batch size must be positive"));
    }
    if !(cfg.learning_rate > 0.0 && cfg.epsilon > 0.0) {
        return Err(Error::arg("learning rate and epsilon must be positive"));
    }
    if x.ncols() != model.network.input_dim() {
        return Err(Error::arg(format!(
            "network expects {} inputs, got {}",
            model.network.input_dim(),
            x.ncols()
        )));
    }
    model.standardizer = Standardizer::fit(x)?;
    model.config = cfg.clone();
    let xs = model.standardizer.apply(x)?;
    let labels: Vec<usize> = y.iter().map(|&c| c as usize).collect();

    let mut adam = Adam::new(model.network.param_count(), cfg);
    // Separate stream from the initializer so changing epochs keeps init fixed.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..xs.nrows()).collect();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for (batch, idx) in order.chunks(cfg.batch_size).enumerate() {
            let bx = xs.select(Axis(0), idx);
            let by: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
            let (loss, grads) = model.network.loss_and_grad(&bx, &by)?;
            if !loss.is_finite() {
                return Err(Error::Training { epoch, batch, loss });
            }
            adam.step(&mut model.network, &grads);
        }
    }
    Ok(model)
}

/// Serialized form of [`NnModel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct NnModelFile {
    layer_dims: Vec<usize>,
    /// Per layer: row-major `out x in` weights followed by the biases.
    params: Vec<Vec<f64>>,
    standardizer: Standardizer,
    config: TrainConfig,
    seed: u64,
}

impl From<NnModel> for NnModelFile {
    fn from(m: NnModel) -> Self {
        Self {
            layer_dims: m.network.dims(),
            params: m
                .network
                .layers
                .iter()
                .map(|l| l.weights.iter().chain(l.bias.iter()).copied().collect())
                .collect(),
            standardizer: m.standardizer,
            seed: m.config.seed,
            config: m.config,
        }
    }
}

impl TryFrom<NnModelFile> for NnModel {
    type Error = Error;

    fn try_from(f: NnModelFile) -> Result<Self> {
        if f.layer_dims.len() < 2 || f.params.len() != f.layer_dims.len() - 1 {
            return Err(Error::format(
                "layer_dims",
                "layer count does not match parameters",
            ));
        }
        let mut net = Network::zeros(&f.layer_dims);
        let flat: Vec<f64> = f.params.concat();
        for (l, p) in net.layers.iter().zip(&f.params) {
            if l.param_count() != p.len() {
                return Err(Error::format("params", "layer parameter count mismatch"));
            }
        }
        net.set_params(&flat)?;
        if f.standardizer.dim() != f.layer_dims[0] {
            return Err(Error::format("standardizer", "dimension mismatch"));
        }
        Ok(Self {
            network: net,
            standardizer: f.standardizer,
            config: TrainConfig {
                seed: f.seed,
                ..f.config
            },
        })
    }
}
