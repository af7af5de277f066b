//! Concept-bottleneck network with additive attention over concept embeddings.
//!
//! ```text
//! h   = relu(W1 x + b1)
//! c   = sigmoid(W2 h + b2)            concept probabilities
//! h_k = c_k u_k                       scaled concept embeddings
//! e_k = v . tanh(Wa h_k + ba)
//! a   = softmax(e)                    concept importance
//! g   = sum_k a_k h_k
//! p   = softmax(Wc g + bc)            class probabilities
//! ```
//!
//! Loss per sample is `CE(p, y) + beta * BCE(c, t)`, averaged over the batch.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ops::{binary_cross_entropy, cross_entropy, dot, sigmoid, softmax};
use super::params::{ParamSet, Tensor};
use super::train::{train_params, TrainConfig};
use super::Dataset;
use crate::{Error, Result};

const W1: usize = 0;
const B1: usize = 1;
const W2: usize = 2;
const B2: usize = 3;
const U: usize = 4;
const WA: usize = 5;
const BA: usize = 6;
const V: usize = 7;
const WC: usize = 8;
const BC: usize = 9;

/// Tensor names in storage order.
pub const PARAM_NAMES: [&str; 10] = ["w1", "b1", "w2", "b2", "u", "wa", "ba", "v", "wc", "bc"];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BottleneckConfig {
    pub input_dim: usize,
    pub hidden: usize,
    pub num_concepts: usize,
    pub attention_dim: usize,
    pub num_classes: usize,
    /// Weight of the concept loss; positive.
    pub beta: f64,
}

impl BottleneckConfig {
    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("input_dim", self.input_dim),
            ("hidden", self.hidden),
            ("num_concepts", self.num_concepts),
            ("attention_dim", self.attention_dim),
            ("num_classes", self.num_classes),
        ];
        if let Some((name, _)) = dims.iter().find(|(_, d)| *d == 0) {
            return Err(Error::Config(alloc::format!("{name} must be at least 1")));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(alloc::format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    fn shapes(&self) -> [(usize, usize); 10] {
        let (d, h, k, a, m) = (
            self.input_dim,
            self.hidden,
            self.num_concepts,
            self.attention_dim,
            self.num_classes,
        );
        [
            (h, d),
            (h, 1),
            (k, h),
            (k, 1),
            (k, a),
            (a, a),
            (a, 1),
            (a, 1),
            (m, a),
            (m, 1),
        ]
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub hidden_pre: Vec<f64>,
    pub hidden: Vec<f64>,
    pub concept_logits: Vec<f64>,
    pub concepts: Vec<f64>,
    /// `K x A`, row `k` is `c_k u_k`.
    pub scaled: Vec<Vec<f64>>,
    /// `K x A`, row `k` is `tanh(Wa h_k + ba)`.
    pub activations: Vec<Vec<f64>>,
    pub scores: Vec<f64>,
    pub attention: Vec<f64>,
    pub context: Vec<f64>,
    pub class_probs: Vec<f64>,
}

/// Task and concept parts of the joint loss, each averaged over samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts {
    pub task: f64,
    pub concept: f64,
    pub beta: f64,
}

impl LossParts {
    pub fn total(&self) -> f64 {
        self.task + self.beta * self.concept
    }
}

/// Per-row class and concept probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub classes: Vec<Vec<f64>>,
    pub concepts: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BottleneckModel {
    pub config: BottleneckConfig,
    pub params: ParamSet,
}

impl BottleneckModel {
    /// Glorot-initialized weights, zero biases.
    pub fn new(config: BottleneckConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tensors = PARAM_NAMES
            .iter()
            .zip(config.shapes())
            .map(|(name, (r, c))| {
                if c == 1 && *name != "v" {
                    Tensor::zeros(name, r, c)
                } else {
                    Tensor::glorot(name, r, c, &mut rng)
                }
            })
            .collect();
        Ok(Self {
            config,
            params: ParamSet { tensors },
        })
    }

    /// All parameters zero.
    pub fn zeros(config: BottleneckConfig) -> Result<Self> {
        config.validate()?;
        let tensors = PARAM_NAMES
            .iter()
            .zip(config.shapes())
            .map(|(name, (r, c))| Tensor::zeros(name, r, c))
            .collect();
        Ok(Self {
            config,
            params: ParamSet { tensors },
        })
    }

    /// Rebuilds a model from stored parameters, checking names and shapes.
    pub fn from_params(config: BottleneckConfig, params: ParamSet) -> Result<Self> {
        let model = Self::zeros(config)?;
        model.params.check_layout(&params)?;
        Ok(Self { config, params })
    }

    pub fn forward(&self, x: &[f64]) -> Result<Forward> {
        self.forward_with(x, &[])
    }

    /// Forward pass with `c_k` replaced by `value` for every `(k, value)` in `overrides`.
    pub fn forward_with(&self, x: &[f64], overrides: &[(usize, f64)]) -> Result<Forward> {
        if x.len() != self.config.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.config.input_dim,
                found: x.len(),
            });
        }
        for &(k, value) in overrides {
            if k >= self.config.num_concepts {
                return Err(Error::Domain(alloc::format!(
                    "override index {k} out of range for {} concepts",
                    self.config.num_concepts
                )));
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Domain(alloc::format!(
                    "override value {value} outside [0, 1]"
                )));
            }
        }
        Ok(forward_params(&self.params, x, overrides))
    }

    /// Class probabilities under concept overrides.
    pub fn intervene(&self, x: &[f64], overrides: &[(usize, f64)]) -> Result<Vec<f64>> {
        Ok(self.forward_with(x, overrides)?.class_probs)
    }

    pub fn check_data(&self, data: &Dataset) -> Result<()> {
        data.check_shapes(self.config.input_dim, self.config.num_classes)?;
        if data
            .concepts
            .iter()
            .any(|c| c.len() != self.config.num_concepts)
        {
            return Err(Error::DimensionMismatch {
                expected: self.config.num_concepts,
                found: data
                    .concepts
                    .iter()
                    .map(Vec::len)
                    .find(|&l| l != self.config.num_concepts)
                    .unwrap_or(0),
            });
        }
        Ok(())
    }

    /// Loss components over `rows` of `data`.
    pub fn loss(&self, data: &Dataset, rows: &[usize]) -> Result<LossParts> {
        self.check_data(data)?;
        if rows.is_empty() {
            return Err(Error::Domain("loss over an empty batch".into()));
        }
        let (mut task, mut concept) = (0.0, 0.0);
        for &r in rows {
            let f = forward_params(&self.params, &data.features[r], &[]);
            task += cross_entropy(&f.class_probs, data.labels[r]);
            concept += binary_cross_entropy(&f.concepts, &data.concepts[r]);
        }
        let n = rows.len() as f64;
        Ok(LossParts {
            task: task / n,
            concept: concept / n,
            beta: self.config.beta,
        })
    }

    /// Mean joint loss and its gradient over `rows`.
    pub fn loss_and_grad(&self, data: &Dataset, rows: &[usize]) -> Result<(f64, ParamSet)> {
        self.check_data(data)?;
        if rows.is_empty() {
            return Err(Error::Domain("loss over an empty batch".into()));
        }
        Ok(batch_grad(&self.params, self.config.beta, data, rows))
    }

    /// Trains on `rows` of `data`; returns the mean loss of each epoch.
    pub fn fit(&mut self, data: &Dataset, rows: &[usize], cfg: &TrainConfig) -> Result<Vec<f64>> {
        self.check_data(data)?;
        let beta = self.config.beta;
        train_params(&mut self.params, rows, cfg, |p, idx| {
            batch_grad(p, beta, data, idx)
        })
    }

    /// Predicted class and concept probabilities for every row of `rows`.
    pub fn predict(&self, data: &Dataset, rows: &[usize]) -> Result<Predictions> {
        self.check_data(data)?;
        let mut classes = Vec::with_capacity(rows.len());
        let mut concepts = Vec::with_capacity(rows.len());
        for &r in rows {
            let f = forward_params(&self.params, &data.features[r], &[]);
            classes.push(f.class_probs);
            concepts.push(f.concepts);
        }
        Ok(Predictions { classes, concepts })
    }
}

fn forward_params(p: &ParamSet, x: &[f64], overrides: &[(usize, f64)]) -> Forward {
    let t = &p.tensors;
    let mut hidden_pre = t[W1].matvec(x);
    for (h, b) in hidden_pre.iter_mut().zip(&t[B1].data) {
        *h += b;
    }
    let hidden: Vec<f64> = hidden_pre.iter().map(|&h| h.max(0.0)).collect();
    let mut concept_logits = t[W2].matvec(&hidden);
    for (s, b) in concept_logits.iter_mut().zip(&t[B2].data) {
        *s += b;
    }
    let mut concepts: Vec<f64> = concept_logits.iter().map(|&s| sigmoid(s)).collect();
    for &(k, value) in overrides {
        concepts[k] = value;
    }
    let k_count = concepts.len();
    let a_dim = t[U].cols;
    let mut scaled = Vec::with_capacity(k_count);
    let mut activations = Vec::with_capacity(k_count);
    let mut scores = Vec::with_capacity(k_count);
    for (k, &c) in concepts.iter().enumerate() {
        let hk: Vec<f64> = t[U].row(k).iter().map(|u| c * u).collect();
        let mut z = t[WA].matvec(&hk);
        for (zi, b) in z.iter_mut().zip(&t[BA].data) {
            *zi = libm::tanh(*zi + b);
        }
        scores.push(dot(&t[V].data, &z));
        scaled.push(hk);
        activations.push(z);
    }
    let attention = softmax(&scores);
    let mut context = vec![0.0; a_dim];
    for (hk, &a) in scaled.iter().zip(&attention) {
        for (g, h) in context.iter_mut().zip(hk) {
            *g += a * h;
        }
    }
    let mut class_logits = t[WC].matvec(&context);
    for (o, b) in class_logits.iter_mut().zip(&t[BC].data) {
        *o += b;
    }
    Forward {
        hidden_pre,
        hidden,
        concept_logits,
        concepts,
        scaled,
        activations,
        scores,
        attention,
        context,
        class_probs: softmax(&class_logits),
    }
}

fn batch_grad(p: &ParamSet, beta: f64, data: &Dataset, rows: &[usize]) -> (f64, ParamSet) {
    let mut grads = p.zeros_like();
    let mut loss = 0.0;
    for &r in rows {
        loss += sample_grad(
            p,
            beta,
            &data.features[r],
            data.labels[r],
            &data.concepts[r],
            &mut grads,
        );
    }
    let n = rows.len() as f64;
    grads.scale(1.0 / n);
    (loss / n, grads)
}

/// Accumulates one sample's gradient into `g` and returns its joint loss.
fn sample_grad(
    p: &ParamSet,
    beta: f64,
    x: &[f64],
    y: usize,
    target: &[f64],
    g: &mut ParamSet,
) -> f64 {
    let f = forward_params(p, x, &[]);
    let t = &p.tensors;
    let loss = cross_entropy(&f.class_probs, y) + beta * binary_cross_entropy(&f.concepts, target);

    let mut d_out = f.class_probs.clone();
    d_out[y] -= 1.0;
    g.tensors[WC].add_outer(&d_out, &f.context);
    g.tensors[BC].add(&d_out);
    let d_ctx = t[WC].matvec_t(&d_out);

    let d_att: Vec<f64> = f.scaled.iter().map(|hk| dot(&d_ctx, hk)).collect();
    let mean = dot(&f.attention, &d_att);
    let k_count = f.concepts.len();
    let mut d_s = vec![0.0; k_count];
    for k in 0..k_count {
        let a = f.attention[k];
        let d_e = a * (d_att[k] - mean);
        let z = &f.activations[k];
        for (dv, zi) in g.tensors[V].data.iter_mut().zip(z) {
            *dv += d_e * zi;
        }
        let d_pre: Vec<f64> = t[V]
            .data
            .iter()
            .zip(z)
            .map(|(v, zi)| d_e * v * (1.0 - zi * zi))
            .collect();
        g.tensors[WA].add_outer(&d_pre, &f.scaled[k]);
        g.tensors[BA].add(&d_pre);
        let mut d_hk = t[WA].matvec_t(&d_pre);
        for (d, gc) in d_hk.iter_mut().zip(&d_ctx) {
            *d += a * gc;
        }
        let c = f.concepts[k];
        for (du, dh) in g.tensors[U].row_mut(k).iter_mut().zip(&d_hk) {
            *du += c * dh;
        }
        let d_c = dot(t[U].row(k), &d_hk);
        d_s[k] = d_c * c * (1.0 - c) + beta * (c - target[k]);
    }
    g.tensors[W2].add_outer(&d_s, &f.hidden);
    g.tensors[B2].add(&d_s);
    let mut d_h = t[W2].matvec_t(&d_s);
    for (d, &pre) in d_h.iter_mut().zip(&f.hidden_pre) {
        if pre <= 0.0 {
            *d = 0.0;
        }
    }
    g.tensors[W1].add_outer(&d_h, x);
    g.tensors[B1].add(&d_h);
    loss
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, m: usize) -> BottleneckConfig {
        BottleneckConfig {
            input_dim: 5,
            hidden: 4,
            num_concepts: k,
            attention_dim: 3,
            num_classes: m,
            beta: 1.0,
        }
    }

    #[test]
    fn single_concept_gets_all_attention() {
        let model = BottleneckModel::new(cfg(1, 3), 3).unwrap();
        let f = model.forward(&[0.1, -0.2, 0.3, 0.4, -0.5]).unwrap();
        assert_eq!(f.attention, vec![1.0]);
        let s: f64 = f.class_probs.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_model_is_uniform() {
        let model = BottleneckModel::zeros(cfg(3, 4)).unwrap();
        let f = model.forward(&[1.0; 5]).unwrap();
        assert_eq!(f.concepts, vec![0.5; 3]);
        assert_eq!(f.class_probs, vec![0.25; 4]);
    }

    #[test]
    fn forced_zero_concept_gives_bias_softmax() {
        let mut model = BottleneckModel::new(cfg(1, 3), 5).unwrap();
        model.params.tensors[BC].data = vec![0.5, -1.0, 2.0];
        let p = model.intervene(&[0.3; 5], &[(0, 0.0)]).unwrap();
        assert_eq!(p, softmax(&[0.5, -1.0, 2.0]));
        assert_eq!(
            model.intervene(&[0.3; 5], &[]).unwrap(),
            model.forward(&[0.3; 5]).unwrap().class_probs
        );
        assert!(model.intervene(&[0.3; 5], &[(0, 1.5)]).is_err());
        assert!(model.intervene(&[0.3; 5], &[(1, 0.5)]).is_err());
        assert!(model.forward(&[0.3; 4]).is_err());
    }

    #[test]
    fn uniform_prediction_loss_is_ln_m() {
        let model = BottleneckModel::zeros(cfg(3, 4)).unwrap();
        let data = Dataset {
            features: vec![vec![0.2; 5]],
            concepts: vec![vec![1.0, 0.0, 1.0]],
            labels: vec![2],
            num_classes: 4,
        };
        let parts = model.loss(&data, &[0]).unwrap();
        assert!((parts.task - libm::log(4.0)).abs() < 1e-12);
        assert!((parts.concept - 3.0 * libm::log(2.0)).abs() < 1e-12);
    }

    #[test]
    fn invalid_config() {
        assert!(BottleneckModel::new(
            BottleneckConfig {
                beta: 0.0,
                ..cfg(2, 2)
            },
            0
        )
        .is_err());
        assert!(BottleneckModel::new(
            BottleneckConfig {
                hidden: 0,
                ..cfg(2, 2)
            },
            0
        )
        .is_err());
    }
}
