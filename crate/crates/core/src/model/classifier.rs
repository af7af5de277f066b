//! Classifiers that see only the binary concept vector.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ops::{cross_entropy, softmax};
use super::params::{ParamSet, Tensor};
use super::train::{train_params, TrainConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ClassifierKind {
    /// Softmax regression.
    Linear,
    /// One ReLU hidden layer.
    Mlp { hidden: usize },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConceptClassifier {
    pub kind: ClassifierKind,
    pub num_inputs: usize,
    pub num_classes: usize,
    pub params: ParamSet,
}

impl ConceptClassifier {
    pub fn new(
        kind: ClassifierKind,
        num_inputs: usize,
        num_classes: usize,
        seed: u64,
    ) -> Result<Self> {
        if num_classes == 0 {
            return Err(Error::Config("num_classes must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tensors = match kind {
            ClassifierKind::Linear => alloc::vec![
                Tensor::zeros("w", num_classes, num_inputs),
                Tensor::zeros("b", num_classes, 1),
            ],
            ClassifierKind::Mlp { hidden } => {
                if hidden == 0 {
                    return Err(Error::Config("mlp hidden width must be at least 1".into()));
                }
                alloc::vec![
                    Tensor::glorot("w1", hidden, num_inputs, &mut rng),
                    Tensor::zeros("b1", hidden, 1),
                    Tensor::glorot("w2", num_classes, hidden, &mut rng),
                    Tensor::zeros("b2", num_classes, 1),
                ]
            }
        };
        Ok(Self {
            kind,
            num_inputs,
            num_classes,
            params: ParamSet { tensors },
        })
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.num_inputs {
            return Err(Error::DimensionMismatch {
                expected: self.num_inputs,
                found: x.len(),
            });
        }
        Ok(forward(&self.params, self.kind, x).1)
    }

    /// Trains on `rows`; fails when those rows carry fewer than two labels.
    pub fn fit(
        &mut self,
        inputs: &[Vec<f64>],
        labels: &[usize],
        rows: &[usize],
        cfg: &TrainConfig,
    ) -> Result<Vec<f64>> {
        if inputs.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                found: labels.len(),
            });
        }
        if let Some(bad) = inputs.iter().find(|x| x.len() != self.num_inputs) {
            return Err(Error::DimensionMismatch {
                expected: self.num_inputs,
                found: bad.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= self.num_classes) {
            return Err(Error::Validation(alloc::format!(
                "label {bad} out of range"
            )));
        }
        let first = rows.first().map(|&r| labels[r]);
        if rows.iter().all(|&r| Some(labels[r]) == first) {
            return Err(Error::DegenerateTask(
                "training rows carry a single label".into(),
            ));
        }
        let kind = self.kind;
        train_params(&mut self.params, rows, cfg, |p, idx| {
            let mut g = p.zeros_like();
            let mut loss = 0.0;
            for &r in idx {
                loss += sample_grad(p, kind, &inputs[r], labels[r], &mut g);
            }
            let n = idx.len() as f64;
            g.scale(1.0 / n);
            (loss / n, g)
        })
    }

    /// Mean cross-entropy and gradient over `rows`.
    pub fn loss_and_grad(
        &self,
        inputs: &[Vec<f64>],
        labels: &[usize],
        rows: &[usize],
    ) -> (f64, ParamSet) {
        let mut g = self.params.zeros_like();
        let mut loss = 0.0;
        for &r in rows {
            loss += sample_grad(&self.params, self.kind, &inputs[r], labels[r], &mut g);
        }
        let n = rows.len().max(1) as f64;
        g.scale(1.0 / n);
        (loss / n, g)
    }
}

/// Returns (hidden pre-activation, class probabilities).
fn forward(p: &ParamSet, kind: ClassifierKind, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let t = &p.tensors;
    match kind {
        ClassifierKind::Linear => {
            let mut o = t[0].matvec(x);
            t_add(&mut o, &t[1].data);
            (Vec::new(), softmax(&o))
        }
        ClassifierKind::Mlp { .. } => {
            let mut pre = t[0].matvec(x);
            t_add(&mut pre, &t[1].data);
            let h: Vec<f64> = pre.iter().map(|&v| v.max(0.0)).collect();
            let mut o = t[2].matvec(&h);
            t_add(&mut o, &t[3].data);
            (pre, softmax(&o))
        }
    }
}

fn t_add(v: &mut [f64], b: &[f64]) {
    for (x, y) in v.iter_mut().zip(b) {
        *x += y;
    }
}

fn sample_grad(p: &ParamSet, kind: ClassifierKind, x: &[f64], y: usize, g: &mut ParamSet) -> f64 {
    let (pre, probs) = forward(p, kind, x);
    let loss = cross_entropy(&probs, y);
    let mut d_out = probs;
    d_out[y] -= 1.0;
    match kind {
        ClassifierKind::Linear => {
            g.tensors[0].add_outer(&d_out, x);
            g.tensors[1].add(&d_out);
        }
        ClassifierKind::Mlp { .. } => {
            let h: Vec<f64> = pre.iter().map(|&v| v.max(0.0)).collect();
            g.tensors[2].add_outer(&d_out, &h);
            g.tensors[3].add(&d_out);
            let mut d_h = p.tensors[2].matvec_t(&d_out);
            for (d, &v) in d_h.iter_mut().zip(&pre) {
                if v <= 0.0 {
                    *d = 0.0;
                }
            }
            g.tensors[0].add_outer(&d_h, x);
            g.tensors[1].add(&d_h);
        }
    }
    loss
}
