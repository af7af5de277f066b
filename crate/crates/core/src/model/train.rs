//! Mini-batch Adam over a [`ParamSet`].

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::params::ParamSet;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            lr: 1e-3,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(alloc::format!(
                "lr must be positive, got {}",
                self.lr
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Adam with the usual moment constants.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: ParamSet,
    v: ParamSet,
    t: i32,
}

impl Adam {
    pub fn new(params: &ParamSet, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut ParamSet, grads: &ParamSet) {
        self.t += 1;
        let c1 = 1.0 - libm::pow(self.beta1, f64::from(self.t));
        let c2 = 1.0 - libm::pow(self.beta2, f64::from(self.t));
        for (((p, g), m), v) in params
            .tensors
            .iter_mut()
            .zip(&grads.tensors)
            .zip(&mut self.m.tensors)
            .zip(&mut self.v.tensors)
        {
            for i in 0..p.data.len() {
                let gi = g.data[i];
                m.data[i] = self.beta1 * m.data[i] + (1.0 - self.beta1) * gi;
                v.data[i] = self.beta2 * v.data[i] + (1.0 - self.beta2) * gi * gi;
                let mh = m.data[i] / c1;
                let vh = v.data[i] / c2;
                p.data[i] -= self.lr * mh / (libm::sqrt(vh) + self.eps);
            }
        }
    }
}

/// Runs `cfg.epochs` shuffled passes over `rows`. `loss_grad` returns the mean loss and
/// mean gradient of a batch. Returns the sample-weighted mean loss of each epoch.
pub fn train_params<F>(
    params: &mut ParamSet,
    rows: &[usize],
    cfg: &TrainConfig,
    mut loss_grad: F,
) -> Result<Vec<f64>>
where
    F: FnMut(&ParamSet, &[usize]) -> (f64, ParamSet),
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = Adam::new(params, cfg.lr);
    let mut order = rows.to_vec();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for (batch, idx) in order.chunks(cfg.batch_size).enumerate() {
            let (loss, grads) = loss_grad(params, idx);
            if !loss.is_finite() || !grads.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch });
            }
            adam.step(params, &grads);
            total += loss * idx.len() as f64;
        }
        history.push(if order.is_empty() {
            0.0
        } else {
            total / order.len() as f64
        });
    }
    Ok(history)
}

/// Deterministic shuffled split into (train, eval) row indices.
///
/// The eval part holds `round(n * eval_fraction)` rows, at least one when
/// `eval_fraction > 0` and `n >= 2`.
pub fn train_eval_split(
    n: usize,
    eval_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&eval_fraction) {
        return Err(Error::Config(alloc::format!(
            "eval_fraction must lie in [0, 1), got {eval_fraction}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut n_eval = libm::round(n as f64 * eval_fraction) as usize;
    if eval_fraction > 0.0 && n >= 2 {
        n_eval = n_eval.clamp(1, n - 1);
    }
    let eval = idx.split_off(n - n_eval);
    idx.sort_unstable();
    let mut eval = eval;
    eval.sort_unstable();
    Ok((idx, eval))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::Tensor;
    use alloc::vec;

    #[test]
    fn adam_minimizes_quadratic() {
        let mut p = ParamSet {
            tensors: vec![Tensor {
                name: "x".into(),
                rows: 1,
                cols: 1,
                data: vec![3.0],
            }],
        };
        let cfg = TrainConfig {
            epochs: 2000,
            lr: 0.05,
            batch_size: 1,
            seed: 1,
        };
        let hist = train_params(&mut p, &[0], &cfg, |p, _| {
            let x = p.tensors[0].data[0];
            let mut g = p.zeros_like();
            g.tensors[0].data[0] = 2.0 * x;
            (x * x, g)
        })
        .unwrap();
        assert!(p.tensors[0].data[0].abs() < 1e-3);
        assert!(hist.last().unwrap() < &1e-5);
    }

    #[test]
    fn nan_loss_aborts() {
        let mut p = ParamSet {
            tensors: vec![Tensor::zeros("x", 1, 1)],
        };
        let cfg = TrainConfig {
            epochs: 3,
            ..Default::default()
        };
        let err =
            train_params(&mut p, &[0, 1], &cfg, |p, _| (f64::NAN, p.zeros_like())).unwrap_err();
        assert_eq!(err, Error::NonFiniteLoss { epoch: 0, batch: 0 });
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let (a, b) = train_eval_split(10, 0.2, 7).unwrap();
        assert_eq!((a.len(), b.len()), (8, 2));
        assert_eq!(
            train_eval_split(10, 0.2, 7).unwrap(),
            (a.clone(), b.clone())
        );
        assert!(b.iter().all(|i| !a.contains(i)));
        assert_eq!(train_eval_split(5, 0.0, 1).unwrap().1.len(), 0);
        assert!(train_eval_split(5, 1.0, 1).is_err());
    }
}
