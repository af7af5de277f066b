//! Synthetic data with a known concept structure.
//!
//! Features are standard normal. Concept `k` fires when a fixed random projection of the
//! features plus small Gaussian noise is positive. The label is `2 c_0 + c_1`, so four
//! classes are read off the first two concepts and the rest are distractors.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticConfig {
    pub samples: usize,
    pub features: usize,
    /// At least 2.
    pub concepts: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            samples: 2000,
            features: 8,
            concepts: 8,
            noise: 0.02,
            seed: 0,
        }
    }
}

pub const SYNTHETIC_CLASSES: usize = 4;

/// Box-Muller standard normal.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

pub fn generate(cfg: &SyntheticConfig) -> Result<Dataset> {
    if cfg.concepts < 2 || cfg.features == 0 {
        return Err(Error::Config(
            "synthetic data needs at least 2 concepts and 1 feature".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let directions: Vec<Vec<f64>> = (0..cfg.concepts)
        .map(|_| {
            (0..cfg.features)
                .map(|_| standard_normal(&mut rng))
                .collect()
        })
        .collect();
    let mut data = Dataset {
        features: Vec::with_capacity(cfg.samples),
        concepts: Vec::with_capacity(cfg.samples),
        labels: Vec::with_capacity(cfg.samples),
        num_classes: SYNTHETIC_CLASSES,
    };
    let scale = libm::sqrt(cfg.features as f64);
    for _ in 0..cfg.samples {
        let x: Vec<f64> = (0..cfg.features)
            .map(|_| standard_normal(&mut rng))
            .collect();
        let c: Vec<f64> = directions
            .iter()
            .map(|a| {
                let proj = a.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>() / scale;
                f64::from(u8::from(proj + cfg.noise * standard_normal(&mut rng) > 0.0))
            })
            .collect();
        data.labels.push(2 * (c[0] as usize) + c[1] as usize);
        data.features.push(x);
        data.concepts.push(c);
    }
    Ok(data)
}

/// Four-pattern design over two concepts with label `c_0 XOR c_1`.
pub fn xor_design() -> (Vec<Vec<f64>>, Vec<usize>) {
    let xs = alloc::vec![
        alloc::vec![0.0, 0.0],
        alloc::vec![0.0, 1.0],
        alloc::vec![1.0, 0.0],
        alloc::vec![1.0, 1.0],
    ];
    (xs, alloc::vec![0, 1, 1, 0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_balancedish() {
        let cfg = SyntheticConfig {
            samples: 400,
            ..Default::default()
        };
        let a = generate(&cfg).unwrap();
        assert_eq!(a, generate(&cfg).unwrap());
        let mut counts = [0usize; 4];
        for &y in &a.labels {
            counts[y] += 1;
        }
        assert!(counts.iter().all(|&c| c > 40), "{counts:?}");
    }
}
