//! Scalar and vector primitives shared by the models.

use alloc::vec::Vec;

/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` inside logarithms.
pub const PROB_EPS: f64 = 1e-12;

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| libm::exp(l - max)).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

pub fn clamped_ln(p: f64) -> f64 {
    libm::log(p.clamp(PROB_EPS, 1.0 - PROB_EPS))
}

pub fn cross_entropy(probs: &[f64], label: usize) -> f64 {
    -clamped_ln(probs[label])
}

/// Summed binary cross-entropy of `probs` against `targets`.
pub fn binary_cross_entropy(probs: &[f64], targets: &[f64]) -> f64 {
    probs
        .iter()
        .zip(targets)
        .map(|(&p, &t)| -(t * clamped_ln(p) + (1.0 - t) * clamped_ln(1.0 - p)))
        .sum()
}

pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitives() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(-800.0)).abs() < 1e-300);
        let p = softmax(&[1000.0, 1000.0]);
        assert_eq!(p, alloc::vec![0.5, 0.5]);
        assert!((cross_entropy(&[0.25; 4], 2) - libm::log(4.0)).abs() < 1e-12);
        assert!(
            (binary_cross_entropy(&[0.5; 3], &[1.0, 0.0, 1.0]) - 3.0 * libm::log(2.0)).abs()
                < 1e-12
        );
        assert_eq!(argmax(&[0.1, 0.7, 0.7]), 1);
    }
}
