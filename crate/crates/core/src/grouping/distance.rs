//! Text distance, the Dirichlet plug-in label evidence ratio, and their combination.

use super::embed::Embedding;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TextMetric {
    #[default]
    Cosine,
    Manhattan,
}

pub fn d_text(a: &Embedding, b: &Embedding, metric: TextMetric) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let (a, b) = (a.as_slice(), b.as_slice());
    match metric {
        TextMetric::Cosine => {
            let na = libm::sqrt(a.iter().map(|x| x * x).sum());
            let nb = libm::sqrt(b.iter().map(|x| x * x).sum());
            if na == 0.0 || nb == 0.0 {
                return Err(Error::UndefinedMetric);
            }
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            Ok((1.0 - dot / (na * nb)).max(0.0))
        }
        TextMetric::Manhattan => Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()),
    }
}

/// Log evidence of a label-count vector under the posterior-mean categorical:
/// `sum_l n_l * ln((n_l + alpha) / (n + K alpha))`. An all-zero vector gives 0.
pub fn plugin_log_evidence(counts: &[f64], alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::Domain(alloc::format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if counts.iter().any(|&c| !c.is_finite() || c < 0.0) {
        return Err(Error::Domain(
            "label counts must be finite and non-negative".into(),
        ));
    }
    let n: f64 = counts.iter().sum();
    let denom = n + counts.len() as f64 * alpha;
    Ok(counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| c * libm::log((c + alpha) / denom))
        .sum())
}

/// Evidence ratio of two count vectors coming from independent categoricals versus
/// one shared categorical. Below 1 when they look alike, above 1 when they differ.
pub fn d_label(a: &[f64], b: &[f64], alpha: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let joint: alloc::vec::Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let log_ratio = plugin_log_evidence(a, alpha)? + plugin_log_evidence(b, alpha)?
        - plugin_log_evidence(&joint, alpha)?;
    Ok(libm::exp(log_ratio))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetaDistanceParams {
    pub lambda: f64,
    pub alpha: f64,
    pub text_metric: TextMetric,
}

impl Default for MetaDistanceParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            alpha: 1.0,
            text_metric: TextMetric::Cosine,
        }
    }
}

impl MetaDistanceParams {
    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::Config(alloc::format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::Config(alloc::format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// `d_text(v_i, v_j) + lambda * d_label(n_i, n_j)`.
pub fn meta_distance(
    (v_i, n_i): (&Embedding, &[f64]),
    (v_j, n_j): (&Embedding, &[f64]),
    params: &MetaDistanceParams,
) -> Result<f64> {
    let text = d_text(v_i, v_j, params.text_metric)?;
    if params.lambda == 0.0 {
        return Ok(text);
    }
    Ok(text + params.lambda * d_label(n_i, n_j, params.alpha)?)
}
