//! Concept-bottleneck network, concept-only classifiers, training and metrics.

mod bottleneck;
mod classifier;
mod metrics;
mod ops;
mod params;
mod synthetic;
mod train;

use alloc::vec::Vec;

pub use bottleneck::{
    BottleneckConfig, BottleneckModel, Forward, LossParts, Predictions, PARAM_NAMES,
};
pub use classifier::{ClassifierKind, ConceptClassifier};
pub use metrics::{accuracy, auc, concept_auc, evaluate, macro_f1, Metrics};
pub use ops::{argmax, softmax, PROB_EPS};
pub use params::{ParamSet, Tensor};
pub use synthetic::{generate, standard_normal, xor_design, SyntheticConfig, SYNTHETIC_CLASSES};
pub use train::{train_eval_split, train_params, Adam, TrainConfig};

use crate::{Error, Result};

/// Features, concept targets and labels, aligned by row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    /// Binary concept targets in `{0, 1}`.
    pub concepts: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn check_shapes(&self, input_dim: usize, num_classes: usize) -> Result<()> {
        let n = self.labels.len();
        for len in [self.features.len(), self.concepts.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if let Some(bad) = self.features.iter().find(|x| x.len() != input_dim) {
            return Err(Error::DimensionMismatch {
                expected: input_dim,
                found: bad.len(),
            });
        }
        if let Some(&bad) = self.labels.iter().find(|&&y| y >= num_classes) {
            return Err(Error::Validation(alloc::format!(
                "label {bad} out of range for {num_classes} classes"
            )));
        }
        Ok(())
    }
}
