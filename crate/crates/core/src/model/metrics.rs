//! Task accuracy, macro-F1 and rank-based concept AUC.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Metrics {
    pub accuracy: f64,
    pub f1: f64,
    /// Mean AUC over concepts with both classes present; `None` when there are none.
    pub concept_auc: Option<f64>,
    /// Concepts left out of `concept_auc` because their targets were constant.
    pub auc_excluded: usize,
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    hits as f64 / truth.len() as f64
}

/// Per-class F1 averaged over every class that occurs in `truth` or `pred`.
pub fn macro_f1(pred: &[usize], truth: &[usize]) -> f64 {
    let classes: BTreeSet<usize> = pred.iter().chain(truth).copied().collect();
    if classes.is_empty() {
        return 0.0;
    }
    let total: f64 = classes
        .iter()
        .map(|&c| {
            let mut tp = 0usize;
            let mut fp = 0usize;
            let mut fn_ = 0usize;
            for (&p, &t) in pred.iter().zip(truth) {
                match (p == c, t == c) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    _ => {}
                }
            }
            let denom = 2 * tp + fp + fn_;
            if denom == 0 {
                0.0
            } else {
                2.0 * tp as f64 / denom as f64
            }
        })
        .sum();
    total / classes.len() as f64
}

/// Mann-Whitney AUC of `scores` against binary `targets`, ties counted half.
/// `None` when the targets are constant.
pub fn auc(scores: &[f64], targets: &[bool]) -> Option<f64> {
    let pos = targets.iter().filter(|&&t| t).count();
    let neg = targets.len() - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        // average 1-based rank of the tie block
        let rank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += rank * idx[i..=j].iter().filter(|&&k| targets[k]).count() as f64;
        i = j + 1;
    }
    let pos_f = pos as f64;
    Some((rank_sum - pos_f * (pos_f + 1.0) / 2.0) / (pos_f * neg as f64))
}

/// Macro AUC over concept columns; returns the mean and the number of excluded columns.
pub fn concept_auc(scores: &[Vec<f64>], targets: &[Vec<f64>]) -> (Option<f64>, usize) {
    let k = targets.first().map_or(0, Vec::len);
    let mut sum = 0.0;
    let mut used = 0usize;
    for j in 0..k {
        let s: Vec<f64> = scores.iter().map(|r| r[j]).collect();
        let t: Vec<bool> = targets.iter().map(|r| r[j] >= 0.5).collect();
        if let Some(a) = auc(&s, &t) {
            sum += a;
            used += 1;
        }
    }
    let mean = (used > 0).then(|| sum / used as f64);
    (mean, k - used)
}

pub fn evaluate(
    pred: &[usize],
    truth: &[usize],
    concept_scores: &[Vec<f64>],
    concept_targets: &[Vec<f64>],
) -> Metrics {
    let (concept_auc, auc_excluded) = concept_auc(concept_scores, concept_targets);
    Metrics {
        accuracy: accuracy(pred, truth),
        f1: macro_f1(pred, truth),
        concept_auc,
        auc_excluded,
    }
}
