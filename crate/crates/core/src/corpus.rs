//! Explanation records, annotator merging and cleaning.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// One labelled explanation.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExplanationRecord {
    pub id: u64,
    pub label: String,
    pub explanation: String,
}

impl ExplanationRecord {
    pub fn new(id: u64, label: impl Into<String>, explanation: impl Into<String>) -> Self {
        Self {
            id,
            label: label.into(),
            explanation: explanation.into(),
        }
    }
}

/// An ordered explanation corpus with its label set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplanationCorpus {
    records: Vec<ExplanationRecord>,
    labels: Vec<String>,
    null_labels: BTreeSet<String>,
}

pub fn default_null_labels() -> BTreeSet<String> {
    core::iter::once("none".to_string()).collect()
}

impl ExplanationCorpus {
    /// Builds a corpus from records in their given order.
    ///
    /// Record ids must be unique; use [`merge_by_id`] first when several annotators
    /// contributed explanations for the same sample.
    pub fn new(records: Vec<ExplanationRecord>, null_labels: BTreeSet<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &records {
            if !seen.insert(r.id) {
                return Err(Error::DuplicateId(r.id));
            }
        }
        let labels = infer_labels(&records, &null_labels);
        Ok(Self {
            records,
            labels,
            null_labels,
        })
    }

    pub fn records(&self) -> &[ExplanationRecord] {
        &self.records
    }

    /// Sorted distinct labels, excluding null labels.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn null_labels(&self) -> &BTreeSet<String> {
        &self.null_labels
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    /// Label index of every record, in record order.
    ///
    /// Fails if a record still carries a null label.
    pub fn label_indices(&self) -> Result<Vec<usize>> {
        self.records
            .iter()
            .map(|r| {
                self.label_index(&r.label).ok_or_else(|| {
                    Error::Validation(alloc::format!(
                        "record {} has null label {:?}",
                        r.id,
                        r.label
                    ))
                })
            })
            .collect()
    }

    /// Drops records whose label is a null label; survivors keep their order and text.
    pub fn clean(&self) -> Self {
        let records: Vec<_> = self
            .records
            .iter()
            .filter(|r| !self.null_labels.contains(&r.label))
            .cloned()
            .collect();
        let labels = infer_labels(&records, &self.null_labels);
        Self {
            records,
            labels,
            null_labels: self.null_labels.clone(),
        }
    }

    /// Same corpus with records reordered by `order` (a permutation of positions).
    pub fn reordered(&self, order: &[usize]) -> Self {
        Self {
            records: order.iter().map(|&i| self.records[i].clone()).collect(),
            labels: self.labels.clone(),
            null_labels: self.null_labels.clone(),
        }
    }
}

fn infer_labels(records: &[ExplanationRecord], null_labels: &BTreeSet<String>) -> Vec<String> {
    records
        .iter()
        .filter(|r| !null_labels.contains(&r.label))
        .map(|r| r.label.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Joins explanations of records sharing an id with single spaces, in input order.
pub fn merge_annotators(records: &[ExplanationRecord]) -> Result<ExplanationRecord> {
    let first = records
        .first()
        .ok_or_else(|| Error::Validation("no records to merge".into()))?;
    let mut explanation = String::new();
    for r in records {
        if r.id != first.id {
            return Err(Error::Validation(alloc::format!(
                "cannot merge records with ids {} and {}",
                first.id,
                r.id
            )));
        }
        if r.label != first.label {
            return Err(Error::LabelConflict {
                id: r.id,
                first: first.label.clone(),
                second: r.label.clone(),
            });
        }
        if !explanation.is_empty() {
            explanation.push(' ');
        }
        explanation.push_str(&r.explanation);
    }
    Ok(ExplanationRecord::new(
        first.id,
        first.label.clone(),
        explanation,
    ))
}

/// Merges every group of records that share an id. Output order follows the first
/// appearance of each id.
pub fn merge_by_id(records: Vec<ExplanationRecord>) -> Result<Vec<ExplanationRecord>> {
    let mut order: Vec<u64> = Vec::new();
    let mut groups: BTreeMap<u64, Vec<ExplanationRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry(r.id)
            .or_insert_with(|| {
                order.push(r.id);
                Vec::new()
            })
            .push(r);
    }
    order
        .into_iter()
        .map(|id| merge_annotators(&groups[&id]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn a1() -> ExplanationCorpus {
        ExplanationCorpus::new(
            vec![
                ExplanationRecord::new(
                    1,
                    "strike",
                    "The batter did not swing. The ball was in the strike zone.",
                ),
                ExplanationRecord::new(
                    2,
                    "foul",
                    "the batter hit the ball into the stands and it landed in foul territory",
                ),
                ExplanationRecord::new(
                    3,
                    "ball",
                    "The hitter didn't swing. The ball was outside the strike zone.",
                ),
                ExplanationRecord::new(4, "none", "The video did not load."),
                ExplanationRecord::new(
                    5,
                    "out",
                    "the batter hit the ball and it was caught by the fielder",
                ),
            ],
            default_null_labels(),
        )
        .unwrap()
    }

    #[test]
    fn labels_exclude_null() {
        let c = a1();
        assert_eq!(c.len(), 5);
        assert_eq!(c.labels(), &["ball", "foul", "out", "strike"]);
    }

    #[test]
    fn clean_removes_none_row() {
        let c = a1().clean();
        assert_eq!(c.len(), 4);
        let ids: Vec<u64> = c.records().iter().map(|r| r.id).collect();
        assert_eq!(ids, vec![1, 2, 3, 5]);
        assert_eq!(c.clean(), c);
        assert_eq!(c.records()[1], a1().records()[1]);
    }

    #[test]
    fn clean_of_only_null_labels_is_empty() {
        let c = ExplanationCorpus::new(
            vec![
                ExplanationRecord::new(1, "none", "x"),
                ExplanationRecord::new(2, "none", "y"),
            ],
            default_null_labels(),
        )
        .unwrap()
        .clean();
        assert!(c.is_empty());
        assert!(c.labels().is_empty());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = ExplanationCorpus::new(
            vec![
                ExplanationRecord::new(1, "strike", "x"),
                ExplanationRecord::new(1, "strike", "y"),
            ],
            default_null_labels(),
        )
        .unwrap_err();
        assert_eq!(err, Error::DuplicateId(1));
    }

    #[test]
    fn merge_concatenates_in_order() {
        let merged = merge_annotators(&[
            ExplanationRecord::new(1, "strike", "A."),
            ExplanationRecord::new(1, "strike", "B."),
        ])
        .unwrap();
        assert_eq!(merged, ExplanationRecord::new(1, "strike", "A. B."));

        let single = ExplanationRecord::new(7, "ball", "only");
        assert_eq!(
            merge_annotators(core::slice::from_ref(&single)).unwrap(),
            single
        );
    }

    #[test]
    fn merge_rejects_label_conflict() {
        let err = merge_annotators(&[
            ExplanationRecord::new(1, "strike", "A"),
            ExplanationRecord::new(1, "ball", "B"),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::LabelConflict { id: 1, .. }));
    }

    #[test]
    fn merge_by_id_keeps_first_appearance_order() {
        let merged = merge_by_id(vec![
            ExplanationRecord::new(2, "ball", "x"),
            ExplanationRecord::new(1, "strike", "a"),
            ExplanationRecord::new(2, "ball", "y"),
        ])
        .unwrap();
        assert_eq!(merged[0], ExplanationRecord::new(2, "ball", "x y"));
        assert_eq!(merged[1].id, 1);
    }
}
