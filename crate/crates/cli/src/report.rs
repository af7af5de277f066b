//! CSV and JSON reports. Floats use Rust's shortest round-trip formatting so that
//! identical runs give identical bytes.

use std::collections::BTreeMap;

use conceptmine_core::conceptstats::Completion;
use conceptmine_core::grouping::ConceptGroup;
use conceptmine_core::pruning::PruneResult;
use serde::{Deserialize, Serialize};

use crate::pipeline::{ExplanationRow, MetricsRow};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCount {
    pub stage: String,
    pub count: usize,
    pub unit: String,
    /// The stage ran in its ablation mode.
    pub bypassed: bool,
}

impl StageCount {
    pub fn new(stage: &str, count: usize, unit: &str, bypassed: bool) -> Self {
        Self {
            stage: stage.into(),
            count,
            unit: unit.into(),
            bypassed,
        }
    }
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory csv")
}

pub fn stage_counts_csv(rows: &[StageCount]) -> Vec<u8> {
    let mut w = writer();
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    finish(w)
}

pub fn read_stage_counts(bytes: &[u8]) -> csv::Result<Vec<StageCount>> {
    csv::Reader::from_reader(bytes).deserialize().collect()
}

/// One row per selection step: the group picked, its gain and the running MI in bits.
pub fn prune_curve_csv(
    result: &PruneResult,
    groups: &[ConceptGroup],
    completion: &Completion,
) -> Vec<u8> {
    let mut w = writer();
    w.write_record([
        "step",
        "group",
        "representative",
        "gain_bits",
        "cumulative_bits",
    ])
    .expect("in-memory csv");
    for (step, ((&g, gain), cum)) in result
        .selected
        .iter()
        .zip(&result.gains)
        .zip(result.cumulative())
        .enumerate()
    {
        let rep = &completion.concepts[groups[g].representative].display;
        w.write_record([
            (step + 1).to_string(),
            g.to_string(),
            rep.clone(),
            gain.to_string(),
            cum.to_string(),
        ])
        .expect("in-memory csv");
    }
    finish(w)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn metrics_csv(rows: &[MetricsRow]) -> Vec<u8> {
    let mut w = writer();
    w.write_record([
        "model",
        "accuracy",
        "f1",
        "concept_auc",
        "auc_excluded",
        "eval_rows",
        "eval_on_train",
    ])
    .expect("in-memory csv");
    for r in rows {
        w.write_record([
            r.model.to_string(),
            r.metrics.accuracy.to_string(),
            r.metrics.f1.to_string(),
            opt(r.metrics.concept_auc),
            r.metrics.auc_excluded.to_string(),
            r.eval_rows.to_string(),
            r.eval_on_train.to_string(),
        ])
        .expect("in-memory csv");
    }
    finish(w)
}

fn pairs(items: &[(String, f64)]) -> String {
    items
        .iter()
        .map(|(name, a)| format!("{name}={a}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// `active` lists `concept=alpha` pairs for concepts with activation >= 0.5.
pub fn explanations_csv(rows: &[ExplanationRow]) -> Vec<u8> {
    let mut w = writer();
    w.write_record([
        "id",
        "label",
        "split",
        "predicted",
        "active",
        "top1",
        "alpha1",
        "top2",
        "alpha2",
        "top3",
        "alpha3",
        "others",
    ])
    .expect("in-memory csv");
    for r in rows {
        let mut fields = vec![
            r.id.to_string(),
            r.label.clone(),
            r.split.to_string(),
            r.predicted.clone(),
            pairs(&r.active),
        ];
        for i in 0..3 {
            match r.top.get(i) {
                Some((name, a)) => fields.extend([name.clone(), a.to_string()]),
                None => fields.extend([String::new(), String::new()]),
            }
        }
        fields.push(r.others.to_string());
        w.write_record(&fields).expect("in-memory csv");
    }
    finish(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub k: usize,
    pub mi_selected: f64,
    pub mi_full: f64,
    pub accuracy: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> Vec<u8> {
    let mut w = writer();
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    finish(w)
}

/// Digest of the configuration and of every written output; no timestamps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub outputs: BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_counts_round_trip() {
        let rows = vec![
            StageCount::new("clean", 4, "records", false),
            StageCount::new("extract", 8, "raw_concepts", true),
        ];
        let bytes = stage_counts_csv(&rows);
        assert_eq!(
            String::from_utf8(bytes.clone()).unwrap(),
            "stage,count,unit,bypassed\nclean,4,records,false\nextract,8,raw_concepts,true\n"
        );
        assert_eq!(read_stage_counts(&bytes).unwrap(), rows);
    }

    #[test]
    fn pair_lists() {
        assert_eq!(
            pairs(&[("a".into(), 0.5), ("b c".into(), 0.25)]),
            "a=0.5;b c=0.25"
        );
        assert_eq!(pairs(&[]), "");
    }
}
