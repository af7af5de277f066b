//! Stage functions. Each one takes the previous stage's output and the config, so the
//! subcommands and `run-all` share one code path.

use std::collections::BTreeSet;

use conceptmine_core::conceptstats::{complete, Completion};
use conceptmine_core::corpus::{merge_by_id, ExplanationCorpus};
use conceptmine_core::grouping::{
    cluster, filter_rare, singleton_groups, ConceptGroup, Embedder, Embedding, HashEmbedder,
    DEFAULT_HASH_SEED,
};
use conceptmine_core::lingfront::{
    extract_raw_concepts, Extraction, ExtractionMode, FallbackParser, ParseSource,
};
use conceptmine_core::model::{
    argmax, evaluate as score, standard_normal, train_eval_split, BottleneckConfig,
    BottleneckModel, ClassifierKind, ConceptClassifier, Dataset, Metrics,
};
use conceptmine_core::pruning::{greedy_prune, mutual_information, PresenceTable, PruneResult};
use conceptmine_core::vectorize::{vectorize, ConceptLexicon, ConceptMatrix};
use conceptmine_core::Error as CoreError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::formats;
use crate::{Error, Result};

/// Corpora smaller than this are evaluated on their training rows.
pub const MIN_SPLIT_RECORDS: usize = 10;

const FEATURE_NOISE: f64 = 0.1;
// keeps the surrogate projection independent of the training RNG stream
const FEATURE_SEED_SALT: u64 = 0x5eed_f00d;

/// Loads the corpus, merges annotators when enabled, then drops null-labelled rows.
pub fn clean(cfg: &RunConfig) -> Result<ExplanationCorpus> {
    let path = cfg.corpus_path()?;
    let mut records = formats::read_corpus(path)?;
    if records.is_empty() {
        return Err(CoreError::EmptyCorpus.into());
    }
    if cfg.merge_annotators {
        records = merge_by_id(records)?;
    }
    let corpus = ExplanationCorpus::new(records, cfg.null_labels.iter().cloned().collect())?;
    let cleaned = corpus.clean();
    if cleaned.is_empty() {
        return Err(CoreError::EmptyCorpus.into());
    }
    Ok(cleaned)
}

/// Rebuilds a cleaned corpus from `corpus.clean.jsonl`.
pub fn load_clean(cfg: &RunConfig, path: &std::path::Path) -> Result<ExplanationCorpus> {
    let records = formats::read_corpus(path)?;
    Ok(ExplanationCorpus::new(
        records,
        cfg.null_labels.iter().cloned().collect(),
    )?)
}

pub fn extract(cfg: &RunConfig, corpus: &ExplanationCorpus) -> Result<Extraction> {
    if cfg.word_level {
        return Ok(extract_raw_concepts(
            corpus,
            &FallbackParser,
            ExtractionMode::WordLevel,
        )?);
    }
    let source: Box<dyn ParseSource> = match &cfg.parses {
        Some(p) => Box::new(formats::read_parses(p)?),
        None => Box::new(FallbackParser),
    };
    Ok(extract_raw_concepts(
        corpus,
        source.as_ref(),
        ExtractionMode::Rules,
    )?)
}

pub fn completion(
    cfg: &RunConfig,
    corpus: &ExplanationCorpus,
    extraction: &Extraction,
) -> Result<Completion> {
    Ok(complete(corpus, extraction, cfg.matching)?)
}

/// Embedding table when configured, hashed trigrams otherwise.
pub fn embedder(cfg: &RunConfig) -> Result<Box<dyn Embedder>> {
    Ok(match &cfg.embeddings {
        Some(p) => Box::new(formats::read_embeddings(p)?),
        None => Box::new(HashEmbedder {
            dim: cfg.embedding_dim,
            seed: DEFAULT_HASH_SEED,
        }),
    })
}

/// Clusters (or keeps singletons under `skip_grouping`), then applies the count threshold.
pub fn group(cfg: &RunConfig, completion: &Completion) -> Result<Vec<ConceptGroup>> {
    let groups = if cfg.skip_grouping {
        singleton_groups(completion)
    } else {
        let embedder = embedder(cfg)?;
        let vectors = completion
            .concepts
            .iter()
            .map(|c| embedder.embed(&c.norm))
            .collect::<conceptmine_core::Result<Vec<Embedding>>>()?;
        cluster(
            completion,
            &vectors,
            &cfg.meta_params(),
            cfg.linkage,
            cfg.cut_threshold,
        )?
    };
    Ok(filter_rare(groups, cfg.min_count)?)
}

pub fn presence_table(completion: &Completion, groups: &[ConceptGroup]) -> Result<PresenceTable> {
    let members: Vec<Vec<usize>> = groups.iter().map(|g| g.members.clone()).collect();
    Ok(PresenceTable::from_containment(
        &completion.containment,
        &completion.record_labels,
        &members,
        completion.concepts.len(),
    )?)
}

/// Greedy selection at `gamma`; under `skip_pruning` every group is kept in grouping order.
pub fn prune(
    cfg: &RunConfig,
    completion: &Completion,
    groups: &[ConceptGroup],
    gamma: f64,
) -> Result<PruneResult> {
    let table = presence_table(completion, groups)?;
    if !cfg.skip_pruning {
        return Ok(greedy_prune(&table, gamma)?);
    }
    let all: Vec<usize> = (0..groups.len()).collect();
    let mut gains = Vec::with_capacity(all.len());
    let mut prev = 0.0;
    for k in 1..=all.len() {
        let mi = mutual_information(&table, &all[..k])?;
        gains.push(mi - prev);
        prev = mi;
    }
    let mi_full = mutual_information(&table, &all)?;
    Ok(PruneResult {
        selected: all,
        gains,
        mi_full,
        mi_selected: mi_full,
        gamma: 1.0,
        shortfall: 0.0,
    })
}

pub fn vectorize_stage(
    cfg: &RunConfig,
    corpus: &ExplanationCorpus,
    completion: &Completion,
    groups: &[ConceptGroup],
    selected: &[usize],
) -> Result<(ConceptLexicon, ConceptMatrix)> {
    let lexicon = ConceptLexicon::from_groups(completion, groups, selected)?;
    let matrix = vectorize(corpus, &lexicon, cfg.matching);
    Ok((lexicon, matrix))
}

/// Features aligned with the matrix rows.
///
/// Without a features file, each record gets `W^T c + noise` for a seeded Gaussian `W`,
/// so the surrogate features carry exactly the concept signal plus noise.
pub fn features(cfg: &RunConfig, matrix: &ConceptMatrix) -> Result<Vec<Vec<f64>>> {
    if let Some(path) = &cfg.features {
        let table = formats::read_features(path)?;
        return matrix
            .ids
            .iter()
            .map(|id| {
                table
                    .get(id)
                    .cloned()
                    .ok_or_else(|| Error::format(path, format!("no features for record {id}")))
            })
            .collect();
    }
    let k = matrix.num_concepts;
    let d = cfg.feature_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ FEATURE_SEED_SALT);
    let w: Vec<f64> = (0..k * d).map(|_| standard_normal(&mut rng)).collect();
    Ok(matrix
        .rows
        .iter()
        .map(|row| {
            (0..d)
                .map(|j| {
                    let signal: f64 = row
                        .iter()
                        .enumerate()
                        .map(|(c, &b)| f64::from(b) * w[c * d + j])
                        .sum();
                    signal + FEATURE_NOISE * standard_normal(&mut rng)
                })
                .collect()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub eval: Vec<usize>,
    /// Set when the corpus is too small to hold out rows.
    pub eval_on_train: bool,
}

pub fn split(cfg: &RunConfig, n: usize) -> Result<Split> {
    if n < MIN_SPLIT_RECORDS {
        let all: Vec<usize> = (0..n).collect();
        return Ok(Split {
            train: all.clone(),
            eval: all,
            eval_on_train: true,
        });
    }
    let (train, eval) = train_eval_split(n, cfg.eval_fraction, cfg.seed)?;
    if eval.is_empty() {
        return Ok(Split {
            eval: train.clone(),
            train,
            eval_on_train: true,
        });
    }
    Ok(Split {
        train,
        eval,
        eval_on_train: false,
    })
}

pub fn dataset(
    corpus: &ExplanationCorpus,
    matrix: &ConceptMatrix,
    features: Vec<Vec<f64>>,
) -> Result<Dataset> {
    if matrix.num_concepts == 0 {
        return Err(CoreError::DegenerateTask("the concept lexicon is empty".into()).into());
    }
    let ids: Vec<u64> = corpus.records().iter().map(|r| r.id).collect();
    if ids != matrix.ids {
        return Err(Error::Config(
            "matrix rows do not match the cleaned corpus".into(),
        ));
    }
    Ok(Dataset {
        features,
        concepts: matrix.as_f64(),
        labels: corpus.label_indices()?,
        num_classes: corpus.labels().len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub seed: u64,
    pub labels: Vec<String>,
    pub concepts: Vec<String>,
    pub model: BottleneckModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifiers {
    pub linear: ConceptClassifier,
    pub mlp: ConceptClassifier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub checkpoint: Checkpoint,
    pub classifiers: Classifiers,
    pub split: Split,
    pub history: Vec<f64>,
}

pub fn train(
    cfg: &RunConfig,
    corpus: &ExplanationCorpus,
    lexicon: &ConceptLexicon,
    data: &Dataset,
) -> Result<Trained> {
    let split = split(cfg, data.len())?;
    let train_cfg = cfg.train_config();
    let config = BottleneckConfig {
        input_dim: data.features.first().map_or(cfg.feature_dim, Vec::len),
        hidden: cfg.hidden,
        num_concepts: lexicon.len(),
        attention_dim: cfg.attention_dim,
        num_classes: data.num_classes,
        beta: cfg.beta,
    };
    let mut model = BottleneckModel::new(config, cfg.seed)?;
    let history = model.fit(data, &split.train, &train_cfg)?;

    let mut linear = ConceptClassifier::new(
        ClassifierKind::Linear,
        lexicon.len(),
        data.num_classes,
        cfg.seed,
    )?;
    linear.fit(&data.concepts, &data.labels, &split.train, &train_cfg)?;
    let mut mlp = ConceptClassifier::new(
        ClassifierKind::Mlp {
            hidden: cfg.mlp_hidden,
        },
        lexicon.len(),
        data.num_classes,
        cfg.seed,
    )?;
    mlp.fit(&data.concepts, &data.labels, &split.train, &train_cfg)?;

    Ok(Trained {
        checkpoint: Checkpoint {
            seed: cfg.seed,
            labels: corpus.labels().to_vec(),
            concepts: lexicon
                .concepts
                .iter()
                .map(|e| e.representative.clone())
                .collect(),
            model,
        },
        classifiers: Classifiers { linear, mlp },
        split,
        history,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub model: &'static str,
    pub metrics: Metrics,
    pub eval_rows: usize,
    pub eval_on_train: bool,
}

/// One explanation report per record.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplanationRow {
    pub id: u64,
    pub label: String,
    pub split: &'static str,
    pub predicted: String,
    /// Concepts with activation at least 0.5, with their attention weight.
    pub active: Vec<(String, f64)>,
    /// Three largest attention weights.
    pub top: Vec<(String, f64)>,
    pub others: f64,
}

pub struct Evaluation {
    pub metrics: Vec<MetricsRow>,
    pub explanations: Vec<ExplanationRow>,
}

pub fn evaluate(
    corpus: &ExplanationCorpus,
    data: &Dataset,
    trained: &Trained,
) -> Result<Evaluation> {
    let split = &trained.split;
    let model = &trained.checkpoint.model;
    let names = &trained.checkpoint.concepts;
    let labels = &trained.checkpoint.labels;
    let truth: Vec<usize> = split.eval.iter().map(|&r| data.labels[r]).collect();

    let preds = model.predict(data, &split.eval)?;
    let classes: Vec<usize> = preds.classes.iter().map(|p| argmax(p)).collect();
    let targets: Vec<Vec<f64>> = split
        .eval
        .iter()
        .map(|&r| data.concepts[r].clone())
        .collect();
    let mut metrics = vec![MetricsRow {
        model: "bottleneck",
        metrics: score(&classes, &truth, &preds.concepts, &targets),
        eval_rows: split.eval.len(),
        eval_on_train: split.eval_on_train,
    }];
    for (name, clf) in [
        ("linear", &trained.classifiers.linear),
        ("mlp", &trained.classifiers.mlp),
    ] {
        let pred = split
            .eval
            .iter()
            .map(|&r| clf.predict_proba(&data.concepts[r]).map(|p| argmax(&p)))
            .collect::<conceptmine_core::Result<Vec<_>>>()?;
        metrics.push(MetricsRow {
            model: name,
            metrics: score(&pred, &truth, &[], &[]),
            eval_rows: split.eval.len(),
            eval_on_train: split.eval_on_train,
        });
    }

    let in_eval: BTreeSet<usize> = split.eval.iter().copied().collect();
    let explanations = corpus
        .records()
        .iter()
        .enumerate()
        .map(|(r, rec)| {
            let f = model.forward(&data.features[r])?;
            let active = f
                .concepts
                .iter()
                .zip(&f.attention)
                .enumerate()
                .filter(|(_, (&c, _))| c >= 0.5)
                .map(|(k, (_, &a))| (names[k].clone(), a))
                .collect();
            let mut order: Vec<usize> = (0..f.attention.len()).collect();
            // stable sort keeps the lower index first on equal weights
            order.sort_by(|&a, &b| f.attention[b].total_cmp(&f.attention[a]));
            let top: Vec<(String, f64)> = order
                .iter()
                .take(3)
                .map(|&k| (names[k].clone(), f.attention[k]))
                .collect();
            let others = (1.0 - top.iter().map(|(_, a)| a).sum::<f64>()).max(0.0);
            let split_name = match (split.eval_on_train, in_eval.contains(&r)) {
                (true, _) => "train+eval",
                (false, true) => "eval",
                (false, false) => "train",
            };
            Ok(ExplanationRow {
                id: rec.id,
                label: rec.label.clone(),
                split: split_name,
                predicted: labels[argmax(&f.class_probs)].clone(),
                active,
                top,
                others,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation {
        metrics,
        explanations,
    })
}
