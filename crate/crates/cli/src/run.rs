//! Whole-pipeline runs, single-stage runs and the gamma sweep.

use std::path::Path;

use conceptmine_core::conceptstats::Completion;
use conceptmine_core::corpus::ExplanationCorpus;
use conceptmine_core::grouping::ConceptGroup;
use conceptmine_core::lingfront::Extraction;
use conceptmine_core::pruning::PruneResult;
use conceptmine_core::vectorize::{ConceptLexicon, ConceptMatrix};

use crate::config::RunConfig;
use crate::error::StageContext;
use crate::formats::{self, OutputDir};
use crate::pipeline::{self, Checkpoint, Classifiers, Evaluation, Split, Trained};
use crate::report::{self, Manifest, StageCount, SweepRow};
use crate::{Error, Result};

pub const CLEAN_FILE: &str = "corpus.clean.jsonl";
pub const EXTRACTION_FILE: &str = "extraction.json";
pub const COMPLETION_FILE: &str = "completion.json";
pub const GROUPS_FILE: &str = "groups.json";
pub const PRUNE_FILE: &str = "prune.json";
pub const PRUNE_CURVE_FILE: &str = "prune_curve.csv";
pub const LEXICON_FILE: &str = "lexicon.json";
pub const MATRIX_FILE: &str = "matrix.csv";
pub const MODEL_FILE: &str = "model.json";
pub const CLASSIFIERS_FILE: &str = "classifiers.json";
pub const SPLIT_FILE: &str = "split.json";
pub const METRICS_FILE: &str = "metrics.csv";
pub const EXPLANATIONS_FILE: &str = "explanations.csv";
pub const STAGE_COUNTS_FILE: &str = "stage_counts.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SWEEP_FILE: &str = "sweep.csv";

/// Every intermediate of one discovery pass, before training.
#[derive(Debug, Clone)]
pub struct Discovery {
    pub corpus: ExplanationCorpus,
    pub extraction: Extraction,
    pub completion: Completion,
    pub groups: Vec<ConceptGroup>,
    pub prune: PruneResult,
    pub lexicon: ConceptLexicon,
    pub matrix: ConceptMatrix,
}

impl Discovery {
    pub fn stage_counts(&self, cfg: &RunConfig) -> Vec<StageCount> {
        vec![
            StageCount::new("clean", self.corpus.len(), "records", false),
            StageCount::new(
                "extract",
                self.extraction.concepts.len(),
                "raw_concepts",
                cfg.word_level,
            ),
            StageCount::new(
                "complete",
                self.completion.occurrences(),
                "occurrences",
                false,
            ),
            StageCount::new("group", self.groups.len(), "groups", cfg.skip_grouping),
            StageCount::new(
                "prune",
                self.prune.selected.len(),
                "concepts",
                cfg.skip_pruning,
            ),
            StageCount::new("vectorize", self.matrix.num_concepts, "columns", false),
        ]
    }
}

/// Upstream stages shared by every gamma.
#[derive(Clone)]
struct Upstream {
    corpus: ExplanationCorpus,
    extraction: Extraction,
    completion: Completion,
    groups: Vec<ConceptGroup>,
}

fn upstream(cfg: &RunConfig) -> Result<Upstream> {
    let corpus = pipeline::clean(cfg).stage("clean")?;
    let extraction = pipeline::extract(cfg, &corpus).stage("extract")?;
    let completion = pipeline::completion(cfg, &corpus, &extraction).stage("complete")?;
    let groups = pipeline::group(cfg, &completion).stage("group")?;
    Ok(Upstream {
        corpus,
        extraction,
        completion,
        groups,
    })
}

fn downstream(cfg: &RunConfig, up: Upstream, gamma: f64) -> Result<Discovery> {
    let prune = pipeline::prune(cfg, &up.completion, &up.groups, gamma).stage("prune")?;
    let (lexicon, matrix) =
        pipeline::vectorize_stage(cfg, &up.corpus, &up.completion, &up.groups, &prune.selected)
            .stage("vectorize")?;
    Ok(Discovery {
        corpus: up.corpus,
        extraction: up.extraction,
        completion: up.completion,
        groups: up.groups,
        prune,
        lexicon,
        matrix,
    })
}

/// The six discovery stages, in memory.
pub fn discover(cfg: &RunConfig) -> Result<Discovery> {
    downstream(cfg, upstream(cfg)?, cfg.gamma)
}

pub struct RunOutcome {
    pub discovery: Discovery,
    pub trained: Trained,
    pub evaluation: Evaluation,
    pub manifest: Manifest,
}

fn train_and_evaluate(cfg: &RunConfig, d: &Discovery) -> Result<(Trained, Evaluation)> {
    let features = pipeline::features(cfg, &d.matrix).stage("train")?;
    let data = pipeline::dataset(&d.corpus, &d.matrix, features).stage("train")?;
    let trained = pipeline::train(cfg, &d.corpus, &d.lexicon, &data).stage("train")?;
    let evaluation = pipeline::evaluate(&d.corpus, &data, &trained).stage("evaluate")?;
    Ok((trained, evaluation))
}

/// Hash of the resolved config with the output directory blanked, so the same inputs
/// written to two places hash alike.
pub fn config_digest(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.out_dir = Default::default();
    formats::sha256_hex(c.canonical_json().as_bytes())
}

/// Runs every stage, then trains and evaluates, writing all artifacts to `out_dir`.
pub fn run_all(cfg: &RunConfig) -> Result<RunOutcome> {
    let discovery = discover(cfg)?;
    let (trained, evaluation) = train_and_evaluate(cfg, &discovery)?;
    let mut out = OutputDir::create(&cfg.out_dir)?;
    write_discovery(&mut out, &discovery)?;
    write_trained(&mut out, &trained)?;
    write_evaluation(&mut out, &evaluation)?;
    out.write(
        STAGE_COUNTS_FILE,
        &report::stage_counts_csv(&discovery.stage_counts(cfg)),
    )?;
    let manifest = Manifest {
        config_sha256: config_digest(cfg),
        outputs: out.digests().clone(),
    };
    out.write(MANIFEST_FILE, &formats::to_json(&manifest))?;
    Ok(RunOutcome {
        discovery,
        trained,
        evaluation,
        manifest,
    })
}

fn write_discovery(out: &mut OutputDir, d: &Discovery) -> Result<()> {
    out.write(CLEAN_FILE, &formats::corpus_jsonl(d.corpus.records()))?;
    out.write(EXTRACTION_FILE, &formats::to_json(&d.extraction))?;
    out.write(COMPLETION_FILE, &formats::to_json(&d.completion))?;
    out.write(GROUPS_FILE, &formats::to_json(&d.groups))?;
    write_prune(out, d)?;
    out.write(LEXICON_FILE, &formats::to_json(&d.lexicon))?;
    out.write(MATRIX_FILE, &formats::matrix_csv(&d.matrix))
}

fn write_prune(out: &mut OutputDir, d: &Discovery) -> Result<()> {
    out.write(PRUNE_FILE, &formats::to_json(&d.prune))?;
    out.write(
        PRUNE_CURVE_FILE,
        &report::prune_curve_csv(&d.prune, &d.groups, &d.completion),
    )
}

fn write_trained(out: &mut OutputDir, t: &Trained) -> Result<()> {
    out.write(MODEL_FILE, &formats::to_json(&t.checkpoint))?;
    out.write(CLASSIFIERS_FILE, &formats::to_json(&t.classifiers))?;
    out.write(SPLIT_FILE, &formats::to_json(&t.split))
}

fn write_evaluation(out: &mut OutputDir, e: &Evaluation) -> Result<()> {
    out.write(METRICS_FILE, &report::metrics_csv(&e.metrics))?;
    out.write(
        EXPLANATIONS_FILE,
        &report::explanations_csv(&e.explanations),
    )
}

/// One pipeline stage, reading its inputs from `out_dir`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Clean,
    Extract,
    Complete,
    Group,
    Prune,
    Vectorize,
    Train,
    Evaluate,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Clean => "clean",
            Stage::Extract => "extract",
            Stage::Complete => "complete",
            Stage::Group => "group",
            Stage::Prune => "prune",
            Stage::Vectorize => "vectorize",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
        }
    }
}

fn load<T: serde::de::DeserializeOwned>(out: &OutputDir, name: &str) -> Result<T> {
    formats::read_json(&out.path(name))
}

/// Runs `stage` alone against the artifacts of earlier stages in `cfg.out_dir`.
pub fn run_stage(cfg: &RunConfig, stage: Stage) -> Result<()> {
    let mut out = OutputDir::create(&cfg.out_dir)?;
    let clean = |out: &OutputDir| pipeline::load_clean(cfg, &out.path(CLEAN_FILE));
    let result = (|| -> Result<()> {
        match stage {
            Stage::Clean => {
                let corpus = pipeline::clean(cfg)?;
                out.write(CLEAN_FILE, &formats::corpus_jsonl(corpus.records()))
            }
            Stage::Extract => {
                let extraction = pipeline::extract(cfg, &clean(&out)?)?;
                out.write(EXTRACTION_FILE, &formats::to_json(&extraction))
            }
            Stage::Complete => {
                let extraction: Extraction = load(&out, EXTRACTION_FILE)?;
                let completion = pipeline::completion(cfg, &clean(&out)?, &extraction)?;
                out.write(COMPLETION_FILE, &formats::to_json(&completion))
            }
            Stage::Group => {
                let completion: Completion = load(&out, COMPLETION_FILE)?;
                let groups = pipeline::group(cfg, &completion)?;
                out.write(GROUPS_FILE, &formats::to_json(&groups))
            }
            Stage::Prune => {
                let completion: Completion = load(&out, COMPLETION_FILE)?;
                let groups: Vec<ConceptGroup> = load(&out, GROUPS_FILE)?;
                let prune = pipeline::prune(cfg, &completion, &groups, cfg.gamma)?;
                out.write(PRUNE_FILE, &formats::to_json(&prune))?;
                out.write(
                    PRUNE_CURVE_FILE,
                    &report::prune_curve_csv(&prune, &groups, &completion),
                )
            }
            Stage::Vectorize => {
                let completion: Completion = load(&out, COMPLETION_FILE)?;
                let groups: Vec<ConceptGroup> = load(&out, GROUPS_FILE)?;
                let prune: PruneResult = load(&out, PRUNE_FILE)?;
                let (lexicon, matrix) = pipeline::vectorize_stage(
                    cfg,
                    &clean(&out)?,
                    &completion,
                    &groups,
                    &prune.selected,
                )?;
                out.write(LEXICON_FILE, &formats::to_json(&lexicon))?;
                out.write(MATRIX_FILE, &formats::matrix_csv(&matrix))
            }
            Stage::Train => {
                let corpus = clean(&out)?;
                let lexicon = formats::read_lexicon(&out.path(LEXICON_FILE))?;
                let matrix = formats::read_matrix(&out.path(MATRIX_FILE), &lexicon)?;
                let data = pipeline::dataset(&corpus, &matrix, pipeline::features(cfg, &matrix)?)?;
                let trained = pipeline::train(cfg, &corpus, &lexicon, &data)?;
                write_trained(&mut out, &trained)
            }
            Stage::Evaluate => {
                let corpus = clean(&out)?;
                let lexicon = formats::read_lexicon(&out.path(LEXICON_FILE))?;
                let matrix = formats::read_matrix(&out.path(MATRIX_FILE), &lexicon)?;
                let data = pipeline::dataset(&corpus, &matrix, pipeline::features(cfg, &matrix)?)?;
                let trained = Trained {
                    checkpoint: load::<Checkpoint>(&out, MODEL_FILE)?,
                    classifiers: load::<Classifiers>(&out, CLASSIFIERS_FILE)?,
                    split: load::<Split>(&out, SPLIT_FILE)?,
                    history: Vec::new(),
                };
                let evaluation = pipeline::evaluate(&corpus, &data, &trained)?;
                write_evaluation(&mut out, &evaluation)
            }
        }
    })();
    result.stage(stage.name())
}

/// Prunes, trains and evaluates once per gamma over shared upstream stages; writes
/// `sweep.csv`. Accuracy is the bottleneck model's.
pub fn sweep(cfg: &RunConfig, gammas: &[f64]) -> Result<Vec<SweepRow>> {
    if gammas.is_empty() {
        return Err(Error::Config("sweep needs at least one gamma".into()));
    }
    let up = upstream(cfg)?;
    let mut rows = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let mut g_cfg = cfg.clone();
        g_cfg.gamma = gamma;
        g_cfg.validate()?;
        let d = downstream(&g_cfg, up.clone(), gamma)?;
        let (_, evaluation) = train_and_evaluate(&g_cfg, &d)?;
        rows.push(SweepRow {
            gamma,
            k: d.lexicon.len(),
            mi_selected: d.prune.mi_selected,
            mi_full: d.prune.mi_full,
            accuracy: evaluation.metrics[0].metrics.accuracy,
        });
    }
    let mut out = OutputDir::create(&cfg.out_dir)?;
    out.write(SWEEP_FILE, &report::sweep_csv(&rows))?;
    Ok(rows)
}

/// Reads the manifest of a finished run.
pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    formats::read_json(&dir.join(MANIFEST_FILE))
}
