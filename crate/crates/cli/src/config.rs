//! Flat TOML run configuration. Keys are listed in `docs/config.md`.

use std::path::{Path, PathBuf};

use conceptmine_core::grouping::{Linkage, MetaDistanceParams, TextMetric};
use conceptmine_core::model::TrainConfig;
use conceptmine_core::text::MatchMode;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub parses: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub out_dir: PathBuf,

    pub null_labels: Vec<String>,
    pub merge_annotators: bool,
    pub matching: MatchMode,
    pub lambda: f64,
    pub alpha: f64,
    pub text_metric: TextMetric,
    pub linkage: Linkage,
    pub cut_threshold: f64,
    pub min_count: u32,
    pub gamma: f64,
    pub embedding_dim: usize,

    pub feature_dim: usize,
    pub hidden: usize,
    pub attention_dim: usize,
    pub beta: f64,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub mlp_hidden: usize,
    pub eval_fraction: f64,
    pub seed: u64,

    pub word_level: bool,
    pub skip_grouping: bool,
    pub skip_pruning: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            parses: None,
            embeddings: None,
            features: None,
            out_dir: PathBuf::from("out"),
            null_labels: vec!["none".into()],
            merge_annotators: false,
            matching: MatchMode::TokenBoundary,
            lambda: 1.0,
            alpha: 1.0,
            text_metric: TextMetric::Cosine,
            linkage: Linkage::Average,
            cut_threshold: 0.45,
            min_count: 3,
            gamma: 0.9,
            embedding_dim: conceptmine_core::grouping::DEFAULT_DIM,
            feature_dim: 64,
            hidden: 32,
            attention_dim: 16,
            beta: 1.0,
            lr: 1e-3,
            epochs: 100,
            batch_size: 32,
            mlp_hidden: 16,
            eval_fraction: 0.2,
            seed: 0,
            word_level: false,
            skip_grouping: false,
            skip_pruning: false,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub word_level: bool,
    pub skip_grouping: bool,
    pub skip_pruning: bool,
    pub gamma: Option<f64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| Error::format(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.corpus,
            &mut self.parses,
            &mut self.embeddings,
            &mut self.features,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        fix(&mut self.out_dir);
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(out) = &o.out_dir {
            self.out_dir = out.clone();
        }
        self.word_level |= o.word_level;
        self.skip_grouping |= o.skip_grouping;
        self.skip_pruning |= o.skip_pruning;
        if let Some(g) = o.gamma {
            self.gamma = g;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.meta_params().validate()?;
        if self.cut_threshold.is_nan() {
            return bad("cut_threshold is NaN".into());
        }
        if self.min_count < 1 {
            return bad("min_count must be at least 1".into());
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad(format!("gamma must lie in (0, 1], got {}", self.gamma));
        }
        if !(0.0..1.0).contains(&self.eval_fraction) {
            return bad(format!(
                "eval_fraction must lie in [0, 1), got {}",
                self.eval_fraction
            ));
        }
        for (name, v) in [
            ("embedding_dim", self.embedding_dim),
            ("feature_dim", self.feature_dim),
            ("hidden", self.hidden),
            ("attention_dim", self.attention_dim),
            ("batch_size", self.batch_size),
            ("mlp_hidden", self.mlp_hidden),
        ] {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad(format!("lr must be positive, got {}", self.lr));
        }
        Ok(())
    }

    pub fn meta_params(&self) -> MetaDistanceParams {
        MetaDistanceParams {
            lambda: self.lambda,
            alpha: self.alpha,
            text_metric: self.text_metric,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            lr: self.lr,
            batch_size: self.batch_size,
            seed: self.seed,
        }
    }

    pub fn corpus_path(&self) -> Result<&Path> {
        self.corpus
            .as_deref()
            .ok_or_else(|| Error::Config("no corpus path configured".into()))
    }

    /// Canonical JSON of the resolved configuration; hashed into the manifest.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("gama = 0.5").is_err());
        let cfg: RunConfig = toml::from_str("gamma = 0.5\nlinkage = \"single\"").unwrap();
        assert_eq!(cfg.gamma, 0.5);
        assert_eq!(cfg.linkage, Linkage::Single);
        assert_eq!(cfg.min_count, 3);
    }

    #[test]
    fn overrides_and_validation() {
        let mut cfg = RunConfig::default();
        cfg.apply(&Overrides {
            gamma: Some(1.0),
            skip_pruning: true,
            ..Default::default()
        })
        .unwrap();
        assert!(cfg.skip_pruning);
        assert!(cfg
            .apply(&Overrides {
                gamma: Some(0.0),
                ..Default::default()
            })
            .is_err());
        let cfg = RunConfig {
            min_count: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let mut cfg = RunConfig {
            corpus: Some("c.jsonl".into()),
            ..Default::default()
        };
        cfg.resolve_paths(Path::new("/data/run"));
        assert_eq!(cfg.corpus.unwrap(), PathBuf::from("/data/run/c.jsonl"));
        assert_eq!(cfg.out_dir, PathBuf::from("/data/run/out"));
    }
}
