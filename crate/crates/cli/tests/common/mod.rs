#![allow(dead_code)]

use std::path::{Path, PathBuf};

use conceptmine::config::RunConfig;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/a1")
        .join(name)
}

/// The shipped worked-example config, writing into `out`.
pub fn a1_config(out: &Path) -> RunConfig {
    let mut cfg = RunConfig::load(&fixture("config.toml")).unwrap();
    cfg.out_dir = out.to_path_buf();
    cfg
}

/// Worked-example corpus with the built-in chunker and hashed embeddings.
pub fn a1_fallback_config(out: &Path) -> RunConfig {
    let mut cfg = a1_config(out);
    cfg.parses = None;
    cfg.embeddings = None;
    cfg
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub const A1_FRAGMENTS: [&str; 8] = [
    "the batter did not swing",
    "the ball was in the strike zone",
    "the ball into the stands",
    "it landed in foul territory",
    "the hitter didn't swing",
    "the ball was outside the strike zone",
    "the batter hit the ball",
    "it was caught by the fielder",
];

pub const A1_ROWS: [[u8; 6]; 4] = [
    [1, 0, 1, 0, 0, 0],
    [0, 1, 0, 1, 0, 0],
    [1, 0, 0, 0, 1, 0],
    [0, 1, 0, 0, 0, 1],
];
