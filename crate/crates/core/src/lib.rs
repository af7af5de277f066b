//! Concept discovery from labelled free-text explanations, and concept-bottleneck
//! classifiers trained on the resulting binary concept matrix.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration and the
//! command line live in the `conceptmine` crate.
//!
//! Pipeline, in order:
//!
//! 1. [`corpus`]: merge annotator explanations and drop null-labelled records.
//! 2. [`lingfront`]: tokenize, parse, and extract raw concept fragments.
//! 3. [`conceptstats`]: credit every raw concept to every explanation containing it.
//! 4. [`grouping`]: cluster near-duplicate concepts under the text + label meta-distance.
//! 5. [`pruning`]: greedy mutual-information selection of a compact concept subset.
//! 6. [`vectorize`]: build the lexicon and the binary concept matrix.
//!
//! [`model`] holds the bottleneck network, concept-only classifiers, training and metrics.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod conceptstats;
pub mod corpus;
mod error;
pub mod grouping;
pub mod lingfront;
pub mod model;
pub mod pruning;
pub mod text;
pub mod vectorize;

pub use error::{Error, Result};
