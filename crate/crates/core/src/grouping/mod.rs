//! Grouping of near-duplicate raw concepts.

mod cluster;
mod distance;
mod embed;

pub use cluster::{
    agglomerate, build_groups, cluster, filter_rare, singleton_groups, ConceptGroup, Linkage,
};
pub use distance::{
    d_label, d_text, meta_distance, plugin_log_evidence, MetaDistanceParams, TextMetric,
};
pub use embed::{
    Embedder, Embedding, EmbeddingTable, HashEmbedder, DEFAULT_DIM, DEFAULT_HASH_SEED,
};
