//! Fragment embeddings: a lookup table filled from an external encoder, or a
//! deterministic character-trigram hash.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub const DEFAULT_DIM: usize = 768;
pub const DEFAULT_HASH_SEED: u64 = 0x5eed_c0de_1234_abcd;

/// A finite real vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(Vec<f64>);

impl Embedding {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("embedding has non-finite entries".into()));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|v| v * v).sum())
    }
}

pub trait Embedder {
    fn dim(&self) -> usize;
    fn embed(&self, fragment: &str) -> Result<Embedding>;
}

/// Signed feature hashing of character trigrams of `^fragment$`, L2-normalized.
#[derive(Debug, Clone, Copy)]
pub struct HashEmbedder {
    pub dim: usize,
    pub seed: u64,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        Self {
            dim: DEFAULT_DIM,
            seed: DEFAULT_HASH_SEED,
        }
    }
}

fn fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    // final avalanche so that the low bits used for bucketing are well mixed
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    h
}

impl Embedder for HashEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, fragment: &str) -> Result<Embedding> {
        if fragment.is_empty() {
            return Err(Error::Domain("cannot embed an empty fragment".into()));
        }
        if self.dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        let chars: Vec<char> = core::iter::once('^')
            .chain(fragment.chars())
            .chain(core::iter::once('$'))
            .collect();
        let mut v = vec![0.0; self.dim];
        let mut buf = [0u8; 12];
        for w in chars.windows(3) {
            let mut len = 0;
            for c in w {
                len += c.encode_utf8(&mut buf[len..]).len();
            }
            let h = fnv1a(self.seed, &buf[..len]);
            let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
            v[(h % self.dim as u64) as usize] += sign;
        }
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm == 0.0 {
            // every trigram cancelled; fall back to a fixed unit bucket
            v[(fnv1a(self.seed, fragment.as_bytes()) % self.dim as u64) as usize] = 1.0;
        } else {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        Embedding::new(v)
    }
}

/// Precomputed vectors keyed by normalized fragment.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: Option<usize>,
    vectors: BTreeMap<String, Embedding>,
}

impl EmbeddingTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, text: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let dim = *self.dim.get_or_insert(values.len());
        if values.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: values.len(),
            });
        }
        self.vectors.insert(text.into(), Embedding::new(values)?);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl Embedder for EmbeddingTable {
    fn dim(&self) -> usize {
        self.dim.unwrap_or(0)
    }

    fn embed(&self, fragment: &str) -> Result<Embedding> {
        self.vectors
            .get(fragment)
            .cloned()
            .ok_or_else(|| Error::EmbeddingMissing(fragment.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouping::distance::{d_text, TextMetric};

    #[test]
    fn hash_embedding_is_deterministic_unit_norm() {
        let e = HashEmbedder::default();
        let a = e.embed("abc").unwrap();
        assert_eq!(a, e.embed("abc").unwrap());
        assert_eq!(a.dim(), DEFAULT_DIM);
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn similar_fragments_are_close_but_distinct() {
        let e = HashEmbedder::default();
        let a = e.embed("the batter did not swing").unwrap();
        let b = e.embed("the hitter didn't swing").unwrap();
        let d = d_text(&a, &b, TextMetric::Cosine).unwrap();
        assert!(d > 0.0 && d < 1.0, "{d}");
        // frozen with the default seed
        assert!((d - 0.331_846_895_218_938_8).abs() < 1e-12, "{d}");
    }

    #[test]
    fn table_lookup() {
        let mut t = EmbeddingTable::new();
        t.insert("a b", vec![1.0, 0.0]).unwrap();
        assert_eq!(t.embed("a b").unwrap().as_slice(), &[1.0, 0.0]);
        assert_eq!(
            t.embed("zzz").unwrap_err(),
            Error::EmbeddingMissing("zzz".into())
        );
        assert_eq!(
            t.insert("c", vec![1.0]).unwrap_err(),
            Error::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
        assert!(t.insert("d", vec![f64::NAN, 0.0]).is_err());
    }
}
