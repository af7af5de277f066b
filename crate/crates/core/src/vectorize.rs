//! Final concept lexicon and the binary record-by-concept matrix.

use alloc::string::String;
use alloc::vec::Vec;

use crate::conceptstats::Completion;
use crate::corpus::ExplanationCorpus;
use crate::grouping::ConceptGroup;
use crate::text::{contains, normalize, MatchMode};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LexiconEntry {
    pub k: usize,
    pub representative: String,
    /// Normalized member fragments.
    pub members: Vec<String>,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConceptLexicon {
    pub concepts: Vec<LexiconEntry>,
}

impl ConceptLexicon {
    /// Validates dense indices and unique representatives.
    pub fn new(concepts: Vec<LexiconEntry>) -> Result<Self> {
        for (i, e) in concepts.iter().enumerate() {
            if e.k != i {
                return Err(Error::Validation(alloc::format!(
                    "lexicon entry {i} has index {}",
                    e.k
                )));
            }
            if e.members.is_empty() {
                return Err(Error::Validation(alloc::format!(
                    "lexicon entry {i} has no members"
                )));
            }
            if concepts[..i]
                .iter()
                .any(|o| o.representative == e.representative)
            {
                return Err(Error::Validation(alloc::format!(
                    "duplicate representative {:?}",
                    e.representative
                )));
            }
        }
        Ok(Self { concepts })
    }

    /// Lexicon of the `selected` groups, kept in grouping order.
    pub fn from_groups(
        completion: &Completion,
        groups: &[ConceptGroup],
        selected: &[usize],
    ) -> Result<Self> {
        let mut keep: Vec<usize> = selected.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let entries = keep
            .iter()
            .enumerate()
            .map(|(k, &g)| {
                let group = groups.get(g).ok_or_else(|| {
                    Error::Validation(alloc::format!("selected group {g} does not exist"))
                })?;
                Ok(LexiconEntry {
                    k,
                    representative: completion.concepts[group.representative].display.clone(),
                    members: group
                        .members
                        .iter()
                        .map(|&m| completion.concepts[m].norm.clone())
                        .collect(),
                    count: group.count,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }
}

/// Binary presence matrix; row `n` belongs to record `ids[n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConceptMatrix {
    pub ids: Vec<u64>,
    pub rows: Vec<Vec<u8>>,
    pub num_concepts: usize,
}

impl ConceptMatrix {
    pub fn new(ids: Vec<u64>, rows: Vec<Vec<u8>>, num_concepts: usize) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::DimensionMismatch {
                expected: ids.len(),
                found: rows.len(),
            });
        }
        for row in &rows {
            if row.len() != num_concepts {
                return Err(Error::DimensionMismatch {
                    expected: num_concepts,
                    found: row.len(),
                });
            }
            if row.iter().any(|&b| b > 1) {
                return Err(Error::Validation(
                    "concept matrix entries must be 0 or 1".into(),
                ));
            }
        }
        Ok(Self {
            ids,
            rows,
            num_concepts,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows as `f64` feature vectors.
    pub fn as_f64(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&b| f64::from(b)).collect())
            .collect()
    }
}

/// `C[n][k] = 1` when record `n` contains any member of lexicon entry `k`.
pub fn vectorize(
    corpus: &ExplanationCorpus,
    lexicon: &ConceptLexicon,
    mode: MatchMode,
) -> ConceptMatrix {
    let rows = corpus
        .records()
        .iter()
        .map(|r| {
            let text = normalize(&r.explanation);
            lexicon
                .concepts
                .iter()
                .map(|e| u8::from(e.members.iter().any(|m| contains(&text, m, mode))))
                .collect()
        })
        .collect();
    ConceptMatrix {
        ids: corpus.records().iter().map(|r| r.id).collect(),
        rows,
        num_concepts: lexicon.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{default_null_labels, ExplanationRecord};
    use alloc::string::ToString;
    use alloc::vec;

    fn entry(k: usize, members: &[&str]) -> LexiconEntry {
        LexiconEntry {
            k,
            representative: members[0].to_string(),
            members: members.iter().map(|m| m.to_string()).collect(),
            count: 1,
        }
    }

    fn a1_corpus() -> ExplanationCorpus {
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
    fn six_concept_lexicon_rows() {
        let lexicon = ConceptLexicon::new(vec![
            entry(0, &["the batter did not swing", "the hitter didn't swing"]),
            entry(1, &["the batter hit the ball"]),
            entry(2, &["the ball was in the strike zone"]),
            entry(3, &["it landed in foul territory"]),
            entry(4, &["the ball was outside the strike zone"]),
            entry(5, &["it was caught by the fielder"]),
        ])
        .unwrap();
        let m = vectorize(&a1_corpus(), &lexicon, MatchMode::TokenBoundary);
        assert_eq!(
            m.rows,
            vec![
                vec![1, 0, 1, 0, 0, 0],
                vec![0, 1, 0, 1, 0, 0],
                vec![1, 0, 0, 0, 1, 0],
                vec![0, 1, 0, 0, 0, 1],
            ]
        );
        assert_eq!(m.ids, vec![1, 2, 3, 5]);
    }

    #[test]
    fn absent_and_identity_cases() {
        let corpus = ExplanationCorpus::new(
            vec![ExplanationRecord::new(1, "x", "Nothing here")],
            default_null_labels(),
        )
        .unwrap();
        let none = ConceptLexicon::new(vec![entry(0, &["the ball"])]).unwrap();
        assert_eq!(
            vectorize(&corpus, &none, MatchMode::Substring).rows,
            vec![vec![0]]
        );
        let whole = ConceptLexicon::new(vec![entry(0, &["nothing here"])]).unwrap();
        assert_eq!(
            vectorize(&corpus, &whole, MatchMode::TokenBoundary).rows,
            vec![vec![1]]
        );
    }

    #[test]
    fn lexicon_validation() {
        assert!(ConceptLexicon::new(vec![entry(1, &["a"])]).is_err());
        assert!(ConceptLexicon::new(vec![entry(0, &["a"]), entry(1, &["a"])]).is_err());
        assert!(ConceptMatrix::new(vec![1], vec![vec![2]], 1).is_err());
        assert!(ConceptMatrix::new(vec![1], vec![vec![1, 0]], 1).is_err());
    }
}
