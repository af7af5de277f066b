//! Completion: corpus-wide lookup of raw concepts and their per-label counts.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::ExplanationCorpus;
use crate::lingfront::Extraction;
use crate::text::{find, normalize, MatchMode};
use crate::Result;

/// Position of a first occurrence: record position in the corpus, then byte offset
/// in that record's normalized explanation.
pub type FirstSeen = (usize, usize);

/// A raw concept with presence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RawConcept {
    pub index: usize,
    pub norm: String,
    /// Most common original-casing surface form.
    pub display: String,
    /// Number of explanations containing the concept.
    pub count: u32,
    /// `count` split by label index; sums to `count`.
    pub label_counts: Vec<u32>,
    /// Number of explanations it was extracted from, before completion.
    pub extracted_count: u32,
    pub first_seen: FirstSeen,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Completion {
    pub concepts: Vec<RawConcept>,
    /// For each record (corpus order), the sorted indices of concepts it contains.
    pub containment: Vec<Vec<usize>>,
    /// Label index of each record (corpus order).
    pub record_labels: Vec<usize>,
    pub match_mode: MatchMode,
}

impl Completion {
    /// Total (record, concept) containment pairs.
    pub fn occurrences(&self) -> usize {
        self.containment.iter().map(Vec::len).sum()
    }
}

/// Credits every raw concept to every explanation whose normalized text contains it.
///
/// A record always contains the concepts extracted from it, so counts never fall below
/// extraction counts.
pub fn complete(
    corpus: &ExplanationCorpus,
    extraction: &Extraction,
    mode: MatchMode,
) -> Result<Completion> {
    let labels = corpus.label_indices()?;
    let num_labels = corpus.labels().len();
    let norms: Vec<String> = corpus
        .records()
        .iter()
        .map(|r| normalize(&r.explanation))
        .collect();
    let index_of: BTreeMap<&str, usize> = extraction
        .concepts
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let position_of: BTreeMap<u64, usize> = corpus
        .records()
        .iter()
        .enumerate()
        .map(|(p, r)| (r.id, p))
        .collect();

    let mut extracted: Vec<Vec<bool>> = vec![vec![false; extraction.concepts.len()]; corpus.len()];
    let mut surfaces: Vec<BTreeMap<&str, u32>> = vec![BTreeMap::new(); extraction.concepts.len()];
    let mut surface_order: Vec<Vec<&str>> = vec![Vec::new(); extraction.concepts.len()];
    for occ in &extraction.occurrences {
        let (Some(&c), Some(&p)) = (
            index_of.get(occ.norm.as_str()),
            position_of.get(&occ.record_id),
        ) else {
            continue;
        };
        extracted[p][c] = true;
        let counter = surfaces[c].entry(occ.fragment.as_str()).or_insert(0);
        if *counter == 0 {
            surface_order[c].push(occ.fragment.as_str());
        }
        *counter += 1;
    }

    let mut containment = vec![Vec::new(); corpus.len()];
    let mut concepts = Vec::with_capacity(extraction.concepts.len());
    for (c, norm) in extraction.concepts.iter().enumerate() {
        let mut label_counts = vec![0u32; num_labels];
        let mut first_seen: Option<FirstSeen> = None;
        let mut extracted_count = 0;
        for (p, text) in norms.iter().enumerate() {
            let hit = find(text, norm, mode).or_else(|| {
                // extracted here but rejected by boundary matching
                extracted[p][c].then(|| text.find(norm.as_str()).unwrap_or(0))
            });
            if extracted[p][c] {
                extracted_count += 1;
            }
            if let Some(offset) = hit {
                label_counts[labels[p]] += 1;
                containment[p].push(c);
                if first_seen.is_none() {
                    first_seen = Some((p, offset));
                }
            }
        }
        let display = surface_order[c]
            .iter()
            .copied()
            .max_by(|a, b| {
                surfaces[c][a]
                    .cmp(&surfaces[c][b])
                    // earlier first appearance wins ties
                    .then_with(|| {
                        let pa = surface_order[c].iter().position(|s| s == a);
                        let pb = surface_order[c].iter().position(|s| s == b);
                        pb.cmp(&pa)
                    })
            })
            .map(String::from)
            .unwrap_or_else(|| norm.clone());
        concepts.push(RawConcept {
            index: c,
            norm: norm.clone(),
            display,
            count: label_counts.iter().sum(),
            label_counts,
            extracted_count,
            first_seen: first_seen.unwrap_or((usize::MAX, usize::MAX)),
        });
    }
    Ok(Completion {
        concepts,
        containment,
        record_labels: labels,
        match_mode: mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{default_null_labels, ExplanationRecord};
    use crate::lingfront::RawConceptOccurrence;
    use alloc::string::ToString;

    fn occ(id: u64, frag: &str) -> RawConceptOccurrence {
        RawConceptOccurrence {
            record_id: id,
            fragment: frag.to_string(),
            norm: normalize(frag),
            offset: 0,
        }
    }

    fn a1() -> (ExplanationCorpus, Extraction) {
        let corpus = ExplanationCorpus::new(
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
        .unwrap();
        let occurrences = vec![
            occ(1, "The batter did not swing"),
            occ(1, "The ball was in the strike zone"),
            occ(2, "the ball into the stands"),
            occ(2, "it landed in foul territory"),
            occ(3, "The hitter didn't swing"),
            occ(3, "The ball was outside the strike zone"),
            occ(5, "the batter hit the ball"),
            occ(5, "it was caught by the fielder"),
        ];
        let concepts = occurrences.iter().map(|o| o.norm.clone()).collect();
        (
            corpus,
            Extraction {
                concepts,
                occurrences,
            },
        )
    }

    #[test]
    fn completion_finds_batter_hit_the_ball_in_foul_record() {
        let (corpus, ex) = a1();
        for mode in [MatchMode::Substring, MatchMode::TokenBoundary] {
            let done = complete(&corpus, &ex, mode).unwrap();
            assert_eq!(done.concepts.len(), 8);
            assert_eq!(done.occurrences(), 9);
            let hit = &done.concepts[6];
            assert_eq!(hit.norm, "the batter hit the ball");
            assert_eq!(hit.count, 2);
            assert_eq!(hit.extracted_count, 1);
            assert!(done.containment[1].contains(&6));
            assert_eq!(hit.first_seen, (1, 0));
        }
    }

    #[test]
    fn label_counts_match_hand_count() {
        let (corpus, ex) = a1();
        let done = complete(&corpus, &ex, MatchMode::TokenBoundary).unwrap();
        // labels: ball, foul, out, strike
        let swing = &done.concepts[0];
        assert_eq!(swing.label_counts, vec![0, 0, 0, 1]);
        assert_eq!(swing.count, 1);
        assert_eq!(swing.display, "The batter did not swing");
        for c in &done.concepts {
            assert_eq!(c.label_counts.iter().sum::<u32>(), c.count);
            assert!(c.count >= c.extracted_count);
        }
    }

    #[test]
    fn presence_not_frequency() {
        let corpus = ExplanationCorpus::new(
            vec![ExplanationRecord::new(
                1,
                "ball",
                "the ball was low and the ball was low",
            )],
            default_null_labels(),
        )
        .unwrap();
        let ex = Extraction {
            concepts: vec!["the ball was low".into()],
            occurrences: vec![occ(1, "the ball was low")],
        };
        let done = complete(&corpus, &ex, MatchMode::TokenBoundary).unwrap();
        assert_eq!(done.concepts[0].count, 1);
    }
}
