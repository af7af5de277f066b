//! Raw concept extraction over constituent trees.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::rules::match_rules;
use super::tokenize::{tokenize, Token, Upos};
use super::tree::{fallback_parse, ConstituentNode};
use crate::corpus::{ExplanationCorpus, ExplanationRecord};
use crate::text::normalize;
use crate::{Error, Result};

/// A tokenized sentence with its constituent tree.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParsedSentence {
    pub tokens: Vec<Token>,
    pub root: ConstituentNode,
}

/// Supplies parsed sentences for a record.
pub trait ParseSource {
    fn sentences(&self, record: &ExplanationRecord) -> Result<Vec<ParsedSentence>>;
}

/// Built-in tokenizer plus the two-level clause chunker.
#[derive(Debug, Clone, Copy, Default)]
pub struct FallbackParser;

impl ParseSource for FallbackParser {
    fn sentences(&self, record: &ExplanationRecord) -> Result<Vec<ParsedSentence>> {
        tokenize(&record.explanation)
            .into_iter()
            .map(|tokens| {
                let root = fallback_parse(&tokens)?;
                Ok(ParsedSentence { tokens, root })
            })
            .collect()
    }
}

/// Parses supplied by an external parser, keyed by record id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseTable {
    records: BTreeMap<u64, Vec<ParsedSentence>>,
}

impl ParseTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the sentences of one record after validating every tree against its tokens.
    pub fn insert(&mut self, id: u64, sentences: Vec<ParsedSentence>) -> Result<()> {
        for (i, s) in sentences.iter().enumerate() {
            if s.tokens.is_empty() {
                return Err(Error::InvalidTree(alloc::format!(
                    "record {id} sentence {i} has no tokens"
                )));
            }
            s.root.validate(s.tokens.len()).map_err(|e| match e {
                Error::InvalidTree(m) => {
                    Error::InvalidTree(alloc::format!("record {id} sentence {i}: {m}"))
                }
                other => other,
            })?;
        }
        if self.records.insert(id, sentences).is_some() {
            return Err(Error::DuplicateId(id));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl ParseSource for ParseTable {
    fn sentences(&self, record: &ExplanationRecord) -> Result<Vec<ParsedSentence>> {
        let mut sentences = self
            .records
            .get(&record.id)
            .cloned()
            .ok_or(Error::ParseLookup {
                record: record.id,
                sentence: 0,
            })?;
        align_spans(&record.explanation, &mut sentences);
        Ok(sentences)
    }
}

/// Fills missing token spans by locating token texts left to right in `text`.
fn align_spans(text: &str, sentences: &mut [ParsedSentence]) {
    let lower = text.to_lowercase();
    let same_len = lower.len() == text.len();
    let mut cursor = 0;
    for tok in sentences.iter_mut().flat_map(|s| s.tokens.iter_mut()) {
        if let Some((_, end)) = tok.span {
            cursor = end;
            continue;
        }
        let found = text[cursor..].find(tok.text.as_str()).or_else(|| {
            same_len
                .then(|| lower[cursor..].find(tok.text.to_lowercase().as_str()))
                .flatten()
        });
        if let Some(off) = found {
            let start = cursor + off;
            let end = start + tok.text.len();
            // refuse matches that skip over other words
            if text[cursor..start].chars().all(|c| !c.is_alphanumeric()) {
                tok.span = Some((start, end));
                cursor = end;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ExtractionMode {
    /// Constituents filtered by the inclusion and exclusion rules.
    #[default]
    Rules,
    /// Every non-stopword token is a fragment (ablation baseline).
    WordLevel,
}

/// One extracted fragment in one record.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RawConceptOccurrence {
    pub record_id: u64,
    /// Fragment in its original casing.
    pub fragment: String,
    pub norm: String,
    /// Byte offset of the fragment in the explanation.
    pub offset: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Extraction {
    /// Distinct norms, in order of first occurrence.
    pub concepts: Vec<String>,
    pub occurrences: Vec<RawConceptOccurrence>,
}

pub const STOPWORDS: &[&str] = &[
    "a", "an", "the", "and", "or", "but", "if", "because", "as", "of", "at", "by", "for", "with",
    "about", "into", "onto", "to", "from", "in", "on", "off", "out", "over", "under", "up", "down",
    "is", "am", "are", "was", "were", "be", "been", "being", "do", "does", "did", "have", "has",
    "had", "it", "its", "this", "that", "these", "those", "i", "you", "he", "she", "we", "they",
    "me", "him", "her", "us", "them", "my", "your", "his", "our", "their", "not", "n't", "no",
    "so", "than", "too", "very", "can", "could", "will", "would", "should", "'s", "then", "there",
];

pub fn extract_raw_concepts(
    corpus: &ExplanationCorpus,
    source: &dyn ParseSource,
    mode: ExtractionMode,
) -> Result<Extraction> {
    let mut out = Extraction::default();
    let mut known = BTreeSet::new();
    for record in corpus.records() {
        let sentences = match mode {
            ExtractionMode::Rules => source.sentences(record)?,
            ExtractionMode::WordLevel => FallbackParser.sentences(record)?,
        };
        let mut seen = BTreeSet::new();
        for sentence in &sentences {
            let spans = match mode {
                ExtractionMode::Rules => accepted_spans(sentence),
                ExtractionMode::WordLevel => word_spans(&sentence.tokens),
            };
            for (s, e) in spans {
                let (fragment, offset) = fragment_text(&record.explanation, &sentence.tokens[s..e]);
                let norm = normalize(&fragment);
                if norm.is_empty() || !seen.insert(norm.clone()) {
                    continue;
                }
                if known.insert(norm.clone()) {
                    out.concepts.push(norm.clone());
                }
                out.occurrences.push(RawConceptOccurrence {
                    record_id: record.id,
                    fragment,
                    norm,
                    offset,
                });
            }
        }
    }
    Ok(out)
}

/// Token spans of the outermost accepted constituents of a sentence.
pub fn accepted_spans(sentence: &ParsedSentence) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    visit(&sentence.root, &sentence.tokens, &mut out);
    out
}

fn visit(node: &ConstituentNode, tokens: &[Token], out: &mut Vec<(usize, usize)>) {
    let (s, e) = trim_punct(tokens, node.span);
    if s < e && !node.is_coordination(tokens) && match_rules(&tokens[s..e]).is_included() {
        out.push((s, e));
        return;
    }
    for child in &node.children {
        visit(child, tokens, out);
    }
}

fn trim_punct(tokens: &[Token], (mut s, mut e): (usize, usize)) -> (usize, usize) {
    while s < e && tokens[s].upos == Upos::Punct {
        s += 1;
    }
    while e > s && tokens[e - 1].upos == Upos::Punct {
        e -= 1;
    }
    (s, e)
}

fn word_spans(tokens: &[Token]) -> Vec<(usize, usize)> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| {
            t.upos != Upos::Punct
                && t.text.chars().any(char::is_alphanumeric)
                && !STOPWORDS.contains(&t.text.to_lowercase().replace('’', "'").as_str())
        })
        .map(|(i, _)| (i, i + 1))
        .collect()
}

fn fragment_text(explanation: &str, tokens: &[Token]) -> (String, usize) {
    match (
        tokens.first().and_then(|t| t.span),
        tokens.last().and_then(|t| t.span),
    ) {
        (Some((start, _)), Some((_, end))) if start < end && end <= explanation.len() => {
            (explanation[start..end].to_string(), start)
        }
        _ => {
            let joined = tokens
                .iter()
                .map(|t| t.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let offset = explanation.find(joined.as_str()).unwrap_or(0);
            (joined, offset)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::default_null_labels;
    use alloc::vec;

    fn corpus(texts: &[(u64, &str, &str)]) -> ExplanationCorpus {
        ExplanationCorpus::new(
            texts
                .iter()
                .map(|(i, l, e)| ExplanationRecord::new(*i, *l, *e))
                .collect(),
            default_null_labels(),
        )
        .unwrap()
    }

    #[test]
    fn fallback_extracts_clauses() {
        let c = corpus(&[
            (
                1,
                "strike",
                "The batter did not swing. The ball was in the strike zone.",
            ),
            (
                5,
                "out",
                "the batter hit the ball and it was caught by the fielder",
            ),
        ]);
        let ex = extract_raw_concepts(&c, &FallbackParser, ExtractionMode::Rules).unwrap();
        assert_eq!(
            ex.concepts,
            vec![
                "the batter did not swing",
                "the ball was in the strike zone",
                "the batter hit the ball",
                "it was caught by the fielder"
            ]
        );
        assert_eq!(ex.occurrences[0].fragment, "The batter did not swing");
        assert_eq!(ex.occurrences[1].offset, 26);
    }

    #[test]
    fn no_nominal_means_nothing() {
        let c = corpus(&[(1, "ball", "swung and missed badly")]);
        let ex = extract_raw_concepts(&c, &FallbackParser, ExtractionMode::Rules).unwrap();
        assert!(ex.concepts.is_empty());
    }

    #[test]
    fn duplicates_within_a_record_are_merged() {
        let c = corpus(&[(1, "ball", "The ball was low. the ball was low!")]);
        let ex = extract_raw_concepts(&c, &FallbackParser, ExtractionMode::Rules).unwrap();
        assert_eq!(ex.occurrences.len(), 1);
    }

    #[test]
    fn word_level_is_vocabulary_minus_stopwords() {
        let c = corpus(&[(1, "ball", "The hitter didn't swing at the ball.")]);
        let ex = extract_raw_concepts(&c, &FallbackParser, ExtractionMode::WordLevel).unwrap();
        assert_eq!(ex.concepts, vec!["hitter", "swing", "ball"]);
    }

    #[test]
    fn parse_table_lookup_and_alignment() {
        let record = ExplanationRecord::new(9, "foul", "The ball  went foul.");
        let tokens = vec![
            Token::new("The", "the", Upos::Det),
            Token::new("ball", "ball", Upos::Noun),
            Token::new("went", "go", Upos::Verb),
            Token::new("foul", "foul", Upos::Adj),
        ];
        let mut table = ParseTable::new();
        table
            .insert(
                9,
                vec![ParsedSentence {
                    tokens,
                    root: ConstituentNode::leaf(0, 4, "S"),
                }],
            )
            .unwrap();
        let c = ExplanationCorpus::new(vec![record.clone()], default_null_labels()).unwrap();
        let ex = extract_raw_concepts(&c, &table, ExtractionMode::Rules).unwrap();
        assert_eq!(ex.occurrences[0].fragment, "The ball  went foul");
        assert_eq!(ex.concepts, vec!["the ball went foul"]);

        let missing = ExplanationRecord::new(10, "foul", "x");
        assert_eq!(
            table.sentences(&missing).unwrap_err(),
            Error::ParseLookup {
                record: 10,
                sentence: 0
            }
        );
    }

    #[test]
    fn parse_table_rejects_bad_tree() {
        let mut table = ParseTable::new();
        let tokens = vec![
            Token::new("it", "it", Upos::Pron),
            Token::new("went", "go", Upos::Verb),
        ];
        let root = ConstituentNode {
            span: (0, 2),
            label: "S".into(),
            children: vec![ConstituentNode::leaf(1, 3, "VP")],
        };
        assert!(table
            .insert(1, vec![ParsedSentence { tokens, root }])
            .is_err());
    }
}
