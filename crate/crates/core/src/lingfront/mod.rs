//! Tokenization, constituent trees and raw concept extraction.

mod extract;
mod rules;
mod tokenize;
mod tree;

pub use extract::{
    accepted_spans, extract_raw_concepts, Extraction, ExtractionMode, FallbackParser, ParseSource,
    ParseTable, ParsedSentence, RawConceptOccurrence, STOPWORDS,
};
pub use rules::{match_rules, RuleMatch};
pub use tokenize::{tokenize, Token, Upos};
pub use tree::{fallback_parse, ConstituentNode};
