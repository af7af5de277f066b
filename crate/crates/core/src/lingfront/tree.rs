//! Constituent trees and the built-in clause chunker.

use alloc::string::String;
use alloc::vec::Vec;

use super::tokenize::{Token, Upos};
use crate::{Error, Result};

/// A constituent covering tokens `[span.0, span.1)` of its sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstituentNode {
    pub span: (usize, usize),
    pub label: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub children: Vec<ConstituentNode>,
}

impl ConstituentNode {
    pub fn leaf(start: usize, end: usize, label: impl Into<String>) -> Self {
        Self {
            span: (start, end),
            label: label.into(),
            children: Vec::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn len(&self) -> usize {
        self.span.1 - self.span.0
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks that children are non-empty, ordered, disjoint and inside their parent,
    /// and that the root fits in a sentence of `sentence_len` tokens.
    pub fn validate(&self, sentence_len: usize) -> Result<()> {
        if self.span.1 > sentence_len {
            return Err(Error::InvalidTree(alloc::format!(
                "span {:?} exceeds sentence length {sentence_len}",
                self.span
            )));
        }
        self.validate_node()
    }

    fn validate_node(&self) -> Result<()> {
        let (start, end) = self.span;
        if start >= end {
            return Err(Error::InvalidTree(alloc::format!(
                "empty span {:?}",
                self.span
            )));
        }
        let mut cursor = start;
        for child in &self.children {
            let (cs, ce) = child.span;
            if cs < cursor || ce > end {
                return Err(Error::InvalidTree(alloc::format!(
                    "child span {:?} not ordered inside parent {:?}",
                    child.span,
                    self.span
                )));
            }
            child.validate_node()?;
            cursor = ce;
        }
        Ok(())
    }

    /// True when this node joins two or more conjuncts with a coordinating conjunction
    /// at its own top level (as a bare token or as a child consisting only of CCONJ).
    pub fn is_coordination(&self, tokens: &[Token]) -> bool {
        if self.children.len() < 2 {
            return false;
        }
        let first_end = self.children[0].span.1;
        let last_start = self.children[self.children.len() - 1].span.0;
        let all_cconj = |s: usize, e: usize| tokens[s..e].iter().all(|t| t.upos == Upos::Cconj);
        let uncovered_cconj = (first_end..last_start).any(|i| {
            tokens[i].upos == Upos::Cconj
                && !self.children.iter().any(|c| c.span.0 <= i && i < c.span.1)
        });
        uncovered_cconj
            || self.children[1..self.children.len() - 1]
                .iter()
                .any(|c| all_cconj(c.span.0, c.span.1))
    }
}

/// Two-level fallback parse: the root covers the sentence and its children are
/// clause-like chunks separated by punctuation, subordinating conjunctions, and
/// coordinating conjunctions that join two predicates.
///
/// Separators are left uncovered. A sentence that forms one chunk is returned as a leaf.
pub fn fallback_parse(tokens: &[Token]) -> Result<ConstituentNode> {
    if tokens.is_empty() {
        return Err(Error::InvalidTree("cannot parse an empty sentence".into()));
    }
    let n = tokens.len();
    // pieces between separators, with the separator that precedes each piece
    let mut pieces: Vec<(usize, usize, Option<Upos>)> = Vec::new();
    let mut start = 0;
    let mut pending: Option<Upos> = None;
    for (i, t) in tokens.iter().enumerate() {
        if matches!(t.upos, Upos::Punct | Upos::Sconj | Upos::Cconj) {
            if start < i {
                pieces.push((start, i, pending));
            }
            // a separator directly after another keeps the stronger break
            pending = match (pending, start < i) {
                (Some(p), false) if p != Upos::Cconj => Some(p),
                _ => Some(t.upos),
            };
            start = i + 1;
        }
    }
    if start < n {
        pieces.push((start, n, pending));
    }

    let has_predicate = |s: usize, e: usize| tokens[s..e].iter().any(|t| t.upos.is_predicate());
    let mut chunks: Vec<(usize, usize)> = Vec::new();
    for (s, e, sep) in pieces {
        match (sep, chunks.last_mut()) {
            (Some(Upos::Cconj), Some(last))
                if !(has_predicate(last.0, last.1) && has_predicate(s, e)) =>
            {
                last.1 = e;
            }
            _ => chunks.push((s, e)),
        }
    }

    if chunks.len() == 1 && chunks[0] == (0, n) {
        return Ok(ConstituentNode::leaf(0, n, "S"));
    }
    Ok(ConstituentNode {
        span: (0, n),
        label: "S".into(),
        children: chunks
            .into_iter()
            .map(|(s, e)| ConstituentNode::leaf(s, e, "CL"))
            .collect(),
    })
}
