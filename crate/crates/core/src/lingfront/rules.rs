//! Inclusion and exclusion rules for candidate concepts.
//!
//! A fragment is anchored at its first noun or pronoun. Only determiners, adjectives and
//! numerals may precede the anchor, and a run of nouns directly after it is part of the
//! anchor (`the strike zone`). Then:
//!
//! * `Include2`: anchor, an auxiliary whose lemma is `be`, at least one more token.
//! * `Include1`: anchor, optional auxiliary, optional particle, at least one more token.
//! * `Excluded`: any subordinating conjunction anywhere in the fragment.

use super::tokenize::{Token, Upos};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleMatch {
    Include1,
    Include2,
    Excluded,
    None,
}

impl RuleMatch {
    pub fn is_included(self) -> bool {
        matches!(self, RuleMatch::Include1 | RuleMatch::Include2)
    }
}

pub fn match_rules(fragment: &[Token]) -> RuleMatch {
    if fragment.iter().any(|t| t.upos == Upos::Sconj) {
        return RuleMatch::Excluded;
    }
    let mut i = 0;
    while i < fragment.len() && matches!(fragment[i].upos, Upos::Det | Upos::Adj | Upos::Num) {
        i += 1;
    }
    if i >= fragment.len() || !fragment[i].upos.is_nominal() {
        return RuleMatch::None;
    }
    i += 1;
    while i < fragment.len() && matches!(fragment[i].upos, Upos::Noun | Upos::Propn) {
        i += 1;
    }
    let after_anchor = i;

    if after_anchor < fragment.len()
        && fragment[after_anchor].upos == Upos::Aux
        && fragment[after_anchor].lemma == "be"
        && after_anchor + 1 < fragment.len()
    {
        return RuleMatch::Include2;
    }

    let mut j = after_anchor;
    if j < fragment.len() && fragment[j].upos == Upos::Aux {
        j += 1;
    }
    if j < fragment.len() && fragment[j].upos == Upos::Part {
        j += 1;
    }
    if j < fragment.len() {
        RuleMatch::Include1
    } else {
        RuleMatch::None
    }
}
