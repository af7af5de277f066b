//! Text normalization and containment tests shared by completion and vectorization.

use alloc::string::String;

/// How a concept's normalized text is looked up inside an explanation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MatchMode {
    /// Plain substring search.
    Substring,
    /// Substring search where the match must not start or end inside a word.
    #[default]
    TokenBoundary,
}

const TERMINAL_PUNCT: &[char] = &['.', '!', '?', ',', ';', ':'];

/// Lowercase, collapse whitespace runs to one space, strip terminal punctuation.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        for c in word.chars() {
            out.extend(c.to_lowercase());
        }
    }
    loop {
        let trimmed = out.trim_end_matches(TERMINAL_PUNCT).trim_end();
        if trimmed.len() == out.len() {
            break;
        }
        out.truncate(trimmed.len());
    }
    out
}

/// True when `needle` occurs in `haystack`; both are expected to be normalized.
pub fn contains(haystack: &str, needle: &str, mode: MatchMode) -> bool {
    find(haystack, needle, mode).is_some()
}

/// Byte offset of the first admissible occurrence of `needle` in `haystack`.
pub fn find(haystack: &str, needle: &str, mode: MatchMode) -> Option<usize> {
    if needle.is_empty() {
        return None;
    }
    match mode {
        MatchMode::Substring => haystack.find(needle),
        MatchMode::TokenBoundary => haystack
            .match_indices(needle)
            .map(|(start, _)| start)
            .find(|&start| at_boundary(haystack, start, start + needle.len())),
    }
}

fn at_boundary(haystack: &str, start: usize, end: usize) -> bool {
    let before = haystack[..start].chars().next_back();
    let after = haystack[end..].chars().next();
    let first = haystack[start..end].chars().next();
    let last = haystack[start..end].chars().next_back();
    let left_ok = match (before, first) {
        (Some(b), Some(f)) => !(b.is_alphanumeric() && f.is_alphanumeric()),
        _ => true,
    };
    let right_ok = match (last, after) {
        (Some(l), Some(a)) => !(l.is_alphanumeric() && a.is_alphanumeric()),
        _ => true,
    };
    left_ok && right_ok
}
