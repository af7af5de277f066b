//! Rule-based sentence splitting, tokenization and UPOS tagging.
//!
//! Closed-class words are tagged from fixed lexicons; open-class words get NOUN, VERB,
//! ADJ, ADV or PROPN from suffix and left-context heuristics. Sentence-final `.`, `!` and
//! `?` delimit sentences and are not emitted as tokens.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::Error;

/// Universal part-of-speech tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Upos {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl Upos {
    pub const ALL: [Upos; 17] = [
        Upos::Adj,
        Upos::Adp,
        Upos::Adv,
        Upos::Aux,
        Upos::Cconj,
        Upos::Det,
        Upos::Intj,
        Upos::Noun,
        Upos::Num,
        Upos::Part,
        Upos::Pron,
        Upos::Propn,
        Upos::Punct,
        Upos::Sconj,
        Upos::Sym,
        Upos::Verb,
        Upos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Upos::Adj => "ADJ",
            Upos::Adp => "ADP",
            Upos::Adv => "ADV",
            Upos::Aux => "AUX",
            Upos::Cconj => "CCONJ",
            Upos::Det => "DET",
            Upos::Intj => "INTJ",
            Upos::Noun => "NOUN",
            Upos::Num => "NUM",
            Upos::Part => "PART",
            Upos::Pron => "PRON",
            Upos::Propn => "PROPN",
            Upos::Punct => "PUNCT",
            Upos::Sconj => "SCONJ",
            Upos::Sym => "SYM",
            Upos::Verb => "VERB",
            Upos::X => "X",
        }
    }

    /// Nouns, proper nouns and pronouns: the tags that can anchor a concept.
    pub fn is_nominal(self) -> bool {
        matches!(self, Upos::Noun | Upos::Propn | Upos::Pron)
    }

    pub fn is_predicate(self) -> bool {
        matches!(self, Upos::Verb | Upos::Aux)
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Upos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Upos::ALL
            .iter()
            .copied()
            .find(|u| u.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation(alloc::format!("unknown UPOS tag {s:?}")))
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Upos {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Upos {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A token with its byte span in the source text, when known.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Token {
    pub text: String,
    pub lemma: String,
    pub upos: Upos,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub span: Option<(usize, usize)>,
}

impl Token {
    pub fn new(text: impl Into<String>, lemma: impl Into<String>, upos: Upos) -> Self {
        Self {
            text: text.into(),
            lemma: lemma.into(),
            upos,
            span: None,
        }
    }
}

const DET: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "each", "every", "some", "any", "no",
    "another", "either", "neither", "all", "both", "such",
];
const PRON_PERSONAL: &[&str] = &[
    "i",
    "you",
    "he",
    "she",
    "it",
    "we",
    "they",
    "me",
    "him",
    "us",
    "them",
    "myself",
    "yourself",
    "himself",
    "herself",
    "itself",
    "ourselves",
    "themselves",
    "who",
    "whom",
    "someone",
    "somebody",
    "something",
    "anyone",
    "anybody",
    "anything",
    "everyone",
    "everybody",
    "everything",
    "nobody",
    "nothing",
    "mine",
    "yours",
    "hers",
    "ours",
    "theirs",
];
const PRON_POSSESSIVE: &[&str] = &["my", "your", "his", "her", "its", "our", "their", "whose"];
const AUX: &[(&str, &str)] = &[
    ("be", "be"),
    ("am", "be"),
    ("is", "be"),
    ("are", "be"),
    ("was", "be"),
    ("were", "be"),
    ("been", "be"),
    ("being", "be"),
    ("'re", "be"),
    ("'m", "be"),
    ("do", "do"),
    ("does", "do"),
    ("did", "do"),
    ("have", "have"),
    ("has", "have"),
    ("had", "have"),
    ("'ve", "have"),
    ("will", "will"),
    ("wo", "will"),
    ("'ll", "will"),
    ("would", "would"),
    ("'d", "would"),
    ("shall", "shall"),
    ("should", "should"),
    ("can", "can"),
    ("ca", "can"),
    ("could", "could"),
    ("may", "may"),
    ("might", "might"),
    ("must", "must"),
];
const SCONJ: &[&str] = &[
    "because", "although", "though", "while", "if", "unless", "whereas", "whether", "since",
];
// Subordinators only when a personal pronoun subject follows ("after it landed").
const SCONJ_BEFORE_SUBJECT: &[&str] = &[
    "when", "whenever", "where", "wherever", "after", "before", "until", "once",
];
const CCONJ: &[&str] = &["and", "or", "but", "nor"];
const ADP: &[&str] = &[
    "in", "on", "at", "by", "for", "with", "into", "onto", "from", "of", "to", "outside", "inside",
    "over", "under", "through", "across", "behind", "near", "off", "out", "up", "down", "about",
    "above", "below", "between", "among", "against", "along", "around", "toward", "towards",
    "upon", "within", "without", "past", "beyond", "during", "despite", "like", "than", "via",
    "after", "before", "until",
];
const ADV: &[&str] = &[
    "very", "too", "also", "just", "then", "there", "here", "never", "always", "often", "again",
    "still", "really", "quite", "almost", "already", "even", "ever", "soon", "now", "later",
    "maybe", "perhaps", "yet", "well", "back", "away", "so", "when", "where", "once", "how", "why",
];
const ADJ: &[&str] = &[
    "good", "bad", "high", "low", "close", "wide", "fast", "slow", "big", "small", "long", "short",
    "hard", "soft", "great", "quick", "first", "last", "next", "same", "other", "new", "old",
    "clear", "full", "empty", "late", "early", "deep", "safe", "fair", "wild",
];
const NUM: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "hundred", "thousand",
];
const INTJ: &[&str] = &["oh", "wow", "yes", "yeah", "hey", "uh", "um", "ok", "okay"];
// Verb forms that stay verbs after a noun (the batter hit ...). Irregular forms carry a lemma.
const VERBS: &[(&str, &str)] = &[
    ("hit", "hit"),
    ("hits", "hit"),
    ("hitting", "hit"),
    ("swing", "swing"),
    ("swings", "swing"),
    ("swung", "swing"),
    ("swinging", "swing"),
    ("throw", "throw"),
    ("throws", "throw"),
    ("threw", "throw"),
    ("thrown", "throw"),
    ("catch", "catch"),
    ("catches", "catch"),
    ("caught", "catch"),
    ("run", "run"),
    ("runs", "run"),
    ("ran", "run"),
    ("running", "run"),
    ("go", "go"),
    ("goes", "go"),
    ("went", "go"),
    ("gone", "go"),
    ("get", "get"),
    ("gets", "get"),
    ("got", "get"),
    ("make", "make"),
    ("makes", "make"),
    ("made", "make"),
    ("take", "take"),
    ("takes", "take"),
    ("took", "take"),
    ("taken", "take"),
    ("see", "see"),
    ("sees", "see"),
    ("saw", "see"),
    ("seen", "see"),
    ("come", "come"),
    ("comes", "come"),
    ("came", "come"),
    ("fall", "fall"),
    ("falls", "fall"),
    ("fell", "fall"),
    ("fly", "fly"),
    ("flies", "fly"),
    ("flew", "fly"),
    ("give", "give"),
    ("gave", "give"),
    ("given", "give"),
    ("put", "put"),
    ("puts", "put"),
    ("let", "let"),
    ("lets", "let"),
    ("say", "say"),
    ("says", "say"),
    ("said", "say"),
    ("bounce", "bounce"),
    ("bounces", "bounce"),
    ("land", "land"),
    ("lands", "land"),
    ("miss", "miss"),
    ("misses", "miss"),
    ("cross", "cross"),
    ("crosses", "cross"),
    ("reach", "reach"),
    ("reaches", "reach"),
    ("touch", "touch"),
    ("touches", "touch"),
    ("tag", "tag"),
    ("tags", "tag"),
    ("call", "call"),
    ("calls", "call"),
    ("cook", "cook"),
    ("cooks", "cook"),
    ("eat", "eat"),
    ("eats", "eat"),
    ("ate", "eat"),
    ("sing", "sing"),
    ("sings", "sing"),
    ("sang", "sing"),
    ("drive", "drive"),
    ("drives", "drive"),
    ("drove", "drive"),
    ("show", "show"),
    ("shows", "show"),
    ("talk", "talk"),
    ("talks", "talk"),
    ("play", "play"),
    ("plays", "play"),
    ("wear", "wear"),
    ("wears", "wear"),
    ("wore", "wear"),
    ("move", "move"),
    ("moves", "move"),
];

fn in_list(list: &[&str], w: &str) -> bool {
    list.contains(&w)
}

fn lookup<'a>(list: &'a [(&'a str, &'a str)], w: &str) -> Option<&'a str> {
    list.iter()
        .find(|(form, _)| *form == w)
        .map(|(_, lemma)| *lemma)
}

/// A surface token before tagging.
#[derive(Debug, Clone, Copy)]
struct Piece {
    start: usize,
    end: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '’' || c == '-' || c == '_'
}

fn is_sentence_end(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Splits `text` into sentences of tagged tokens. Token spans are byte offsets into `text`.
pub fn tokenize(text: &str) -> Vec<Vec<Token>> {
    let mut sentences = Vec::new();
    let mut current: Vec<Piece> = Vec::new();
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if c.is_whitespace() {
            continue;
        }
        if is_word_char(c) && c != '\'' && c != '’' && c != '-' {
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = iter.peek() {
                // a '.' between digits stays inside the number
                let decimal = d == '.'
                    && text[..j]
                        .chars()
                        .next_back()
                        .is_some_and(|p| p.is_ascii_digit())
                    && text[j + 1..]
                        .chars()
                        .next()
                        .is_some_and(|n| n.is_ascii_digit());
                if is_word_char(d) || decimal {
                    end = j + d.len_utf8();
                    iter.next();
                } else {
                    break;
                }
            }
            split_contraction(text, i, end, &mut current);
        } else if is_sentence_end(c) {
            while let Some(&(_, d)) = iter.peek() {
                if is_sentence_end(d) {
                    iter.next();
                } else {
                    break;
                }
            }
            if !current.is_empty() {
                sentences.push(core::mem::take(&mut current));
            }
        } else {
            current.push(Piece {
                start: i,
                end: i + c.len_utf8(),
            });
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences.into_iter().map(|s| tag(text, &s)).collect()
}

fn split_contraction(text: &str, start: usize, end: usize, out: &mut Vec<Piece>) {
    let word = &text[start..end];
    let lower = word.to_lowercase().replace('’', "'");
    if lower.len() == word.len() {
        if lower.ends_with("n't") && lower.len() > 3 {
            let cut = end - 3;
            out.push(Piece { start, end: cut });
            out.push(Piece { start: cut, end });
            return;
        }
        for suffix in ["'s", "'re", "'ve", "'ll", "'d", "'m"] {
            if lower.ends_with(suffix) && lower.len() > suffix.len() {
                let cut = end - suffix.len();
                out.push(Piece { start, end: cut });
                out.push(Piece { start: cut, end });
                return;
            }
        }
    }
    out.push(Piece { start, end });
}

fn tag(text: &str, pieces: &[Piece]) -> Vec<Token> {
    let lowers: Vec<String> = pieces
        .iter()
        .map(|p| text[p.start..p.end].to_lowercase().replace('’', "'"))
        .collect();
    let mut tokens: Vec<Token> = Vec::with_capacity(pieces.len());
    let mut prev_possessive = false;
    for (i, p) in pieces.iter().enumerate() {
        let surface = &text[p.start..p.end];
        let w = lowers[i].as_str();
        let next = lowers.get(i + 1).map(String::as_str);
        let prev = tokens.last().map(|t| t.upos);
        let (upos, lemma) = tag_word(surface, w, i, prev, prev_possessive, next);
        prev_possessive = upos == Upos::Pron && in_list(PRON_POSSESSIVE, w);
        tokens.push(Token {
            text: surface.to_string(),
            lemma,
            upos,
            span: Some((p.start, p.end)),
        });
    }
    tokens
}

fn tag_word(
    surface: &str,
    w: &str,
    position: usize,
    prev: Option<Upos>,
    prev_possessive: bool,
    next: Option<&str>,
) -> (Upos, String) {
    let own = || w.to_string();
    if !w.chars().any(char::is_alphanumeric) {
        return (Upos::Punct, own());
    }
    if w.chars()
        .all(|c| c.is_ascii_digit() || c == '.' || c == ',')
        || in_list(NUM, w)
    {
        return (Upos::Num, own());
    }
    if w == "n't" || w == "not" {
        return (Upos::Part, "not".into());
    }
    if w == "'s" {
        return if prev == Some(Upos::Pron) {
            (Upos::Aux, "be".into())
        } else {
            (Upos::Part, "'s".into())
        };
    }
    if w == "to" {
        let infinitive =
            next.is_some_and(|n| lookup(VERBS, n) == Some(n) || n == "be" || n == "have");
        return if infinitive {
            (Upos::Part, own())
        } else {
            (Upos::Adp, own())
        };
    }
    if let Some(lemma) = lookup(AUX, w) {
        return (Upos::Aux, lemma.into());
    }
    if in_list(CCONJ, w) {
        return (Upos::Cconj, own());
    }
    if in_list(SCONJ, w) {
        return (Upos::Sconj, own());
    }
    if in_list(SCONJ_BEFORE_SUBJECT, w) && next.is_some_and(|n| in_list(PRON_PERSONAL, n)) {
        return (Upos::Sconj, own());
    }
    if in_list(DET, w) {
        return (Upos::Det, own());
    }
    if in_list(PRON_PERSONAL, w) || in_list(PRON_POSSESSIVE, w) {
        return (Upos::Pron, own());
    }
    if in_list(ADP, w) {
        return (Upos::Adp, own());
    }
    if in_list(ADV, w) {
        return (Upos::Adv, own());
    }
    if in_list(INTJ, w) {
        return (Upos::Intj, own());
    }
    if position > 0 && surface.chars().next().is_some_and(char::is_uppercase) {
        return (Upos::Propn, own());
    }
    if w.len() > 4 && w.ends_with("ly") {
        return (Upos::Adv, own());
    }
    let verb_lemma = lookup(VERBS, w);
    let verb_like = verb_lemma.is_some() || (w.len() > 4 && w.ends_with("ed"));
    let verb = |w: &str| (Upos::Verb, verb_lemma.unwrap_or(w).to_string());
    let adjective = in_list(ADJ, w)
        || (w.len() > 5
            && ["ous", "ful", "ive", "able", "ible"]
                .iter()
                .any(|s| w.ends_with(s)));
    match prev {
        _ if prev_possessive => (Upos::Noun, own()),
        Some(Upos::Aux) | Some(Upos::Part) | Some(Upos::Pron) => {
            if adjective {
                (Upos::Adj, own())
            } else {
                verb(w)
            }
        }
        Some(Upos::Det) | Some(Upos::Adj) | Some(Upos::Num) | Some(Upos::Adp) => {
            if adjective {
                (Upos::Adj, own())
            } else {
                (Upos::Noun, own())
            }
        }
        Some(Upos::Noun) | Some(Upos::Propn) if verb_like => verb(w),
        None if verb_lemma.is_some() => verb(w),
        _ if adjective => (Upos::Adj, own()),
        _ => (Upos::Noun, own()),
    }
}
