//! Readers and writers for every on-disk format the pipeline touches.
//!
//! JSON Lines readers report 1-based line numbers. Blank lines are skipped.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use conceptmine_core::corpus::ExplanationRecord;
use conceptmine_core::grouping::EmbeddingTable;
use conceptmine_core::lingfront::{ParseTable, ParsedSentence};
use conceptmine_core::vectorize::{ConceptLexicon, ConceptMatrix};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, message: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.to_string(),
    }
}

/// Deserializes each non-blank line of a JSON Lines file.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let text = read_text(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map(|v| (i + 1, v))
                .map_err(|e| parse_err(path, i + 1, e))
        })
        .collect()
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).expect("in-memory serialization");
        out.push(b'\n');
    }
    out
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("in-memory serialization");
    out.push(b'\n');
    out
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::format(path, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusLine {
    id: u64,
    label: String,
    explanation: String,
}

/// Corpus JSON Lines with exactly the fields `id`, `label`, `explanation`.
pub fn read_corpus(path: &Path) -> Result<Vec<ExplanationRecord>> {
    Ok(read_jsonl::<CorpusLine>(path)?
        .into_iter()
        .map(|(_, r)| ExplanationRecord::new(r.id, r.label, r.explanation))
        .collect())
}

pub fn corpus_jsonl(records: &[ExplanationRecord]) -> Vec<u8> {
    to_jsonl(records)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParseFile {
    records: Vec<ParseRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParseRecord {
    id: u64,
    sentences: Vec<ParsedSentence>,
}

/// Parse interchange JSON; every tree is validated against its tokens.
pub fn read_parses(path: &Path) -> Result<ParseTable> {
    let file: ParseFile = read_json(path)?;
    let mut table = ParseTable::new();
    for r in file.records {
        table
            .insert(r.id, r.sentences)
            .map_err(|e| Error::format(path, e))?;
    }
    Ok(table)
}

/// Serializes parses in interchange form, ordered by record id.
pub fn parses_json(records: &BTreeMap<u64, Vec<ParsedSentence>>) -> Vec<u8> {
    let file = ParseFile {
        records: records
            .iter()
            .map(|(&id, s)| ParseRecord {
                id,
                sentences: s.clone(),
            })
            .collect(),
    };
    to_json(&file)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbeddingLine {
    text: String,
    vector: Vec<f64>,
}

/// Embedding interchange JSON Lines. All vectors must share one dimension.
pub fn read_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let mut table = EmbeddingTable::new();
    for (line, e) in read_jsonl::<EmbeddingLine>(path)? {
        table
            .insert(e.text, e.vector)
            .map_err(|err| parse_err(path, line, err))?;
    }
    Ok(table)
}

/// Header `id,c0,...,c{K-1}`, one 0/1 row per record.
pub fn matrix_csv(matrix: &ConceptMatrix) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let header: Vec<String> = std::iter::once("id".to_string())
        .chain((0..matrix.num_concepts).map(|k| format!("c{k}")))
        .collect();
    w.write_record(&header).expect("in-memory csv");
    for (id, row) in matrix.ids.iter().zip(&matrix.rows) {
        let fields: Vec<String> = std::iter::once(id.to_string())
            .chain(row.iter().map(u8::to_string))
            .collect();
        w.write_record(&fields).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

/// Reads a matrix CSV and checks its width against the lexicon.
pub fn read_matrix(path: &Path, lexicon: &ConceptLexicon) -> Result<ConceptMatrix> {
    let text = read_text(path)?;
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| parse_err(path, 1, e))?.clone();
    let k = lexicon.len();
    if header.len() != k + 1 {
        return Err(parse_err(
            path,
            1,
            format!(
                "{} concept columns but the lexicon has {k} entries",
                header.len().saturating_sub(1)
            ),
        ));
    }
    let expected = std::iter::once("id".to_string()).chain((0..k).map(|i| format!("c{i}")));
    if !header.iter().eq(expected.clone()) {
        return Err(parse_err(path, 1, "header must be id,c0,...,c{K-1}"));
    }
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(path, line, e))?;
        let id = rec[0]
            .parse()
            .map_err(|e| parse_err(path, line, format!("id: {e}")))?;
        let row = rec
            .iter()
            .skip(1)
            .map(|f| match f {
                "0" => Ok(0),
                "1" => Ok(1),
                other => Err(parse_err(
                    path,
                    line,
                    format!("entry {other:?} is not 0 or 1"),
                )),
            })
            .collect::<Result<Vec<u8>>>()?;
        ids.push(id);
        rows.push(row);
    }
    ConceptMatrix::new(ids, rows, k).map_err(|e| Error::format(path, e))
}

pub fn read_lexicon(path: &Path) -> Result<ConceptLexicon> {
    let raw: ConceptLexicon = read_json(path)?;
    ConceptLexicon::new(raw.concepts).map_err(|e| Error::format(path, e))
}

/// Features CSV with header `id,f0,...`; every row must have the same width.
pub fn read_features(path: &Path) -> Result<BTreeMap<u64, Vec<f64>>> {
    let text = read_text(path)?;
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let width = r.headers().map_err(|e| parse_err(path, 1, e))?.len();
    if width < 2 {
        return Err(parse_err(
            path,
            1,
            "features need an id column and at least one value",
        ));
    }
    let mut out = BTreeMap::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(path, line, e))?;
        let id: u64 = rec[0]
            .parse()
            .map_err(|e| parse_err(path, line, format!("id: {e}")))?;
        let values = rec
            .iter()
            .skip(1)
            .map(|f| match f.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_err(
                    path,
                    line,
                    format!("feature {f:?} is not a finite number"),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        if out.insert(id, values).is_some() {
            return Err(parse_err(path, line, format!("duplicate id {id}")));
        }
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes files into one directory and remembers the digest of each.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    digests: BTreeMap<String, String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            digests: BTreeMap::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.digests.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn digests(&self) -> &BTreeMap<String, String> {
        &self.digests
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_csv_layout() {
        let m = ConceptMatrix::new(vec![1, 5], vec![vec![1, 0], vec![0, 1]], 2).unwrap();
        assert_eq!(
            String::from_utf8(matrix_csv(&m)).unwrap(),
            "id,c0,c1\n1,1,0\n5,0,1\n"
        );
        let empty = ConceptMatrix::new(vec![], vec![], 3).unwrap();
        assert_eq!(
            String::from_utf8(matrix_csv(&empty)).unwrap(),
            "id,c0,c1,c2\n"
        );
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
