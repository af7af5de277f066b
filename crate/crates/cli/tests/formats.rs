mod common;

use std::collections::BTreeSet;

use common::{a1_config, fixture, write, A1_FRAGMENTS};
use conceptmine::formats::{
    matrix_csv, read_corpus, read_embeddings, read_features, read_lexicon, read_matrix,
    read_parses, to_json,
};
use conceptmine::pipeline;
use conceptmine::Error;
use conceptmine_core::corpus::ExplanationCorpus;
use conceptmine_core::grouping::Embedder;
use conceptmine_core::lingfront::{extract_raw_concepts, ExtractionMode};
use conceptmine_core::vectorize::{ConceptLexicon, ConceptMatrix, LexiconEntry};
use conceptmine_core::Error as CoreError;
use proptest::prelude::*;

fn lexicon(k: usize) -> ConceptLexicon {
    ConceptLexicon::new(
        (0..k)
            .map(|i| LexiconEntry {
                k: i,
                representative: format!("Concept {i}"),
                members: vec![format!("concept {i}"), format!("alias {i}")],
                count: i as u32 + 1,
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn corpus_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "c.jsonl",
        "{\"id\":1,\"label\":\"a\",\"explanation\":\"x\"}\n\n{\"id\":2,\"label\":\"a\"}\n",
    );
    match read_corpus(&p) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
    let p = write(
        dir.path(),
        "d.jsonl",
        "{\"id\":1,\"label\":\"a\",\"explanation\":\"x\",\"extra\":1}\n",
    );
    assert!(matches!(read_corpus(&p), Err(Error::Parse { line: 1, .. })));
}

#[test]
fn empty_and_duplicate_corpora_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = a1_config(dir.path());
    cfg.corpus = Some(write(dir.path(), "empty.jsonl", "\n"));
    assert!(matches!(
        pipeline::clean(&cfg),
        Err(Error::Core(CoreError::EmptyCorpus))
    ));

    cfg.corpus = Some(write(
        dir.path(),
        "nulls.jsonl",
        "{\"id\":1,\"label\":\"none\",\"explanation\":\"x\"}\n",
    ));
    assert!(matches!(
        pipeline::clean(&cfg),
        Err(Error::Core(CoreError::EmptyCorpus))
    ));

    let dup = "{\"id\":1,\"label\":\"a\",\"explanation\":\"The ball was low.\"}\n\
               {\"id\":1,\"label\":\"a\",\"explanation\":\"The batter did not swing.\"}\n";
    cfg.corpus = Some(write(dir.path(), "dup.jsonl", dup));
    assert!(matches!(
        pipeline::clean(&cfg),
        Err(Error::Core(CoreError::DuplicateId(1)))
    ));
    cfg.merge_annotators = true;
    let merged = pipeline::clean(&cfg).unwrap();
    assert_eq!(
        merged.records()[0].explanation,
        "The ball was low. The batter did not swing."
    );
}

#[test]
fn parse_interchange_reproduces_worked_extraction() {
    let records = read_corpus(&fixture("corpus.jsonl")).unwrap();
    let corpus = ExplanationCorpus::new(records, ["none".to_string()].into())
        .unwrap()
        .clean();
    let parses = read_parses(&fixture("parses.json")).unwrap();
    let ex = extract_raw_concepts(&corpus, &parses, ExtractionMode::Rules).unwrap();
    assert_eq!(ex.concepts, A1_FRAGMENTS);
    let by_record: Vec<(u64, &str)> = ex
        .occurrences
        .iter()
        .map(|o| (o.record_id, o.fragment.as_str()))
        .collect();
    assert_eq!(
        by_record,
        [
            (1, "The batter did not swing"),
            (1, "The ball was in the strike zone"),
            (2, "the ball into the stands"),
            (2, "it landed in foul territory"),
            (3, "The hitter didn't swing"),
            (3, "The ball was outside the strike zone"),
            (5, "the batter hit the ball"),
            (5, "it was caught by the fielder"),
        ]
    );
}

#[test]
fn bad_parse_trees_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let tree = |child: &str| {
        format!(
            r#"{{"records":[{{"id":1,"sentences":[{{"tokens":[{{"text":"It","lemma":"it","upos":"PRON"}},{{"text":"fell","lemma":"fall","upos":"VERB"}}],"root":{{"span":[0,2],"label":"S","children":[{child}]}}}}]}}]}}"#
        )
    };
    let ok = write(
        dir.path(),
        "ok.json",
        &tree(r#"{"span":[0,1],"label":"NP"}"#),
    );
    assert_eq!(read_parses(&ok).unwrap().len(), 1);
    let outside = write(
        dir.path(),
        "bad.json",
        &tree(r#"{"span":[1,3],"label":"VP"}"#),
    );
    assert!(matches!(read_parses(&outside), Err(Error::Format { .. })));
    let upos = write(
        dir.path(),
        "upos.json",
        &tree("").replace("VERB", "VERBISH"),
    );
    assert!(matches!(read_parses(&upos), Err(Error::Format { .. })));

    // a corpus record with no parse is a lookup error
    let mut cfg = a1_config(dir.path());
    cfg.parses = Some(ok);
    let corpus = pipeline::clean(&cfg).unwrap();
    assert!(matches!(
        pipeline::extract(&cfg, &corpus),
        Err(Error::Core(CoreError::ParseLookup { record: 2, .. }))
    ));
}

#[test]
fn embeddings_reject_mixed_dimensions() {
    let table = read_embeddings(&fixture("embeddings.jsonl")).unwrap();
    assert_eq!(table.len(), 9);
    assert_eq!(table.dim(), 10);
    assert!(matches!(
        table.embed("no such fragment"),
        Err(CoreError::EmbeddingMissing(_))
    ));

    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "e.jsonl",
        "{\"text\":\"a\",\"vector\":[1.0,0.0]}\n{\"text\":\"b\",\"vector\":[1.0,0.0,0.0]}\n",
    );
    match read_embeddings(&p) {
        Err(Error::Parse { line, message, .. }) => {
            assert_eq!(line, 2);
            assert!(message.contains("expected 2, found 3"), "{message}");
        }
        other => panic!("expected a dimension error, got {other:?}"),
    }
}

#[test]
fn grouping_fails_on_a_missing_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = a1_config(dir.path());
    cfg.embeddings = Some(write(
        dir.path(),
        "e.jsonl",
        "{\"text\":\"the batter did not swing\",\"vector\":[1.0]}\n",
    ));
    let corpus = pipeline::clean(&cfg).unwrap();
    let ex = pipeline::extract(&cfg, &corpus).unwrap();
    let comp = pipeline::completion(&cfg, &corpus, &ex).unwrap();
    assert!(matches!(
        pipeline::group(&cfg, &comp),
        Err(Error::Core(CoreError::EmbeddingMissing(f))) if f == "the ball was in the strike zone"
    ));
}

#[test]
fn matrix_width_must_match_lexicon() {
    let dir = tempfile::tempdir().unwrap();
    let lex = lexicon(2);
    let p = write(dir.path(), "m.csv", "id,c0,c1,c2\n1,0,1,0\n");
    assert!(matches!(
        read_matrix(&p, &lex),
        Err(Error::Parse { line: 1, .. })
    ));
    let p = write(dir.path(), "m2.csv", "id,c0,c1\n1,0,2\n");
    assert!(matches!(
        read_matrix(&p, &lex),
        Err(Error::Parse { line: 2, .. })
    ));
    let p = write(dir.path(), "m3.csv", "id,c0,c1\n1,0\n");
    assert!(read_matrix(&p, &lex).is_err());
}

#[test]
fn empty_matrix_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let lex = lexicon(3);
    let m = ConceptMatrix::new(vec![], vec![], 3).unwrap();
    let p = dir.path().join("m.csv");
    std::fs::write(&p, matrix_csv(&m)).unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "id,c0,c1,c2\n");
    assert_eq!(read_matrix(&p, &lex).unwrap(), m);
}

#[test]
fn lexicon_round_trip_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let lex = lexicon(4);
    let p = dir.path().join("lexicon.json");
    std::fs::write(&p, to_json(&lex)).unwrap();
    assert_eq!(read_lexicon(&p).unwrap(), lex);
    let text = std::fs::read_to_string(&p).unwrap();
    let keys: BTreeSet<&str> = [
        "\"k\"",
        "\"representative\"",
        "\"members\"",
        "\"count\"",
        "\"concepts\"",
    ]
    .into();
    assert!(keys.iter().all(|k| text.contains(k)));
    let bad = write(
        dir.path(),
        "bad.json",
        &text.replace("\"k\": 3", "\"k\": 7"),
    );
    assert!(matches!(read_lexicon(&bad), Err(Error::Format { .. })));
}

#[test]
fn features_file_rows_follow_record_ids() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "f.csv", "id,f0,f1\n5,0.5,1\n1,2,3\n");
    let table = read_features(&p).unwrap();
    assert_eq!(table[&1], vec![2.0, 3.0]);
    assert_eq!(table[&5], vec![0.5, 1.0]);
    assert!(read_features(&write(dir.path(), "g.csv", "id,f0\n1,nan\n")).is_err());
    assert!(read_features(&write(dir.path(), "h.csv", "id,f0\n1,1\n1,2\n")).is_err());

    let mut cfg = a1_config(dir.path());
    cfg.features = Some(p);
    let m = ConceptMatrix::new(vec![5, 1], vec![vec![1], vec![0]], 1).unwrap();
    assert_eq!(
        pipeline::features(&cfg, &m).unwrap(),
        vec![vec![0.5, 1.0], vec![2.0, 3.0]]
    );
    let missing = ConceptMatrix::new(vec![9], vec![vec![1]], 1).unwrap();
    assert!(pipeline::features(&cfg, &missing).is_err());
}

proptest! {
    #[test]
    fn matrix_csv_round_trips(k in 0usize..6, rows in proptest::collection::vec((any::<u64>(), any::<u8>()), 0..12)) {
        let lex = lexicon(k);
        let ids: Vec<u64> = rows.iter().map(|r| r.0).collect();
        let data: Vec<Vec<u8>> = rows.iter().map(|&(_, bits)| (0..k).map(|c| (bits >> c) & 1).collect()).collect();
        let m = ConceptMatrix::new(ids, data, k).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        std::fs::write(&p, matrix_csv(&m)).unwrap();
        prop_assert_eq!(read_matrix(&p, &lex).unwrap(), m);
    }
}
