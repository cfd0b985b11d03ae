//! Artifact files: reading the corpus format and byte-exact write/read
//! cycles for every record type.

use std::path::PathBuf;

use qdmr_dg::graph::{greedy_decode, ProbTensor};
use qdmr_dg::io::{
    read_break_csv, read_break_csv_from, read_jsonl, write_jsonl, AlignmentRecord, Artifact, DgRecord, IoError,
    LfRecord, TensorEncoding, TensorRecord,
};
use qdmr_dg::pipeline::{qdmr_to_dg, PipelineConfig};
use qdmr_dg::{EdgeTag, Lexicon, Qdmr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sample_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/sample.csv")
}

/// Writes, reads back, writes again, and checks both the records and the
/// bytes.
fn cycle<A: Artifact + PartialEq + std::fmt::Debug>(records: &[A]) {
    let mut first = Vec::new();
    write_jsonl(&mut first, records).unwrap();
    let back: Vec<A> = read_jsonl(&first[..]).unwrap();
    assert_eq!(back, records);
    let mut second = Vec::new();
    write_jsonl(&mut second, &back).unwrap();
    assert_eq!(first, second);
}

#[test]
fn census_row_has_six_steps() {
    let text = "question_id,question_text,decomposition\n\
        census,\"Which census group is smaller: Pacific islander or African American?\",\
        \"return census groups ;return #1 that is Pacific islander ;return #1 that is African American ;\
        return size of #2 ;return size of #3 ;return which is lowest of #4 , #5\"\n";
    let rows = read_break_csv_from(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(Qdmr::parse(&rows[0].decomposition).unwrap().len(), 6);
}

#[test]
fn pipeline_artifacts_survive_write_and_read() {
    let lex = Lexicon::default();
    let examples = read_break_csv(sample_path()).unwrap();
    assert_eq!(examples.len(), 50);
    let mut lfs = Vec::new();
    let mut alignments = Vec::new();
    let mut graphs = Vec::new();
    for ex in &examples {
        let qdmr = Qdmr::parse(&ex.decomposition).unwrap();
        let art = qdmr_to_dg(&ex.question, &qdmr, &lex, &PipelineConfig::default()).unwrap();
        lfs.push(LfRecord::new(&ex.id, &art.lf));
        alignments.push(AlignmentRecord::new(&ex.id, &art.aug.tokens[..art.aug.alignable_len()], &art.alignment));
        graphs.push(DgRecord::new(&ex.id, &art.aug, &art.dg));
    }
    cycle(&lfs);
    cycle(&alignments);
    cycle(&graphs);
    for (rec, ex) in graphs.iter().zip(&examples) {
        let qdmr = Qdmr::parse(&ex.decomposition).unwrap();
        let art = qdmr_to_dg(&ex.question, &qdmr, &lex, &PipelineConfig::default()).unwrap();
        assert_eq!(rec.graph(), art.dg);
        assert_eq!(rec.augmented().unwrap(), art.aug);
    }
}

#[test]
fn tensors_survive_in_both_encodings() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tags = vec![EdgeTag::Span, EdgeTag::Duplicate];
    let tokens: Vec<String> = (0..6).map(|i| format!("w{i}")).collect();
    let mut t = ProbTensor::zeros(6, tags);
    for v in t.values.iter_mut() {
        *v = rng.gen_range(0.0f32..0.5);
    }
    for enc in [TensorEncoding::Base64, TensorEncoding::Nested] {
        let rec = TensorRecord::new("t", &tokens, &t, enc);
        cycle(std::slice::from_ref(&rec));
        assert_eq!(rec.tensor().unwrap(), t);
        assert_eq!(greedy_decode(&rec.tensor().unwrap()), greedy_decode(&t));
    }
}

#[test]
fn truncated_file_is_a_parse_error() {
    let lex = Lexicon::default();
    let lf = qdmr_dg::convert::convert_text("return cubes ;return number of #1", &lex).unwrap();
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &[LfRecord::new("a", &lf), LfRecord::new("b", &lf)]).unwrap();
    let cut = &buf[..buf.len() - 10];
    match read_jsonl::<LfRecord, _>(cut) {
        Err(IoError::ParseError { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn empty_file_lacks_a_header() {
    assert!(matches!(read_jsonl::<LfRecord, _>(&b""[..]), Err(IoError::ParseError { line: 1, .. })));
}
