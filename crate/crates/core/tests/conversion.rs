//! Conversion of the reference examples for each operator.

use qdmr_dg::convert::{convert_text, qdmr_to_lf_traced, ConvertError};
mod common;

use common::table::reference_rows;
use qdmr_dg::{ArgName, ArgToken, Lexicon, LogicalFormStep};

fn raw_tokens(step: &LogicalFormStep) -> Vec<(ArgName, Vec<ArgToken>)> {
    let mut v: Vec<(ArgName, Vec<ArgToken>)> = step.args.iter().map(|a| (a.name, a.value.clone())).collect();
    v.sort();
    v
}

#[test]
fn every_reference_row_converts_exactly() {
    let lex = Lexicon::default();
    for (text, expected) in reference_rows() {
        let lf = convert_text(&text, &lex).unwrap_or_else(|e| panic!("{text}: {e}"));
        let got = lf.steps.last().unwrap();
        assert_eq!(got.render(), expected.render(), "{text}");
        assert_eq!(raw_tokens(got), raw_tokens(&expected), "{text}");
    }
}

#[test]
fn trace_reports_trigger_positions() {
    let lex = Lexicon::default();
    let qdmr = qdmr_dg::Qdmr::parse("return cubes ;return maximal number of #1").unwrap();
    let (_, trace) = qdmr_to_lf_traced(&qdmr, &lex).unwrap();
    let spans: Vec<_> = trace.steps[1].triggers.iter().map(|m| m.span.clone()).collect();
    assert_eq!(spans, vec![0..1, 1..3]);
}

#[test]
fn conflicting_properties_are_reported() {
    let err = convert_text("return a ;return highest and lowest of #1", &Lexicon::default()).unwrap_err();
    assert!(matches!(err, ConvertError::ConflictingProperties { step: 1, .. }), "{err:?}");
}

#[test]
fn forward_reference_is_a_parse_error() {
    let err = convert_text("return #2 ;return cubes", &Lexicon::default()).unwrap_err();
    assert!(matches!(err, ConvertError::Parse(_)));
}
