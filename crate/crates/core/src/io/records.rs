use serde::{Deserialize, Serialize};

use super::{Artifact, IoError};
use crate::align::{AlignOutput, Alignment};
use crate::graph::DecodeStatus;
use crate::model::{AugmentedQuestion, DependencyGraph, DgEdge, EdgeTag, LogicalForm, LogicalFormStep};

/// A logical form as rendered steps. References are 1-based (`#1` is the
/// first step).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LfRecord {
    pub id: String,
    pub steps: Vec<String>,
}

impl Artifact for LfRecord {
    const SCHEMA: &'static str = "lf";
}

impl LfRecord {
    pub fn new(id: impl Into<String>, lf: &LogicalForm) -> Self {
        Self {
            id: id.into(),
            steps: lf.render(),
        }
    }

    pub fn to_lf(&self) -> Result<LogicalForm, IoError> {
        let steps = self
            .steps
            .iter()
            .map(|s| LogicalFormStep::parse(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| IoError::ParseError {
                line: 0,
                message: format!("{}: {e}", self.id),
            })?;
        Ok(LogicalForm::new(steps))
    }
}

/// Aligned `[question position, step, step token]` triples, all 0-based,
/// over the question followed by `[SEP]` and the store words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentRecord {
    pub id: String,
    pub tokens: Vec<String>,
    pub pairs: Vec<[usize; 3]>,
    /// `[step, step token]` of informative step words with no candidate.
    pub uncovered: Vec<[usize; 2]>,
    pub objective: i64,
    pub optimal: bool,
}

impl Artifact for AlignmentRecord {
    const SCHEMA: &'static str = "alignment";
}

impl AlignmentRecord {
    pub fn new(id: impl Into<String>, tokens: &[String], out: &AlignOutput) -> Self {
        Self {
            id: id.into(),
            tokens: tokens.to_vec(),
            pairs: out.alignment.pairs.iter().map(|&(i, k, j)| [i, k, j]).collect(),
            uncovered: out.uncovered.iter().map(|&(k, j)| [k, j]).collect(),
            objective: out.objective,
            optimal: out.status == crate::ilp::SolveStatus::Optimal,
        }
    }

    pub fn alignment(&self) -> Alignment {
        Alignment::new(self.pairs.iter().map(|p| (p[0], p[1], p[2])))
    }
}

/// A dependency graph with the augmented question it lives on. Edges are
/// `[source, target, "tag"]` with 0-based token positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgRecord {
    pub id: String,
    pub n: usize,
    pub tokens: Vec<String>,
    pub edges: Vec<(usize, usize, EdgeTag)>,
    /// Solver outcome, present for graphs produced by the decoder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<DecodeStatus>,
}

impl Artifact for DgRecord {
    const SCHEMA: &'static str = "dg";
}

impl DgRecord {
    pub fn new(id: impl Into<String>, aug: &AugmentedQuestion, dg: &DependencyGraph) -> Self {
        Self {
            id: id.into(),
            n: aug.len(),
            tokens: aug.tokens.clone(),
            edges: dg.edges.iter().map(|e| (e.src, e.dst, e.tag.clone())).collect(),
            status: None,
        }
    }

    pub fn with_status(mut self, status: DecodeStatus) -> Self {
        self.status = Some(status);
        self
    }

    pub fn augmented(&self) -> Result<AugmentedQuestion, IoError> {
        let bad = |message: String| IoError::ParseError { line: 0, message };
        if self.tokens.len() != self.n {
            return Err(bad(format!("{}: n={} but {} tokens", self.id, self.n, self.tokens.len())));
        }
        AugmentedQuestion::from_tokens(&self.tokens)
            .ok_or_else(|| bad(format!("{}: tokens do not form an augmented question", self.id)))
    }

    pub fn graph(&self) -> DependencyGraph {
        DependencyGraph::new(
            self.n,
            self.edges.iter().map(|(i, j, t)| DgEdge::new(*i, *j, t.clone())).collect(),
        )
    }
}

/// Outcome of the full conversion cycle for one example.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTripRecord {
    pub id: String,
    /// The decoded form matches the converted one.
    pub matches: bool,
    pub lf: Vec<String>,
    pub decoded: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Artifact for RoundTripRecord {
    const SCHEMA: &'static str = "roundtrip";
}

#[cfg(test)]
mod tests {
    use super::super::{read_jsonl, write_jsonl};
    use super::*;
    use crate::model::Question;

    #[test]
    fn lf_records_round_trip_bytes() {
        let lf = crate::convert::convert_text(
            "return cubes ;return #1 that are red ;return number of #2",
            &crate::Lexicon::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &[LfRecord::new("q1", &lf)]).unwrap();
        let back: Vec<LfRecord> = read_jsonl(&buf[..]).unwrap();
        assert_eq!(back[0].to_lf().unwrap().render(), lf.render());
        let mut again = Vec::new();
        write_jsonl(&mut again, &back).unwrap();
        assert_eq!(buf, again);
        assert!(String::from_utf8(buf).unwrap().contains("#1"));
    }

    #[test]
    fn dg_records_use_triples() {
        let aug = AugmentedQuestion::new(Question::parse("red cubes").unwrap(), &[], 1, 1);
        let dg = DependencyGraph::new(aug.len(), vec![DgEdge::new(0, 1, EdgeTag::Span)]);
        let rec = DgRecord::new("x", &aug, &dg);
        let line = serde_json::to_string(&rec).unwrap();
        assert!(line.contains(r#""edges":[[0,1,"span"]]"#), "{line}");
        let back: DgRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back.graph(), dg);
        assert_eq!(back.augmented().unwrap(), aug);
    }

    #[test]
    fn wrong_schema_and_version_are_rejected() {
        let mut buf = Vec::new();
        write_jsonl::<LfRecord, _>(&mut buf, &[]).unwrap();
        assert!(matches!(read_jsonl::<DgRecord, _>(&buf[..]), Err(IoError::SchemaMismatch { .. })));
        let text = "{\"schema\":\"lf\",\"version\":7}\n";
        assert!(matches!(
            read_jsonl::<LfRecord, _>(text.as_bytes()),
            Err(IoError::SchemaVersionMismatch { found: 7, .. })
        ));
    }

    #[test]
    fn truncated_line_is_a_parse_error() {
        let text = "{\"schema\":\"lf\",\"version\":1}\n{\"id\":\"a\",\"steps\":[\"SELECT[](sub=x)\"\n";
        assert!(matches!(read_jsonl::<LfRecord, _>(text.as_bytes()), Err(IoError::ParseError { line: 2, .. })));
    }
}
