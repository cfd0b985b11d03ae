use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{open, read_jsonl, Artifact, IoError};

/// One question with its decomposition, as distributed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusExample {
    pub id: String,
    pub question: String,
    pub decomposition: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operators: Option<Vec<String>>,
}

impl Artifact for CorpusExample {
    const SCHEMA: &'static str = "examples";
}

const ID: &str = "question_id";
const QUESTION: &str = "question_text";
const DECOMPOSITION: &str = "decomposition";
const OPERATORS: &str = "operators";

/// Reads a BREAK-style CSV with at least the columns `question_id`,
/// `question_text` and `decomposition`. An `operators` column, written as
/// a bracketed list like `['select', 'filter']`, is kept when present.
pub fn read_break_csv(path: impl AsRef<Path>) -> Result<Vec<CorpusExample>, IoError> {
    read_break_csv_from(open(path)?)
}

pub fn read_break_csv_from<R: Read>(reader: R) -> Result<Vec<CorpusExample>, IoError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let malformed = |e: csv::Error| IoError::MalformedCsv {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    };
    let headers = rdr.headers().map_err(malformed)?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let need = |name: &str| column(name).ok_or_else(|| IoError::MissingColumn(name.to_string()));
    let (id_col, q_col, d_col) = (need(ID)?, need(QUESTION)?, need(DECOMPOSITION)?);
    let op_col = column(OPERATORS);

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(malformed)?;
        let field = |c: usize| record.get(c).unwrap_or("").to_string();
        let id = field(id_col);
        if !seen.insert(id.clone()) {
            return Err(IoError::DuplicateId(id));
        }
        out.push(CorpusExample {
            id,
            question: field(q_col),
            decomposition: field(d_col),
            operators: op_col.map(|c| parse_operator_list(&field(c))),
        });
    }
    Ok(out)
}

fn parse_operator_list(s: &str) -> Vec<String> {
    s.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(|t| t.trim().trim_matches(|c| c == '\'' || c == '"').to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Examples from an `examples` JSONL artifact.
pub fn read_examples_jsonl(path: impl AsRef<Path>) -> Result<Vec<CorpusExample>, IoError> {
    let examples: Vec<CorpusExample> = read_jsonl(open(path)?)?;
    let mut seen = HashSet::new();
    for e in &examples {
        if !seen.insert(e.id.as_str()) {
            return Err(IoError::DuplicateId(e.id.clone()));
        }
    }
    Ok(examples)
}

/// Reads examples from a `.jsonl` artifact or, for any other extension, a
/// BREAK-style CSV.
pub fn read_examples(path: impl AsRef<Path>) -> Result<Vec<CorpusExample>, IoError> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "jsonl") {
        read_examples_jsonl(path)
    } else {
        read_break_csv(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_rows_and_operator_lists() {
        let text = "question_id,question_text,decomposition,operators\n\
            a,how many cubes?,return cubes ;return number of #1,\"['select', 'aggregate']\"\n\
            b,\"red; or blue\",\"return red ;return blue ;return #1 , #2\",['select']\n";
        let ex = read_break_csv_from(text.as_bytes()).unwrap();
        assert_eq!(ex.len(), 2);
        assert_eq!(ex[0].operators.as_deref(), Some(&["select".to_string(), "aggregate".to_string()][..]));
        assert_eq!(ex[1].question, "red; or blue");
        assert_eq!(ex[1].decomposition, "return red ;return blue ;return #1 , #2");
    }

    #[test]
    fn missing_column_is_reported() {
        let text = "question_id,question_text\na,b\n";
        assert!(matches!(read_break_csv_from(text.as_bytes()), Err(IoError::MissingColumn(c)) if c == "decomposition"));
    }

    #[test]
    fn ragged_rows_are_malformed() {
        let text = "question_id,question_text,decomposition\na,b\n";
        assert!(matches!(read_break_csv_from(text.as_bytes()), Err(IoError::MalformedCsv { line: 2, .. })));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let text = "question_id,question_text,decomposition\na,b,return b\na,c,return c\n";
        assert!(matches!(read_break_csv_from(text.as_bytes()), Err(IoError::DuplicateId(_))));
    }
}
