//! Corpus ingestion and the JSONL artifact formats.
//!
//! Every artifact file starts with a header line naming its schema and
//! version, followed by one JSON record per line. Serialization is
//! deterministic: fields appear in declaration order and floats use the
//! shortest decimal that reads back to the same 32-bit value.

mod corpus;
mod records;
mod tensor_file;

pub use corpus::{read_break_csv, read_break_csv_from, read_examples, read_examples_jsonl, CorpusExample};
pub use records::{AlignmentRecord, DgRecord, LfRecord, RoundTripRecord};
pub use tensor_file::{TensorEncoding, TensorRecord, TensorValues};

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed CSV at line {line}: {message}")]
    MalformedCsv { line: u64, message: String },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("duplicate example id `{0}`")]
    DuplicateId(String),
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("expected a `{expected}` file, found `{found}`")]
    SchemaMismatch { expected: String, found: String },
    #[error("`{schema}` version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch { schema: String, expected: u32, found: u32 },
}

/// The first line of every artifact file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub schema: String,
    pub version: u32,
}

/// A record type stored in its own kind of artifact file.
pub trait Artifact: Serialize + DeserializeOwned {
    const SCHEMA: &'static str;
}

pub fn open(path: impl AsRef<Path>) -> Result<std::fs::File, IoError> {
    let path = path.as_ref();
    std::fs::File::open(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn create(path: impl AsRef<Path>) -> Result<std::fs::File, IoError> {
    let path = path.as_ref();
    std::fs::File::create(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_jsonl<A: Artifact, W: Write>(mut w: W, records: &[A]) -> Result<(), IoError> {
    let header = Header {
        schema: A::SCHEMA.to_string(),
        version: SCHEMA_VERSION,
    };
    writeln!(w, "{}", serde_json::to_string(&header).expect("header serializes"))?;
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| IoError::ParseError {
            line: 0,
            message: e.to_string(),
        })?;
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<A: Artifact, R: Read>(r: R) -> Result<Vec<A>, IoError> {
    let mut lines = BufReader::new(r).lines().enumerate();
    let header: Header = loop {
        match lines.next() {
            None => {
                return Err(IoError::ParseError {
                    line: 1,
                    message: "missing header".into(),
                })
            }
            Some((_, line)) if line.as_ref().is_ok_and(|l| l.trim().is_empty()) => continue,
            Some((i, line)) => {
                break serde_json::from_str(&line?).map_err(|e| IoError::ParseError {
                    line: i + 1,
                    message: format!("bad header: {e}"),
                })?
            }
        }
    };
    if header.schema != A::SCHEMA {
        return Err(IoError::SchemaMismatch {
            expected: A::SCHEMA.into(),
            found: header.schema,
        });
    }
    if header.version != SCHEMA_VERSION {
        return Err(IoError::SchemaVersionMismatch {
            schema: header.schema,
            expected: SCHEMA_VERSION,
            found: header.version,
        });
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| IoError::ParseError {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_jsonl_file<A: Artifact>(path: impl AsRef<Path>, records: &[A]) -> Result<(), IoError> {
    write_jsonl(std::io::BufWriter::new(create(path)?), records)
}

pub fn read_jsonl_file<A: Artifact>(path: impl AsRef<Path>) -> Result<Vec<A>, IoError> {
    read_jsonl(open(path)?)
}
