use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::{Artifact, IoError};
use crate::graph::ProbTensor;
use crate::model::EdgeTag;

/// How the probabilities of a [`TensorRecord`] are written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TensorEncoding {
    /// Little-endian `f32` bytes in `(i, j, t)` order, base64 encoded.
    #[default]
    Base64,
    /// Nested `[i][j][t]` arrays, readable but bulky.
    Nested,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "encoding", content = "values", rename_all = "kebab-case")]
pub enum TensorValues {
    #[serde(rename = "base64-f32le")]
    Base64(String),
    Nested(Vec<Vec<Vec<f32>>>),
}

/// Predicted arc probabilities for one example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub id: String,
    pub n: usize,
    pub tokens: Vec<String>,
    pub tags: Vec<EdgeTag>,
    #[serde(flatten)]
    pub values: TensorValues,
}

impl Artifact for TensorRecord {
    const SCHEMA: &'static str = "tensor";
}

impl TensorRecord {
    pub fn new(id: impl Into<String>, tokens: &[String], tensor: &ProbTensor, encoding: TensorEncoding) -> Self {
        let values = match encoding {
            TensorEncoding::Base64 => {
                let bytes: Vec<u8> = tensor.values.iter().flat_map(|v| v.to_le_bytes()).collect();
                TensorValues::Base64(STANDARD.encode(bytes))
            }
            TensorEncoding::Nested => {
                let k = tensor.tags.len();
                TensorValues::Nested(
                    (0..tensor.n)
                        .map(|i| {
                            (0..tensor.n)
                                .map(|j| (0..k).map(|t| tensor.get(i, j, t)).collect())
                                .collect()
                        })
                        .collect(),
                )
            }
        };
        Self {
            id: id.into(),
            n: tensor.n,
            tokens: tokens.to_vec(),
            tags: tensor.tags.clone(),
            values,
        }
    }

    /// Decodes and validates the probabilities.
    pub fn tensor(&self) -> Result<ProbTensor, IoError> {
        let bad = |message: String| IoError::ParseError {
            line: 0,
            message: format!("{}: {message}", self.id),
        };
        if self.tokens.len() != self.n {
            return Err(bad(format!("n={} but {} tokens", self.n, self.tokens.len())));
        }
        let values = match &self.values {
            TensorValues::Base64(text) => {
                let bytes = STANDARD.decode(text).map_err(|e| bad(e.to_string()))?;
                if bytes.len() % 4 != 0 {
                    return Err(bad(format!("{} bytes is not a whole number of f32 values", bytes.len())));
                }
                bytes
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                    .collect()
            }
            TensorValues::Nested(rows) => {
                let k = self.tags.len();
                if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n || r.iter().any(|c| c.len() != k)) {
                    return Err(bad(format!("nested values are not {}x{}x{k}", self.n, self.n)));
                }
                rows.iter().flatten().flatten().copied().collect()
            }
        };
        ProbTensor::new(self.n, self.tags.clone(), values).map_err(|e| bad(e.to_string()))
    }
}
