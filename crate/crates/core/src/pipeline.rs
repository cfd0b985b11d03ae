//! End-to-end conversions for one example: question and decomposition to a
//! dependency graph, and back to a logical form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{align, AlignConfig, AlignError, AlignOutput};
use crate::convert::{qdmr_to_lf, ConvertError};
use crate::graph::{
    augment_question, dg_to_sdg_soft, CombinationTable, extract_sdg, sdg_to_dg, sdg_to_lf, validate_dg, DecodeContext, GraphError,
    Violation, DEFAULT_K_DUM, DEFAULT_K_DUP,
};
use crate::lexicon::Lexicon;
use crate::model::{AugmentedQuestion, DependencyGraph, LogicalForm, ModelError, Qdmr, Question, SpanDependencyGraph};
use crate::normalize::lf_em;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub align: AlignConfig,
    pub k_dum: usize,
    pub k_dup: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            align: AlignConfig::default(),
            k_dum: DEFAULT_K_DUM,
            k_dup: DEFAULT_K_DUP,
        }
    }
}

/// Which stage an example failed in, and why.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("question: {0}")]
    Question(ModelError),
    #[error("conversion: {0}")]
    Convert(#[from] ConvertError),
    #[error("alignment: {0}")]
    Align(#[from] AlignError),
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error("the extracted graph breaks {} rule(s), first: {}", .0.len(), .0[0])]
    InvalidGraph(Vec<Violation>),
}

impl PipelineError {
    /// Short stage label for reports.
    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Question(_) => "question",
            PipelineError::Convert(_) => "conversion",
            PipelineError::Align(_) => "alignment",
            PipelineError::Graph(_) => "graph",
            PipelineError::InvalidGraph(_) => "validity",
        }
    }
}

/// Every intermediate artifact of the forward direction.
#[derive(Clone, Debug)]
pub struct GraphArtifacts {
    pub lf: LogicalForm,
    pub aug: AugmentedQuestion,
    pub alignment: AlignOutput,
    pub sdg: SpanDependencyGraph,
    pub dg: DependencyGraph,
}

/// Converts, aligns against the question and the store words, and projects
/// the result onto the augmented question.
pub fn qdmr_to_dg(
    question: &str,
    qdmr: &Qdmr,
    lexicon: &Lexicon,
    config: &PipelineConfig,
) -> Result<GraphArtifacts, PipelineError> {
    let question = Question::parse(question).map_err(PipelineError::Question)?;
    let lf = qdmr_to_lf(qdmr, lexicon)?;
    let aug = augment_question(&question, lexicon, config.k_dum, config.k_dup);
    let alignment = align(&aug.tokens[..aug.alignable_len()], qdmr, lexicon, &config.align)?;
    let sdg = extract_sdg(&lf, &alignment.alignment, &aug)?;
    let dg = sdg_to_dg(&sdg, &aug);
    Ok(GraphArtifacts {
        lf,
        aug,
        alignment,
        sdg,
        dg,
    })
}

/// Soft decoding of a graph into a logical form.
pub fn dg_to_lf(dg: &DependencyGraph, aug: &AugmentedQuestion) -> Result<LogicalForm, GraphError> {
    sdg_to_lf(&dg_to_sdg_soft(dg, aug), aug)
}

#[derive(Clone, Debug)]
pub struct RoundTrip {
    pub artifacts: GraphArtifacts,
    pub decoded: LogicalForm,
    /// Whether the decoded form matches the converted one.
    pub matches: bool,
}

/// The forward pipeline followed by soft decoding and a self-match check.
/// A graph that breaks a validity rule counts as a failure.
pub fn roundtrip(
    question: &str,
    qdmr: &Qdmr,
    lexicon: &Lexicon,
    config: &PipelineConfig,
) -> Result<RoundTrip, PipelineError> {
    roundtrip_with(question, qdmr, lexicon, config, &CombinationTable::default())
}

/// [`roundtrip`] with an explicit combination table for the validity check.
pub fn roundtrip_with(
    question: &str,
    qdmr: &Qdmr,
    lexicon: &Lexicon,
    config: &PipelineConfig,
    combinations: &CombinationTable,
) -> Result<RoundTrip, PipelineError> {
    let artifacts = qdmr_to_dg(question, qdmr, lexicon, config)?;
    let ctx = DecodeContext::with_combinations(artifacts.aug.clone(), lexicon, combinations.clone());
    let violations = validate_dg(&artifacts.dg, &ctx);
    if !violations.is_empty() {
        return Err(PipelineError::InvalidGraph(violations));
    }
    let decoded = dg_to_lf(&artifacts.dg, &artifacts.aug)?;
    let matches = lf_em(&decoded, &artifacts.lf, lexicon);
    Ok(RoundTrip {
        artifacts,
        decoded,
        matches,
    })
}
