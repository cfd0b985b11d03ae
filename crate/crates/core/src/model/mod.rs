//! Shared value types: questions, decompositions, logical forms, edge tags
//! and graphs.

mod graph;
mod lf;
mod operator;
mod qdmr;
mod tag;

pub use graph::{
    AugmentedQuestion, DependencyGraph, DgEdge, SdgEdge, SpanDependencyGraph, TokenKind,
    DUM_TOKEN, DUP_TOKEN, SEP_TOKEN,
};
pub use lf::{ArgToken, Argument, LogicalForm, LogicalFormStep};
pub use operator::{ArgName, Operator, Property};
pub use qdmr::{is_punctuation, tokenize, Qdmr, QdmrStep, Question, StepToken};
pub use tag::{EdgeTag, Operation, SemanticTag};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("unknown argument name `{0}`")]
    UnknownArgument(String),
    #[error("malformed logical form step: {0}")]
    MalformedStep(String),
    #[error("operator {operator} does not take property {property}")]
    InvalidProperty { operator: Operator, property: Property },
    #[error("operator {operator} does not take argument {name}")]
    InvalidArgument { operator: Operator, name: ArgName },
    #[error("operator {operator} cannot repeat argument {name}")]
    RepeatedArgument { operator: Operator, name: ArgName },
    #[error("step {} refers to step {}, which is not earlier", .step + 1, .target + 1)]
    ForwardReference { step: usize, target: usize },
    #[error("malformed reference {0}")]
    MalformedReference(String),
    #[error("logical form has no steps")]
    EmptyLogicalForm,
    #[error("malformed edge tag `{0}`")]
    MalformedTag(String),
    #[error("decomposition is empty")]
    EmptyDecomposition,
    #[error("step {} is empty", .0 + 1)]
    EmptyStep(usize),
    #[error("question is empty")]
    EmptyQuestion,
    #[error("question contains an empty token")]
    EmptyToken,
}
