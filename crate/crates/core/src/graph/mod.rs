//! Span dependency graphs, their token-level projection, and decoding.
//!
//! A logical form plus an alignment yields a span dependency graph whose
//! nodes are the question tokens of each step. Chaining those tokens with
//! span arcs and attaching reference arcs to each chain's rightmost token
//! gives the dependency graph over the augmented question. Decoding goes
//! the other way, either softly from any graph or through an integer
//! program that picks the most probable graph passing every structural
//! check in [`validate_dg`].

mod combos;
mod decode;
mod oracle;
mod sdg;
mod soft;
mod tensor;
mod validate;

pub use combos::{Combination, CombinationFile, CombinationRow, CombinationTable, Requirement};
pub use decode::{build_decode_ilp, ilp_decode, DecodeIlp, DecodeOutput, DecodeStatus};
pub use oracle::brute_force_decode;
pub use sdg::{extract_sdg, sdg_to_dg};
pub use soft::{dg_to_sdg_soft, sdg_to_lf};
pub use tensor::{graph_log_score, greedy_decode, ProbTensor, TensorError, PROB_FLOOR};
pub use validate::{content_holders, validate_dg, Family, Violation};

use thiserror::Error;

use crate::ilp::IlpError;
use crate::lexicon::Lexicon;
use crate::model::{is_punctuation, AugmentedQuestion, ModelError, Question};

pub const DEFAULT_K_DUM: usize = 4;
pub const DEFAULT_K_DUP: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("step {} needs a [DUM] token but all are taken", .step + 1)]
    DumExhausted { step: usize },
    #[error("step {} needs a [DUP] token but all are taken", .step + 1)]
    DupExhausted { step: usize },
    #[error("step {} refers to step {} under two argument names", .step + 1, .target + 1)]
    ConflictingReference { step: usize, target: usize },
    #[error("step {} is aligned to position {token}, which is not a question or store word", .step + 1)]
    AlignmentOutOfRange { step: usize, token: usize },
    #[error("the alignment mentions step {} but the logical form has {steps} steps", .step + 1)]
    UnknownStep { step: usize, steps: usize },
    #[error("the duplicate arc of step {} coincides with its reference arc", .step + 1)]
    DuplicateCollision { step: usize },
    #[error("node {node} mixes operators in its outgoing edges")]
    InconsistentNode { node: usize },
    #[error("the span dependency graph has a cycle")]
    CyclicSdg,
    #[error("decoded step {} is invalid: {source}", .step + 1)]
    InvalidStep { step: usize, source: ModelError },
    #[error("invalid combination table: {0}")]
    Combinations(String),
    #[error("tensor has {tensor} tokens but the question has {question}")]
    SizeMismatch { tensor: usize, question: usize },
    #[error(transparent)]
    Solver(#[from] IlpError),
}

/// Lays out `question ++ [SEP] ++ store words ++ [DUM]*k_dum ++ [DUP]*k_dup`.
pub fn augment_question(question: &Question, lexicon: &Lexicon, k_dum: usize, k_dup: usize) -> AugmentedQuestion {
    AugmentedQuestion::new(question.clone(), &lexicon.store, k_dum, k_dup)
}

/// Everything the validity checks and the decoder need to know about the
/// tokens of one augmented question.
#[derive(Clone, Debug)]
pub struct DecodeContext {
    pub aug: AugmentedQuestion,
    /// Whether a token counts as content: not structural, not punctuation,
    /// not an auxiliary or operational word.
    pub meaningful: Vec<bool>,
    pub combinations: CombinationTable,
}

impl DecodeContext {
    pub fn new(aug: AugmentedQuestion, lexicon: &Lexicon) -> Self {
        Self::with_combinations(aug, lexicon, CombinationTable::default())
    }

    pub fn with_combinations(aug: AugmentedQuestion, lexicon: &Lexicon, combinations: CombinationTable) -> Self {
        let meaningful = aug
            .tokens
            .iter()
            .zip(&aug.kinds)
            .map(|(w, k)| !k.is_structural() && !is_punctuation(w) && !lexicon.is_aux(w) && !lexicon.is_op(w))
            .collect();
        Self {
            aug,
            meaningful,
            combinations,
        }
    }

    pub fn len(&self) -> usize {
        self.aug.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aug.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_length() {
        let q = Question::parse("what is the largest city").unwrap();
        let mut lex = Lexicon::default();
        lex.store = vec!["a".into(), "b".into(), "c".into()];
        assert_eq!(augment_question(&q, &lex, DEFAULT_K_DUM, DEFAULT_K_DUP).len(), 17);
        lex.store.clear();
        assert_eq!(augment_question(&q, &lex, DEFAULT_K_DUM, DEFAULT_K_DUP).len(), 14);
    }

    #[test]
    fn store_words_follow_separator() {
        let q = Question::parse("show me all cheap tickets").unwrap();
        let mut lex = Lexicon::default();
        lex.store = vec!["flight".into()];
        let aug = augment_question(&q, &lex, 1, 1);
        assert_eq!(aug.tokens[aug.sep_index + 1], "flight");
        assert_eq!(aug.store, 6..7);
    }

    #[test]
    fn meaningful_flags() {
        let q = Question::parse("the red cubes ?").unwrap();
        let lex = Lexicon::default();
        let ctx = DecodeContext::new(augment_question(&q, &lex, 1, 1), &lex);
        assert_eq!(&ctx.meaningful[..5], &[false, true, true, false, false]);
    }
}
