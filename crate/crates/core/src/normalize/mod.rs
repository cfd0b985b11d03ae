//! Normal forms for logical forms and the exact-match metric built on them.
//!
//! Normalization runs in three stages: argument tokens are cleaned and
//! mapped to representatives, steps that only refine their single referrer
//! are merged into it, and steps are put in a canonical order. Two logical
//! forms match when their normal forms render identically.

mod merge;
mod order;

pub use merge::{apply_merge, merge_sites, merge_steps, merge_steps_traced, MergeRule, MergeSite};
pub use order::{reorder, reorder_traced, step_layer, step_layers};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::Lexicon;
use crate::model::{ArgToken, Argument, LogicalForm, LogicalFormStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("step {} takes part in a reference cycle", .0 + 1)]
    CycleDetected(usize),
    #[error("step {} refers to missing step {}", .step + 1, .target + 1)]
    DanglingReference { step: usize, target: usize },
    #[error("{preds} predictions against {golds} gold forms")]
    LengthMismatch { preds: usize, golds: usize },
}

/// A logical form in canonical order, as rendered step strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedLf {
    pub steps: Vec<String>,
    /// For each output step, the original step indices folded into it.
    pub provenance: Vec<Vec<usize>>,
}

/// Removes trigger words of the step's operator and connectives, then
/// auxiliary words, and maps the rest to their representatives. Argument
/// values become sorted sets; arguments left empty are dropped.
pub fn normalize_tokens(lf: &LogicalForm, lexicon: &Lexicon) -> LogicalForm {
    let steps = lf
        .steps
        .iter()
        .map(|step| {
            let triggers = lexicon.trigger_words(step.operator);
            let is_trigger = |w: &str| {
                triggers.is_some_and(|t| t.contains(w) || t.contains(&lexicon.representative(w)))
            };
            let args = step
                .args
                .iter()
                .filter_map(|a| {
                    let value: BTreeSet<ArgToken> = a
                        .value
                        .iter()
                        .filter_map(|t| match t {
                            ArgToken::Ref(_) => Some(t.clone()),
                            ArgToken::Word(w) => {
                                if is_trigger(w) || lexicon.is_op(w) || lexicon.is_aux(w) {
                                    None
                                } else {
                                    Some(ArgToken::Word(lexicon.representative(w)))
                                }
                            }
                        })
                        .collect();
                    (!value.is_empty()).then(|| Argument::new(a.name, value.into_iter().collect()))
                })
                .collect();
            LogicalFormStep::new(step.operator, step.properties.clone(), args)
        })
        .collect();
    LogicalForm::new(steps)
}

/// Full normalization: tokens, then merges, then reordering.
pub fn normalize(lf: &LogicalForm, lexicon: &Lexicon) -> Result<NormalizedLf, NormalizeError> {
    let tokens = normalize_tokens(lf, lexicon);
    let (merged, provenance) = merge_steps_traced(&tokens);
    let (_, out) = reorder_traced(&merged, &provenance)?;
    Ok(out)
}

/// Exact match of normal forms. A form that fails to normalize never matches.
pub fn lf_em(pred: &LogicalForm, gold: &LogicalForm, lexicon: &Lexicon) -> bool {
    match (normalize(pred, lexicon), normalize(gold, lexicon)) {
        (Ok(p), Ok(g)) => p.steps == g.steps,
        _ => false,
    }
}

/// Mean exact match over a corpus. A missing prediction (for instance one
/// that could not be converted) counts as a miss.
pub fn corpus_lf_em(
    preds: &[Option<LogicalForm>],
    golds: &[LogicalForm],
    lexicon: &Lexicon,
) -> Result<f64, NormalizeError> {
    if preds.len() != golds.len() {
        return Err(NormalizeError::LengthMismatch {
            preds: preds.len(),
            golds: golds.len(),
        });
    }
    if golds.is_empty() {
        return Ok(0.0);
    }
    let hits = preds
        .iter()
        .zip(golds)
        .filter(|(p, g)| p.as_ref().is_some_and(|p| lf_em(p, g, lexicon)))
        .count();
    Ok(hits as f64 / golds.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::convert_text;

    fn lf(text: &str) -> LogicalForm {
        convert_text(text, &Lexicon::default()).unwrap()
    }

    #[test]
    fn triggers_and_aux_are_removed() {
        let lex = Lexicon::default();
        let step = LogicalFormStep::parse("AGGREGATE[max](arg=#1 maximal number of)").unwrap();
        let out = normalize_tokens(&LogicalForm::new(vec![step]), &lex);
        assert_eq!(out.steps[0].render(), "AGGREGATE[max](arg=#1)");
    }

    #[test]
    fn plural_maps_to_singular() {
        let out = normalize_tokens(&lf("return countries"), &Lexicon::default());
        assert_eq!(out.steps[0].render(), "SELECT[](sub=country)");
    }

    #[test]
    fn metal_objects_match() {
        let lex = Lexicon::default();
        assert!(lf_em(&lf("return metal objects"), &lf("return objects ;return #1 that are metal"), &lex));
    }

    #[test]
    fn different_selects_do_not_match() {
        let lex = Lexicon::default();
        assert!(!lf_em(&lf("return cubes"), &lf("return spheres"), &lex));
    }

    #[test]
    fn corpus_average() {
        let lex = Lexicon::default();
        let golds = vec![lf("return cubes"), lf("return cubes")];
        let preds = vec![Some(lf("return cubes")), Some(lf("return spheres"))];
        assert_eq!(corpus_lf_em(&preds, &golds, &lex).unwrap(), 0.5);
        assert!(corpus_lf_em(&preds[..1], &golds, &lex).is_err());
    }
}
