//! Rule-based conversion of decompositions into logical forms.
//!
//! Each step goes through three detectors: an operator cascade over surface
//! patterns, a longest-match scan for property triggers, and a per-operator
//! template that names the arguments.

mod arguments;
mod properties;

pub use arguments::{assemble, mandatory_arguments, text_slot, Placed};
pub use properties::{match_triggers, resolve_properties, TriggerMatch};

use thiserror::Error;

use crate::lexicon::{Lexicon, Trigger};
use crate::model::{
    is_punctuation, ArgName, ArgToken, Argument, LogicalForm, LogicalFormStep, ModelError, Operator, Property, Qdmr,
    QdmrStep, StepToken,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error(transparent)]
    Parse(#[from] ModelError),
    #[error("step {}: no operator rule applies", .step + 1)]
    UndetectableOperator { step: usize },
    #[error("step {}: conflicting properties {found:?}", .step + 1)]
    ConflictingProperties { step: usize, found: Vec<Property> },
    #[error("step {}: {operator} is missing argument {name}", .step + 1)]
    MissingMandatoryArgument {
        step: usize,
        operator: Operator,
        name: ArgName,
    },
    #[error("step {}: {source}", .step + 1)]
    InvalidStep { step: usize, source: ModelError },
}

impl ConvertError {
    pub fn step(&self) -> Option<usize> {
        match self {
            ConvertError::Parse(_) => None,
            ConvertError::UndetectableOperator { step }
            | ConvertError::ConflictingProperties { step, .. }
            | ConvertError::MissingMandatoryArgument { step, .. }
            | ConvertError::InvalidStep { step, .. } => Some(*step),
        }
    }
}

/// What the detectors saw in one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepTrace {
    pub operator: Operator,
    pub properties: Vec<Property>,
    pub triggers: Vec<TriggerMatch>,
    /// Token positions that ended up in each argument, in argument order.
    pub arguments: Vec<(ArgName, Vec<usize>)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DetectionTrace {
    pub steps: Vec<StepTrace>,
}

pub fn parse_qdmr_text(text: &str) -> Result<Qdmr, ConvertError> {
    Ok(Qdmr::parse(text)?)
}

const BOOLEAN_STARTS: &[&str] = &[
    "if", "is", "are", "was", "were", "does", "do", "did", "has", "have", "can",
];
const DISCARD_MARKERS: &[&str] = &["besides", "excluding", "except"];
const SORT_VERBS: &[&str] = &["ordered", "sorted", "sort", "order"];
const COMPARATIVE_MARKERS: &[&str] = &["where", "with", "that", "whose", "when"];
const UNION_GLUE: &[&str] = &[",", "and", "or"];

fn word(t: &StepToken) -> Option<&str> {
    t.as_word()
}

fn position_of(tokens: &[StepToken], w: &str) -> Option<usize> {
    tokens.iter().position(|t| word(t) == Some(w))
}

fn position_of_any(tokens: &[StepToken], ws: &[&str]) -> Option<usize> {
    tokens.iter().position(|t| word(t).is_some_and(|x| ws.contains(&x)))
}

/// Position of the second word of a bigram whose first word is in `firsts`.
fn bigram(tokens: &[StepToken], firsts: &[&str], second: &str) -> Option<usize> {
    tokens.windows(2).position(|w| {
        word(&w[0]).is_some_and(|a| firsts.contains(&a)) && word(&w[1]) == Some(second)
    })
    .map(|i| i + 1)
}

/// Picks the operator by a fixed rule cascade; more specific surface
/// patterns are tried before generic ones and select is the fallback for
/// steps without references.
pub fn detect_operator(step: &QdmrStep, position: usize, lexicon: &Lexicon) -> Result<Operator, ConvertError> {
    let tokens = &step.tokens;
    let refs = step.refs().count();
    if refs == 0 {
        return Ok(Operator::Select);
    }
    let words: Vec<&str> = tokens.iter().filter_map(word).collect();
    if words.iter().all(|w| is_punctuation(w)) {
        return if refs >= 2 {
            Ok(Operator::Union)
        } else {
            Err(ConvertError::UndetectableOperator { step: position })
        };
    }
    let first = word(&tokens[0]);

    // Count phrases such as "total number of" claim their words before the
    // arithmetic scan, so "total" inside them does not read as a sum.
    let mut consumed = vec![false; tokens.len()];
    let counts: Vec<Trigger> = lexicon
        .triggers(Operator::Aggregate)
        .iter()
        .filter(|t| t.property == Property::Count)
        .cloned()
        .collect();
    match_triggers(tokens, &counts, &mut consumed);
    let arith = match_triggers(tokens, lexicon.triggers(Operator::Arithmetic), &mut consumed);
    if arith.iter().any(|m| m.property != Property::Sum) || (refs >= 2 && !arith.is_empty()) {
        return Ok(Operator::Arithmetic);
    }
    if refs >= 2 && first.is_some_and(|w| w == "which" || w == "who") {
        return Ok(Operator::Comparison);
    }
    if refs >= 2 && position_of(tokens, "both").is_some() && first != Some("if") {
        return Ok(Operator::Intersection);
    }
    if position_of_any(tokens, DISCARD_MARKERS).is_some() {
        return Ok(Operator::Discard);
    }
    if refs >= 2 && words.iter().all(|w| UNION_GLUE.contains(w)) {
        return Ok(Operator::Union);
    }
    if bigram(tokens, SORT_VERBS, "by").is_some() {
        return Ok(Operator::Sort);
    }
    if first.is_some_and(|w| BOOLEAN_STARTS.contains(&w)) {
        return Ok(Operator::Boolean);
    }
    if refs >= 2 {
        // Superlative and comparative phrases compete for the same words
        // ("at least" against "least"), so they are matched jointly.
        let sup = lexicon.triggers(Operator::Superlative);
        let mut joint: Vec<Trigger> = sup.to_vec();
        joint.extend(lexicon.triggers(Operator::Comparative).iter().cloned());
        let mut order: Vec<usize> = (0..joint.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(joint[i].tokens.len()));
        let sorted: Vec<Trigger> = order.iter().map(|&i| joint[i].clone()).collect();
        let mut consumed = vec![false; tokens.len()];
        let found = match_triggers(tokens, &sorted, &mut consumed);
        let from_sup = |m: &TriggerMatch| order[m.trigger] < sup.len();
        if found.iter().any(from_sup) {
            return Ok(Operator::Superlative);
        }
        if !found.is_empty() && position_of_any(tokens, COMPARATIVE_MARKERS).is_some() {
            return Ok(Operator::Comparative);
        }
    }
    if bigram(tokens, &["for"], "each").is_some() {
        return Ok(Operator::Group);
    }
    if refs == 1 {
        let mut consumed = vec![false; tokens.len()];
        let found = match_triggers(tokens, lexicon.triggers(Operator::Aggregate), &mut consumed);
        let residue_empty = tokens.iter().enumerate().all(|(i, t)| match t {
            StepToken::Ref(_) => true,
            StepToken::Word(w) => consumed[i] || lexicon.is_aux(w) || lexicon.is_op(w) || is_punctuation(w),
        });
        if !found.is_empty() && residue_empty {
            return Ok(Operator::Aggregate);
        }
    }
    let starts_with_ref = matches!(tokens[0], StepToken::Ref(_));
    let possessive = tokens.get(1).and_then(word) == Some("'s");
    if starts_with_ref && !possessive {
        Ok(Operator::Filter)
    } else {
        Ok(Operator::Project)
    }
}

/// Scans the operator's trigger phrases and resolves the property set.
pub fn detect_properties(
    step: &QdmrStep,
    position: usize,
    op: Operator,
    lexicon: &Lexicon,
) -> Result<(Vec<Property>, Vec<TriggerMatch>), ConvertError> {
    let mut consumed = vec![false; step.tokens.len()];
    let found = match_triggers(&step.tokens, lexicon.triggers(op), &mut consumed);
    let props = resolve_properties(&found).map_err(|found| ConvertError::ConflictingProperties {
        step: position,
        found,
    })?;
    Ok((props, found))
}

/// Operators whose argument text is kept verbatim, auxiliary words included.
fn keeps_raw_text(op: Operator) -> bool {
    matches!(op, Operator::Select | Operator::Filter | Operator::Project)
}

/// Names the references of a step according to its operator template.
fn reference_names(step: &QdmrStep, op: Operator, props: &[Property], text_before_first_ref: bool) -> Vec<(usize, ArgName)> {
    let tokens = &step.tokens;
    let refs: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| matches!(t, StepToken::Ref(_)))
        .map(|(i, _)| i)
        .collect();
    let split = |at: Option<usize>, before: ArgName, after: ArgName| -> Vec<(usize, ArgName)> {
        let at = at.unwrap_or(usize::MAX);
        refs.iter().map(|&p| (p, if p < at { before } else { after })).collect()
    };
    let by_rank = |names: &[ArgName]| -> Vec<(usize, ArgName)> {
        refs.iter()
            .enumerate()
            .map(|(rank, &p)| (p, names[rank.min(names.len() - 1)]))
            .collect()
    };
    match op {
        Operator::Select => Vec::new(),
        Operator::Filter | Operator::Boolean => by_rank(&[ArgName::Sub, ArgName::Condition]),
        Operator::Project => by_rank(&[ArgName::Sub, ArgName::Projection]),
        Operator::Aggregate | Operator::Comparison => by_rank(&[ArgName::Arg]),
        Operator::Union => by_rank(&[ArgName::Sub]),
        Operator::Superlative => by_rank(&[ArgName::Sub, ArgName::Attribute]),
        Operator::Comparative => by_rank(&[ArgName::Sub, ArgName::Attribute, ArgName::Condition]),
        Operator::Group => split(bigram(tokens, &["for"], "each"), ArgName::Value, ArgName::Key),
        Operator::Intersection => split(position_of(tokens, "both"), ArgName::Projection, ArgName::Intersect),
        Operator::Discard => split(position_of_any(tokens, DISCARD_MARKERS), ArgName::Sub, ArgName::Exclude),
        Operator::Sort => split(bigram(tokens, SORT_VERBS, "by"), ArgName::Sub, ArgName::Order),
        Operator::Arithmetic => {
            if props.iter().any(|p| matches!(p, Property::Diff | Property::Div)) {
                if text_before_first_ref {
                    by_rank(&[ArgName::Right])
                } else {
                    by_rank(&[ArgName::Left, ArgName::Right])
                }
            } else {
                by_rank(&[ArgName::Arg])
            }
        }
    }
}

/// Splits a step into named arguments. References are named by the operator
/// template; the remaining text goes to the operator's text slot. For
/// operators other than select, filter and project, trigger words,
/// connectives, auxiliary words and punctuation are dropped from the text.
pub fn extract_arguments(
    step: &QdmrStep,
    position: usize,
    op: Operator,
    props: &[Property],
    triggers: &[TriggerMatch],
    lexicon: &Lexicon,
) -> Result<(Vec<Argument>, Vec<(ArgName, Vec<usize>)>), ConvertError> {
    let tokens = &step.tokens;
    let mut consumed = vec![false; tokens.len()];
    for m in triggers {
        for p in m.span.clone() {
            if matches!(tokens[p], StepToken::Word(_)) {
                consumed[p] = true;
            }
        }
    }
    let raw = keeps_raw_text(op);
    let text: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let w = word(t)?;
            if is_punctuation(w) {
                return None;
            }
            if !raw && (consumed[i] || lexicon.is_aux(w) || lexicon.is_op(w)) {
                return None;
            }
            Some(i)
        })
        .collect();
    let first_ref = tokens.iter().position(|t| matches!(t, StepToken::Ref(_)));
    let text_before_first_ref = match first_ref {
        Some(r) => text.iter().any(|&i| i < r),
        None => false,
    };
    let named = reference_names(step, op, props, text_before_first_ref);
    let mut present: Vec<ArgName> = named.iter().map(|(_, n)| *n).collect();
    present.dedup();
    let slot = text_slot(op, props, &present);

    let mut placed: Vec<Placed> = named
        .iter()
        .map(|&(p, name)| Placed {
            name,
            position: p,
            token: ArgToken::Ref(tokens[p].as_ref_index().expect("reference position")),
        })
        .collect();
    placed.extend(text.iter().map(|&p| Placed {
        name: slot,
        position: p,
        token: ArgToken::word(word(&tokens[p]).expect("word position")),
    }));

    let mut positions: Vec<(ArgName, Vec<usize>)> = Vec::new();
    for p in &placed {
        match positions.iter_mut().find(|(n, _)| *n == p.name) {
            Some((_, v)) => v.push(p.position),
            None => positions.push((p.name, vec![p.position])),
        }
    }
    for (_, v) in positions.iter_mut() {
        v.sort_unstable();
    }

    let args = assemble(op, placed);
    for &name in mandatory_arguments(op, props) {
        if !args.iter().any(|a| a.name == name) {
            return Err(ConvertError::MissingMandatoryArgument {
                step: position,
                operator: op,
                name,
            });
        }
    }
    Ok((args, positions))
}

/// Converts one step at 0-based `position`.
pub fn convert_step(step: &QdmrStep, position: usize, lexicon: &Lexicon) -> Result<(LogicalFormStep, StepTrace), ConvertError> {
    let operator = detect_operator(step, position, lexicon)?;
    let (properties, triggers) = detect_properties(step, position, operator, lexicon)?;
    let (args, arguments) = extract_arguments(step, position, operator, &properties, &triggers, lexicon)?;
    let lf_step = LogicalFormStep::new(operator, properties.clone(), args);
    lf_step
        .validate(position)
        .map_err(|source| ConvertError::InvalidStep { step: position, source })?;
    Ok((
        lf_step,
        StepTrace {
            operator,
            properties,
            triggers,
            arguments,
        },
    ))
}

pub fn qdmr_to_lf(qdmr: &Qdmr, lexicon: &Lexicon) -> Result<LogicalForm, ConvertError> {
    qdmr_to_lf_traced(qdmr, lexicon).map(|(lf, _)| lf)
}

/// Like [`qdmr_to_lf`], also returning what each detector matched.
pub fn qdmr_to_lf_traced(qdmr: &Qdmr, lexicon: &Lexicon) -> Result<(LogicalForm, DetectionTrace), ConvertError> {
    let mut steps = Vec::with_capacity(qdmr.len());
    let mut trace = DetectionTrace::default();
    for (i, step) in qdmr.steps.iter().enumerate() {
        let (s, t) = convert_step(step, i, lexicon)?;
        steps.push(s);
        trace.steps.push(t);
    }
    Ok((LogicalForm::new(steps), trace))
}

/// Parses and converts decomposition text in one go.
pub fn convert_text(text: &str, lexicon: &Lexicon) -> Result<LogicalForm, ConvertError> {
    qdmr_to_lf(&parse_qdmr_text(text)?, lexicon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_step(text: &str) -> String {
        let lf = convert_text(text, &Lexicon::default()).unwrap();
        lf.steps.last().unwrap().render()
    }

    #[test]
    fn census_decomposition() {
        let lex = Lexicon::default();
        let text = "return census groups ;return #1 that is Pacific islander ;\
            return #1 that is African American ;return size of #2 ;return size of #3 ;\
            return which is lowest of #4 , #5";
        let lf = convert_text(text, &lex).unwrap();
        let ops: Vec<Operator> = lf.steps.iter().map(|s| s.operator).collect();
        assert_eq!(
            ops,
            vec![
                Operator::Select,
                Operator::Filter,
                Operator::Filter,
                Operator::Project,
                Operator::Project,
                Operator::Comparison
            ]
        );
        assert_eq!(lf.steps[5].render(), "COMPARISON[min](arg=#4; arg=#5)");
        assert_eq!(lf.steps[1].render(), "FILTER[](condition=is islander pacific that; sub=#1)");
    }

    #[test]
    fn detects_operators_of_simple_steps() {
        assert_eq!(last_step("return cubes"), "SELECT[](sub=cubes)");
        assert_eq!(last_step("return a ;return #1 from Toronto"), "FILTER[](condition=from toronto; sub=#1)");
        assert_eq!(
            last_step("return a ;return b ;return c ;return d ;return the difference of #3 and #4"),
            "ARITHMETIC[diff](left=#3; right=#4)"
        );
        assert_eq!(
            last_step("return a ;return the difference of 100 and #1"),
            "ARITHMETIC[diff](left=100; right=#1)"
        );
    }

    #[test]
    fn triggers_never_leak_into_arguments() {
        let lf = convert_text("return cubes ;return maximal number of #1", &Lexicon::default()).unwrap();
        assert_eq!(lf.steps[1].render(), "AGGREGATE[max](arg=#1)");
    }

    #[test]
    fn lone_reference_is_undetectable() {
        let err = convert_text("return cubes ;return #1", &Lexicon::default()).unwrap_err();
        assert_eq!(err, ConvertError::UndetectableOperator { step: 1 });
    }

    #[test]
    fn boolean_logic_properties() {
        assert_eq!(
            last_step("return a ;return b ;return if both #1 and #2 are true"),
            "BOOLEAN[and-true](condition=#2; sub=#1)"
        );
        assert_eq!(
            last_step("return a ;return if any #1 are red"),
            "BOOLEAN[if-exists](condition=red; sub=#1)"
        );
    }

    #[test]
    fn superlative_yields_to_comparative_phrases() {
        assert_eq!(
            last_step("return a ;return b ;return #1 where #2 is at least 5"),
            "COMPARATIVE[more](attribute=#2; condition=5; sub=#1)"
        );
    }
}
