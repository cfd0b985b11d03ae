use std::ops::Range;

use crate::lexicon::{Trigger, REF_WILDCARD};
use crate::model::{Property, StepToken};

/// A trigger phrase found in a step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriggerMatch {
    pub property: Property,
    /// Index of the phrase in the trigger list that was searched.
    pub trigger: usize,
    /// Token positions covered by the phrase, wildcards included.
    pub span: Range<usize>,
}

/// Longest phrase first, leftmost occurrence first; a word is consumed by
/// at most one phrase. Wildcards match references without consuming them.
pub fn match_triggers(tokens: &[StepToken], triggers: &[Trigger], consumed: &mut [bool]) -> Vec<TriggerMatch> {
    let mut found = Vec::new();
    for (index, trigger) in triggers.iter().enumerate() {
        let len = trigger.tokens.len();
        if len == 0 || len > tokens.len() {
            continue;
        }
        let mut start = 0;
        while start + len <= tokens.len() {
            let fits = trigger.tokens.iter().enumerate().all(|(o, t)| {
                let pos = start + o;
                match &tokens[pos] {
                    StepToken::Ref(_) => t == REF_WILDCARD,
                    StepToken::Word(w) => t != REF_WILDCARD && w == t && !consumed[pos],
                }
            });
            if fits {
                for pos in start..start + len {
                    if matches!(tokens[pos], StepToken::Word(_)) {
                        consumed[pos] = true;
                    }
                }
                found.push(TriggerMatch {
                    property: trigger.property,
                    trigger: index,
                    span: start..start + len,
                });
                start += len;
            } else {
                start += 1;
            }
        }
    }
    found.sort_by_key(|m| m.span.start);
    found
}

/// Reduces fired properties to the step's property set. Max, min, sum and
/// avg outrank count; any other disagreement is a conflict, reported as the
/// list of distinct survivors.
pub fn resolve_properties(matches: &[TriggerMatch]) -> Result<Vec<Property>, Vec<Property>> {
    let mut props: Vec<Property> = Vec::new();
    for m in matches {
        if !props.contains(&m.property) {
            props.push(m.property);
        }
    }
    let outranks_count = props
        .iter()
        .any(|p| matches!(p, Property::Max | Property::Min | Property::Sum | Property::Avg));
    if outranks_count {
        props.retain(|p| *p != Property::Count);
    }
    props.sort();
    if props.len() > 1 {
        return Err(props);
    }
    Ok(props)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<StepToken> {
        s.split_whitespace()
            .map(|w| match w.strip_prefix('#') {
                Some(k) => StepToken::Ref(k.parse::<usize>().unwrap() - 1),
                None => StepToken::Word(w.to_string()),
            })
            .collect()
    }

    fn trig(p: Property, s: &str) -> Trigger {
        Trigger {
            property: p,
            tokens: s.split_whitespace().map(String::from).collect(),
        }
    }

    #[test]
    fn longest_phrase_wins_and_consumes() {
        let triggers = vec![
            trig(Property::Count, "total number of"),
            trig(Property::Count, "number of"),
            trig(Property::Sum, "total"),
        ];
        let toks = words("the total number of #1");
        let mut consumed = vec![false; toks.len()];
        let m = match_triggers(&toks, &triggers, &mut consumed);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].property, Property::Count);
        assert_eq!(m[0].span, 1..4);
        assert_eq!(resolve_properties(&m).unwrap(), vec![Property::Count]);
    }

    #[test]
    fn max_outranks_count() {
        let triggers = vec![trig(Property::Count, "number of"), trig(Property::Max, "maximal")];
        let toks = words("maximal number of #1");
        let mut consumed = vec![false; toks.len()];
        let m = match_triggers(&toks, &triggers, &mut consumed);
        assert_eq!(m.len(), 2);
        assert_eq!(resolve_properties(&m).unwrap(), vec![Property::Max]);
        assert!(consumed[..3].iter().all(|c| *c));
    }

    #[test]
    fn wildcards_match_references_only() {
        let triggers = vec![trig(Property::AndTrue, "# and # are true")];
        let toks = words("if #1 and #2 are true");
        let mut consumed = vec![false; toks.len()];
        let m = match_triggers(&toks, &triggers, &mut consumed);
        assert_eq!(m.len(), 1);
        assert!(!consumed[1] && consumed[2]);
        let toks = words("if cats and dogs are true");
        let mut consumed = vec![false; toks.len()];
        assert!(match_triggers(&toks, &triggers, &mut consumed).is_empty());
    }

    #[test]
    fn max_and_min_conflict() {
        let triggers = vec![trig(Property::Max, "highest"), trig(Property::Min, "lowest")];
        let toks = words("highest and lowest of #1");
        let mut consumed = vec![false; toks.len()];
        let m = match_triggers(&toks, &triggers, &mut consumed);
        assert_eq!(resolve_properties(&m).unwrap_err(), vec![Property::Max, Property::Min]);
    }
}
