//! The reference rows: one example step for every operator with the
//! logical form it must convert to.

use qdmr_dg::{ArgName, ArgToken, Argument, LogicalFormStep, Operator, Property};

fn w(s: &str) -> Vec<ArgToken> {
    s.split_whitespace().map(ArgToken::word).collect()
}

fn r(k: usize) -> Vec<ArgToken> {
    vec![ArgToken::Ref(k - 1)]
}

fn arg(name: ArgName, value: Vec<ArgToken>) -> Argument {
    Argument::new(name, value)
}

/// Prefixes the step with enough filler selects for its references.
fn with_fillers(step: &str, refs: usize) -> String {
    let mut parts: Vec<String> = (1..=refs).map(|i| format!("return filler{i}")).collect();
    parts.push(format!("return {step}"));
    parts.join(" ;")
}

pub fn reference_rows() -> Vec<(String, LogicalFormStep)> {
    use ArgName::*;
    use Operator as O;
    let step = |op, props: Vec<Property>, args| LogicalFormStep::new(op, props, args);
    vec![
        ("cubes".to_string(), 0, step(O::Select, vec![], vec![arg(Sub, w("cubes"))])),
        (
            "#1 from Toronto".into(),
            1,
            step(O::Filter, vec![], vec![arg(Sub, r(1)), arg(Condition, w("from toronto"))]),
        ),
        (
            "the head coach of #1".into(),
            1,
            step(O::Project, vec![], vec![arg(Projection, w("the head coach of")), arg(Sub, r(1))]),
        ),
        ("maximal number of #1".into(), 1, step(O::Aggregate, vec![Property::Max], vec![arg(Arg, r(1))])),
        (
            "the number of #2 for each #1".into(),
            2,
            step(O::Group, vec![Property::Count], vec![arg(Value, r(2)), arg(Key, r(1))]),
        ),
        (
            "#2 where #3 is the lowest".into(),
            3,
            step(O::Superlative, vec![Property::Min], vec![arg(Sub, r(2)), arg(Attribute, r(3))]),
        ),
        (
            "#1 where #2 is more than 100".into(),
            2,
            step(
                O::Comparative,
                vec![Property::More],
                vec![arg(Sub, r(1)), arg(Attribute, r(2)), arg(Condition, w("100"))],
            ),
        ),
        (
            "which is higher of #1, #2".into(),
            2,
            step(O::Comparison, vec![Property::Max], vec![arg(Arg, r(1)), arg(Arg, r(2))]),
        ),
        ("#1, #2".into(), 2, step(O::Union, vec![], vec![arg(Sub, r(1)), arg(Sub, r(2))])),
        (
            "parties in both #2 and #3".into(),
            3,
            step(
                O::Intersection,
                vec![],
                vec![arg(Projection, w("parties")), arg(Intersect, r(2)), arg(Intersect, r(3))],
            ),
        ),
        (
            "#1 besides #2".into(),
            2,
            step(O::Discard, vec![], vec![arg(Sub, r(1)), arg(Exclude, r(2))]),
        ),
        (
            "#1 ordered by name".into(),
            1,
            step(O::Sort, vec![], vec![arg(Sub, r(1)), arg(Order, w("name"))]),
        ),
        (
            "if #1 is the same as #2".into(),
            2,
            step(O::Boolean, vec![Property::Equals], vec![arg(Sub, r(1)), arg(Condition, r(2))]),
        ),
        (
            "the difference of #3 and #4".into(),
            4,
            step(O::Arithmetic, vec![Property::Diff], vec![arg(Left, r(3)), arg(Right, r(4))]),
        ),
    ]
    .into_iter()
    .map(|(text, refs, expected)| (with_fillers(&text, refs), expected))
    .collect()
}
