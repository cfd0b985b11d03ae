use crate::model::{ArgName, ArgToken, Argument, Operator, Property};

/// The argument that receives a step's free text, given the names already
/// filled by references. Step conversion and graph decoding share this, so
/// that text lands in the same slot on both paths.
pub fn text_slot(op: Operator, props: &[Property], present: &[ArgName]) -> ArgName {
    let first_missing = |order: &[ArgName]| -> ArgName {
        order
            .iter()
            .copied()
            .find(|n| !present.contains(n))
            .unwrap_or(order[0])
    };
    match op {
        Operator::Select | Operator::Union => ArgName::Sub,
        Operator::Filter | Operator::Comparative => ArgName::Condition,
        Operator::Project | Operator::Intersection => ArgName::Projection,
        Operator::Aggregate | Operator::Comparison => ArgName::Arg,
        Operator::Sort => ArgName::Order,
        Operator::Group => first_missing(&[ArgName::Value, ArgName::Key]),
        Operator::Superlative => first_missing(&[ArgName::Attribute, ArgName::Sub]),
        Operator::Discard => first_missing(&[ArgName::Exclude, ArgName::Sub]),
        Operator::Boolean => first_missing(&[ArgName::Condition, ArgName::Sub]),
        Operator::Arithmetic => {
            if props.iter().any(|p| matches!(p, Property::Diff | Property::Div)) {
                if present.contains(&ArgName::Left) && present.contains(&ArgName::Right) {
                    ArgName::Right
                } else {
                    first_missing(&[ArgName::Left, ArgName::Right])
                }
            } else {
                ArgName::Arg
            }
        }
    }
}

/// Names an operator must carry after extraction.
pub fn mandatory_arguments(op: Operator, props: &[Property]) -> &'static [ArgName] {
    match op {
        Operator::Select => &[],
        Operator::Filter | Operator::Project | Operator::Comparative | Operator::Boolean => &[ArgName::Sub],
        Operator::Aggregate | Operator::Comparison => &[ArgName::Arg],
        Operator::Group => &[ArgName::Key, ArgName::Value],
        Operator::Superlative => &[ArgName::Sub, ArgName::Attribute],
        Operator::Union => &[ArgName::Sub],
        Operator::Intersection => &[ArgName::Intersect],
        Operator::Discard => &[ArgName::Sub, ArgName::Exclude],
        Operator::Sort => &[ArgName::Sub, ArgName::Order],
        Operator::Arithmetic => {
            if props.iter().any(|p| matches!(p, Property::Diff | Property::Div)) {
                &[ArgName::Left, ArgName::Right]
            } else {
                &[ArgName::Arg]
            }
        }
    }
}

/// A value token with the position used to order merged values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placed {
    pub name: ArgName,
    pub position: usize,
    pub token: ArgToken,
}

/// Builds the argument list. Repeatable names get one argument per
/// reference plus one for any text; other names merge references and text
/// into a single value ordered by position. Arguments appear in order of
/// their first token.
pub fn assemble(op: Operator, placed: Vec<Placed>) -> Vec<Argument> {
    let mut placed = placed;
    placed.sort_by_key(|p| p.position);
    let mut args: Vec<(usize, Argument)> = Vec::new();
    let mut text_arg_of: Vec<(ArgName, usize)> = Vec::new();
    for p in placed {
        if op.is_repeatable(p.name) {
            match &p.token {
                ArgToken::Ref(_) => args.push((p.position, Argument::new(p.name, vec![p.token]))),
                ArgToken::Word(_) => {
                    if let Some((_, i)) = text_arg_of.iter().find(|(n, _)| *n == p.name) {
                        args[*i].1.value.push(p.token);
                    } else {
                        text_arg_of.push((p.name, args.len()));
                        args.push((p.position, Argument::new(p.name, vec![p.token])));
                    }
                }
            }
        } else if let Some((_, a)) = args.iter_mut().find(|(_, a)| a.name == p.name) {
            a.value.push(p.token);
        } else {
            args.push((p.position, Argument::new(p.name, vec![p.token])));
        }
    }
    args.sort_by_key(|(pos, _)| *pos);
    args.into_iter().map(|(_, a)| a).collect()
}
