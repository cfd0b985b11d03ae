//! Random logical forms and reorderings of them.

use qdmr_dg::{ArgName, ArgToken, Argument, LogicalForm, LogicalFormStep, Operator, Property};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &["red", "cube", "river", "ohio", "metal", "ball", "paris", "yellow", "team", "goal"];

fn words(rng: &mut ChaCha8Rng, max: usize) -> Vec<ArgToken> {
    let n = rng.gen_range(1..=max);
    (0..n).map(|_| ArgToken::word(*WORDS.choose(rng).unwrap())).collect()
}

fn arg(name: ArgName, value: Vec<ArgToken>) -> Argument {
    Argument::new(name, value)
}

/// A random well-formed logical form. Every non-final step is referenced by
/// some later step only by chance, so forms with several sinks and several
/// independent branches both occur.
pub fn random_lf(rng: &mut ChaCha8Rng, len: usize) -> LogicalForm {
    use ArgName::*;
    let mut steps: Vec<LogicalFormStep> = Vec::new();
    for i in 0..len {
        let r = |rng: &mut ChaCha8Rng| ArgToken::Ref(rng.gen_range(0..i));
        let step = if i == 0 || rng.gen_bool(0.3) {
            LogicalFormStep::new(Operator::Select, vec![], vec![arg(Sub, words(rng, 2))])
        } else {
            match rng.gen_range(0..7) {
                0 => LogicalFormStep::new(
                    Operator::Filter,
                    vec![],
                    vec![arg(Sub, vec![r(rng)]), arg(Condition, words(rng, 2))],
                ),
                1 => LogicalFormStep::new(
                    Operator::Project,
                    vec![],
                    vec![arg(Projection, words(rng, 2)), arg(Sub, vec![r(rng)])],
                ),
                2 => LogicalFormStep::new(Operator::Aggregate, vec![Property::Count], vec![arg(Arg, vec![r(rng)])]),
                3 if i >= 2 => {
                    let (a, b) = (r(rng), r(rng));
                    LogicalFormStep::new(Operator::Union, vec![], vec![arg(Sub, vec![a]), arg(Sub, vec![b])])
                }
                4 if i >= 2 => LogicalFormStep::new(
                    Operator::Arithmetic,
                    vec![Property::Diff],
                    vec![arg(Left, vec![r(rng)]), arg(Right, vec![r(rng)])],
                ),
                5 if i >= 2 => LogicalFormStep::new(
                    Operator::Superlative,
                    vec![Property::Max],
                    vec![arg(Sub, vec![r(rng)]), arg(Attribute, vec![r(rng)])],
                ),
                _ => LogicalFormStep::new(
                    Operator::Sort,
                    vec![],
                    vec![arg(Sub, vec![r(rng)]), arg(Order, words(rng, 1))],
                ),
            }
        };
        steps.push(step);
    }
    let lf = LogicalForm::new(steps);
    lf.validate().expect("generator produces valid forms");
    lf
}

/// The same form with its steps in another topological order.
pub fn permute(rng: &mut ChaCha8Rng, lf: &LogicalForm) -> LogicalForm {
    let n = lf.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let ready: Vec<usize> = (0..n)
            .filter(|&i| !placed[i] && lf.steps[i].refs().iter().all(|&k| placed[k]))
            .collect();
        let pick = *ready.choose(rng).unwrap();
        placed[pick] = true;
        order.push(pick);
    }
    let mut new_index = vec![0; n];
    for (pos, &old) in order.iter().enumerate() {
        new_index[old] = pos;
    }
    let steps = order
        .iter()
        .map(|&old| {
            let s = &lf.steps[old];
            let args = s
                .args
                .iter()
                .map(|a| {
                    let value = a
                        .value
                        .iter()
                        .map(|t| match t {
                            ArgToken::Ref(k) => ArgToken::Ref(new_index[*k]),
                            w => w.clone(),
                        })
                        .collect();
                    Argument::new(a.name, value)
                })
                .collect();
            LogicalFormStep::new(s.operator, s.properties.clone(), args)
        })
        .collect();
    LogicalForm::new(steps)
}
