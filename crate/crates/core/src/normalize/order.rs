use crate::model::{ArgToken, Argument, LogicalForm, LogicalFormStep};

use super::{NormalizeError, NormalizedLf};

/// Layer of every step: zero without references, otherwise one more than
/// the deepest referenced step.
pub fn step_layers(lf: &LogicalForm) -> Result<Vec<usize>, NormalizeError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done(usize),
    }
    let n = lf.len();
    let mut marks = vec![Mark::New; n];
    for root in 0..n {
        // Explicit stack so deep chains cannot overflow.
        let mut stack = vec![(root, false)];
        while let Some((i, expanded)) = stack.pop() {
            if expanded {
                let mut layer = 0;
                for r in lf.steps[i].refs() {
                    if let Mark::Done(d) = marks[r] {
                        layer = layer.max(d + 1);
                    }
                }
                marks[i] = Mark::Done(layer);
                continue;
            }
            match marks[i] {
                Mark::Done(_) => continue,
                Mark::Active => return Err(NormalizeError::CycleDetected(i)),
                Mark::New => {}
            }
            marks[i] = Mark::Active;
            stack.push((i, true));
            for r in lf.steps[i].refs() {
                if r >= n {
                    return Err(NormalizeError::DanglingReference { step: i, target: r });
                }
                match marks[r] {
                    Mark::Active => return Err(NormalizeError::CycleDetected(r)),
                    Mark::New => stack.push((r, false)),
                    Mark::Done(_) => {}
                }
            }
        }
    }
    Ok(marks
        .into_iter()
        .map(|m| match m {
            Mark::Done(d) => d,
            _ => unreachable!("every step is finished"),
        })
        .collect())
}

pub fn step_layer(lf: &LogicalForm, i: usize) -> Result<usize, NormalizeError> {
    Ok(step_layers(lf)?[i])
}

fn renumber(step: &LogicalFormStep, new_index: &[usize]) -> LogicalFormStep {
    let args = step
        .args
        .iter()
        .map(|a| {
            let value = a
                .value
                .iter()
                .map(|t| match t {
                    ArgToken::Ref(r) => ArgToken::Ref(new_index[*r]),
                    w => w.clone(),
                })
                .collect();
            Argument::new(a.name, value)
        })
        .collect();
    LogicalFormStep::new(step.operator, step.properties.clone(), args)
}

/// Orders steps by layer and, within a layer, by their rendering. Layers
/// are placed one at a time, so when a layer is sorted every reference in
/// it already carries its final index and the comparison does not depend
/// on the input order. Steps that render identically compute the same
/// thing, so references to any of them are pointed at the first copy;
/// otherwise the choice of copy would leak the input order.
pub fn reorder(lf: &LogicalForm) -> Result<NormalizedLf, NormalizeError> {
    let prov: Vec<Vec<usize>> = (0..lf.len()).map(|i| vec![i]).collect();
    reorder_traced(lf, &prov).map(|(_, n)| n)
}

/// Reorders carrying the provenance of each input step along.
pub fn reorder_traced(lf: &LogicalForm, provenance: &[Vec<usize>]) -> Result<(LogicalForm, NormalizedLf), NormalizeError> {
    let layers = step_layers(lf)?;
    let depth = layers.iter().copied().max().map_or(0, |d| d + 1);
    let mut new_index = vec![usize::MAX; lf.len()];
    let mut steps = Vec::with_capacity(lf.len());
    let mut prov = Vec::with_capacity(lf.len());
    for d in 0..depth {
        let mut members: Vec<(String, usize, LogicalFormStep)> = (0..lf.len())
            .filter(|&i| layers[i] == d)
            .map(|i| {
                let s = renumber(&lf.steps[i], &new_index);
                (s.render(), i, s)
            })
            .collect();
        members.sort_by(|a, b| a.0.cmp(&b.0));
        let mut first_copy: Option<(String, usize)> = None;
        for (text, i, s) in members {
            new_index[i] = match &first_copy {
                Some((t, at)) if *t == text => *at,
                _ => {
                    first_copy = Some((text, steps.len()));
                    steps.len()
                }
            };
            steps.push(s);
            prov.push(provenance[i].clone());
        }
    }
    let out = LogicalForm::new(steps);
    let normalized = NormalizedLf {
        steps: out.render(),
        provenance: prov,
    };
    Ok((out, normalized))
}
