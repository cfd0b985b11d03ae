use std::collections::{BTreeMap, BTreeSet};

use super::GraphError;
use crate::align::Alignment;
use crate::model::{
    AugmentedQuestion, DependencyGraph, DgEdge, EdgeTag, LogicalForm, SdgEdge, SemanticTag, SpanDependencyGraph,
    TokenKind,
};

/// Builds the span dependency graph of a logical form.
///
/// Steps are visited in order. A token an earlier step already owns is
/// replaced by the next free `[DUP]`, which remembers the original; a step
/// left without tokens takes the next free `[DUM]`.
pub fn extract_sdg(
    lf: &LogicalForm,
    alignment: &Alignment,
    aug: &AugmentedQuestion,
) -> Result<SpanDependencyGraph, GraphError> {
    let m = lf.len();
    let mut aligned: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for &(i, k, _) in &alignment.pairs {
        if k >= m {
            return Err(GraphError::UnknownStep { step: k, steps: m });
        }
        if i >= aug.len() || !matches!(aug.kind(i), TokenKind::Question | TokenKind::Store) {
            return Err(GraphError::AlignmentOutOfRange { step: k, token: i });
        }
        aligned[k].insert(i);
    }

    let mut claimed: BTreeSet<usize> = BTreeSet::new();
    let mut next_dum = aug.dum.clone();
    let mut next_dup = aug.dup.clone();
    let mut nodes = Vec::with_capacity(m);
    let mut duplicates = Vec::new();
    for (k, tokens) in aligned.into_iter().enumerate() {
        let mut node = Vec::with_capacity(tokens.len());
        for t in tokens {
            if claimed.insert(t) {
                node.push(t);
            } else {
                let d = next_dup.next().ok_or(GraphError::DupExhausted { step: k })?;
                duplicates.push((d, t));
                node.push(d);
            }
        }
        if node.is_empty() {
            node.push(next_dum.next().ok_or(GraphError::DumExhausted { step: k })?);
        }
        node.sort_unstable();
        nodes.push(node);
    }

    let mut tags: BTreeMap<(usize, usize), SemanticTag> = BTreeMap::new();
    for (k, step) in lf.steps.iter().enumerate() {
        for arg in &step.args {
            for target in arg.refs() {
                let tag = SemanticTag::new(step.operator, step.properties.clone(), arg.name);
                match tags.get(&(k, target)) {
                    Some(old) if *old != tag => return Err(GraphError::ConflictingReference { step: k, target }),
                    Some(_) => {}
                    None => {
                        tags.insert((k, target), tag);
                    }
                }
            }
        }
    }
    let edges: Vec<SdgEdge> = tags
        .into_iter()
        .map(|((src, dst), tag)| SdgEdge { src, dst, tag })
        .collect();

    // A [DUP] standing as the rightmost token of a step that refers to the
    // step whose rightmost token it copies would need two tags on one arc.
    for e in &edges {
        let (a, b) = (*nodes[e.src].last().unwrap(), *nodes[e.dst].last().unwrap());
        if duplicates.contains(&(a, b)) {
            return Err(GraphError::DuplicateCollision { step: e.src });
        }
    }

    Ok(SpanDependencyGraph {
        nodes,
        edges,
        duplicates,
    })
}

/// Chains each node left to right with span arcs and hangs every semantic
/// edge between the rightmost tokens of its endpoints.
pub fn sdg_to_dg(sdg: &SpanDependencyGraph, aug: &AugmentedQuestion) -> DependencyGraph {
    let mut edges = Vec::new();
    for node in &sdg.nodes {
        for w in node.windows(2) {
            edges.push(DgEdge::new(w[0], w[1], EdgeTag::Span));
        }
    }
    let rep = |k: usize| sdg.nodes[k].last().copied();
    for e in &sdg.edges {
        if let (Some(a), Some(b)) = (rep(e.src), rep(e.dst)) {
            edges.push(DgEdge::new(a, b, EdgeTag::Semantic(e.tag.clone())));
        }
    }
    for &(d, t) in &sdg.duplicates {
        edges.push(DgEdge::new(d, t, EdgeTag::Duplicate));
    }
    DependencyGraph::new(aug.len(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ArgName, Operator, Question};

    fn aug(text: &str) -> AugmentedQuestion {
        AugmentedQuestion::new(Question::parse(text).unwrap(), &[], 2, 2)
    }

    #[test]
    fn span_chain_and_representative() {
        let sdg = SpanDependencyGraph {
            nodes: vec![vec![0], vec![2, 5, 6]],
            edges: vec![SdgEdge {
                src: 1,
                dst: 0,
                tag: SemanticTag::new(Operator::Filter, vec![], ArgName::Sub),
            }],
            duplicates: vec![],
        };
        let dg = sdg_to_dg(&sdg, &aug("a b c d e f g"));
        let spans: Vec<_> = dg.edges.iter().filter(|e| e.tag.is_span()).map(|e| (e.src, e.dst)).collect();
        assert_eq!(spans, vec![(2, 5), (5, 6)]);
        assert!(dg.edges.iter().any(|e| (e.src, e.dst) == (6, 0) && !e.tag.is_span()));
    }

    #[test]
    fn empty_step_takes_a_dummy() {
        let lf = LogicalForm::new(vec![
            crate::model::LogicalFormStep::parse("SELECT[](sub=cubes)").unwrap(),
            crate::model::LogicalFormStep::parse("AGGREGATE[count](arg=#1)").unwrap(),
        ]);
        let a = aug("how many cubes");
        let sdg = extract_sdg(&lf, &Alignment::new([(2, 0, 0)]), &a).unwrap();
        assert_eq!(sdg.nodes, vec![vec![2], vec![a.dum.start]]);
        assert_eq!(sdg.edges.len(), 1);
    }

    #[test]
    fn shared_token_goes_to_a_dup() {
        let lf = LogicalForm::new(vec![
            crate::model::LogicalFormStep::parse("SELECT[](sub=red cubes)").unwrap(),
            crate::model::LogicalFormStep::parse("SELECT[](sub=red balls)").unwrap(),
            crate::model::LogicalFormStep::parse("UNION[](sub=#1, sub=#2)").unwrap(),
        ]);
        let a = aug("red cubes and balls");
        let al = Alignment::new([(0, 0, 0), (1, 0, 1), (0, 1, 0), (3, 1, 1)]);
        let sdg = extract_sdg(&lf, &al, &a).unwrap();
        assert_eq!(sdg.nodes[1], vec![3, a.dup.start]);
        assert_eq!(sdg.duplicates, vec![(a.dup.start, 0)]);
        let dg = sdg_to_dg(&sdg, &a);
        assert!(dg.edges.contains(&DgEdge::new(a.dup.start, 0, EdgeTag::Duplicate)));
    }

    #[test]
    fn running_out_of_dummies_is_reported() {
        let steps: Vec<_> = (0..3)
            .map(|_| crate::model::LogicalFormStep::parse("SELECT[](sub=x)").unwrap())
            .collect();
        let err = extract_sdg(&LogicalForm::new(steps), &Alignment::default(), &aug("q")).unwrap_err();
        assert_eq!(err, GraphError::DumExhausted { step: 2 });
    }
}
