use std::collections::{BTreeMap, BTreeSet};

use super::GraphError;
use crate::convert::{assemble, text_slot, Placed};
use crate::model::{
    ArgToken, AugmentedQuestion, DependencyGraph, EdgeTag, LogicalForm, LogicalFormStep, Operator, SdgEdge,
    SpanDependencyGraph, TokenKind,
};

/// Recovers a span dependency graph from any dependency graph.
///
/// A token with several span parents keeps only the leftmost. Tokens
/// joined by span arcs, in either direction, form one node; a lone token
/// becomes a node when a reference arc touches it or it copies another
/// token. Nodes are numbered by their leftmost token. Reference arcs inside
/// one node are dropped and parallel ones collapse.
pub fn dg_to_sdg_soft(dg: &DependencyGraph, aug: &AugmentedQuestion) -> SpanDependencyGraph {
    let n = dg.token_count.max(aug.len());
    let in_range = |i: usize| i < n;

    let mut span_parent: Vec<Option<usize>> = vec![None; n];
    for e in dg.edges.iter().filter(|e| e.tag.is_span() && in_range(e.src) && in_range(e.dst) && e.src != e.dst) {
        let p = &mut span_parent[e.dst];
        if p.is_none_or(|old| e.src < old) {
            *p = Some(e.src);
        }
    }

    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    let mut in_node = vec![false; n];
    for (child, parent) in span_parent.iter().enumerate() {
        if let Some(parent) = *parent {
            in_node[child] = true;
            in_node[parent] = true;
            let (a, b) = (find(&mut root, child), find(&mut root, parent));
            root[a.max(b)] = a.min(b);
        }
    }
    let mut duplicates = BTreeSet::new();
    for e in dg.edges.iter().filter(|e| in_range(e.src) && in_range(e.dst) && e.src != e.dst) {
        match e.tag {
            EdgeTag::Semantic(_) => {
                in_node[e.src] = true;
                in_node[e.dst] = true;
            }
            EdgeTag::Duplicate => {
                in_node[e.src] = true;
                duplicates.insert((e.src, e.dst));
            }
            EdgeTag::Span => {}
        }
    }

    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in (0..n).filter(|&i| in_node[i]) {
        let r = find(&mut root, i);
        members.entry(r).or_default().push(i);
    }
    // Union by minimum keeps each component's root at its leftmost token,
    // so map order is node order.
    let mut node_of = vec![usize::MAX; n];
    let nodes: Vec<Vec<usize>> = members.into_values().collect();
    for (k, node) in nodes.iter().enumerate() {
        for &t in node {
            node_of[t] = k;
        }
    }

    let mut edges: BTreeSet<SdgEdge> = BTreeSet::new();
    for e in &dg.edges {
        if let EdgeTag::Semantic(tag) = &e.tag {
            if !in_range(e.src) || !in_range(e.dst) {
                continue;
            }
            let (a, b) = (node_of[e.src], node_of[e.dst]);
            if a != b {
                edges.insert(SdgEdge {
                    src: a,
                    dst: b,
                    tag: tag.clone(),
                });
            }
        }
    }

    SpanDependencyGraph {
        nodes,
        edges: edges.into_iter().collect(),
        duplicates: duplicates.into_iter().collect(),
    }
}

/// Reads a logical form off a span dependency graph.
///
/// Steps follow a topological order in which referenced nodes come first,
/// ties going to the lower node index. Each node's outgoing tags fix its
/// operator and argument names; a node without outgoing edges is a
/// selection. The node's words fill the operator's free-text slot, with a
/// `[DUP]` reading as the word it copies.
pub fn sdg_to_lf(sdg: &SpanDependencyGraph, aug: &AugmentedQuestion) -> Result<LogicalForm, GraphError> {
    let m = sdg.nodes.len();
    let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); m];
    for e in &sdg.edges {
        if e.src >= m || e.dst >= m || e.src == e.dst {
            return Err(GraphError::CyclicSdg);
        }
        if deps[e.src].insert(e.dst) {
            users[e.dst].push(e.src);
        }
    }

    let mut remaining: Vec<usize> = deps.iter().map(BTreeSet::len).collect();
    let mut ready: BTreeSet<usize> = (0..m).filter(|&k| remaining[k] == 0).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(k) = ready.pop_first() {
        order.push(k);
        for &u in &users[k] {
            remaining[u] -= 1;
            if remaining[u] == 0 {
                ready.insert(u);
            }
        }
    }
    if order.len() < m {
        return Err(GraphError::CyclicSdg);
    }
    let mut step_of = vec![0usize; m];
    for (s, &k) in order.iter().enumerate() {
        step_of[k] = s;
    }

    let mut steps = Vec::with_capacity(m);
    for (s, &k) in order.iter().enumerate() {
        let out: Vec<&SdgEdge> = sdg.edges.iter().filter(|e| e.src == k).collect();
        let (operator, properties) = match out.first() {
            None => (Operator::Select, Vec::new()),
            Some(first) => {
                let head = (&first.tag.operator, &first.tag.properties);
                if out.iter().any(|e| (&e.tag.operator, &e.tag.properties) != head) {
                    return Err(GraphError::InconsistentNode { node: k });
                }
                (first.tag.operator, first.tag.properties.clone())
            }
        };

        let mut placed: Vec<Placed> = out
            .iter()
            .map(|e| Placed {
                name: e.tag.arg,
                position: sdg.nodes[e.dst].first().copied().unwrap_or(0),
                token: ArgToken::Ref(step_of[e.dst]),
            })
            .collect();
        let present: Vec<_> = out.iter().map(|e| e.tag.arg).collect();
        let slot = text_slot(operator, &properties, &present);
        for &t in &sdg.nodes[k] {
            let source = match aug.kinds.get(t) {
                Some(TokenKind::Question | TokenKind::Store) => t,
                Some(TokenKind::Dup) => match sdg.duplicate_target(t) {
                    Some(orig) if orig < aug.len() && !aug.kind(orig).is_structural() => orig,
                    _ => continue,
                },
                _ => continue,
            };
            placed.push(Placed {
                name: slot,
                position: source,
                token: ArgToken::Word(aug.tokens[source].clone()),
            });
        }

        let step = LogicalFormStep::new(operator, properties, assemble(operator, placed));
        step.validate(s).map_err(|source| GraphError::InvalidStep { step: s, source })?;
        steps.push(step);
    }
    Ok(LogicalForm::new(steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sdg_to_dg;
    use crate::model::{ArgName, DgEdge, Question, SemanticTag};

    fn aug(text: &str) -> AugmentedQuestion {
        AugmentedQuestion::new(Question::parse(text).unwrap(), &[], 2, 2)
    }

    fn tag(op: Operator, arg: ArgName) -> SemanticTag {
        SemanticTag::new(op, vec![], arg)
    }

    #[test]
    fn single_node_is_a_selection() {
        let a = aug("cubes");
        let sdg = SpanDependencyGraph {
            nodes: vec![vec![0]],
            edges: vec![],
            duplicates: vec![],
        };
        assert_eq!(sdg_to_lf(&sdg, &a).unwrap().render(), vec!["SELECT[](sub=cubes)"]);
    }

    #[test]
    fn mixed_operators_are_rejected() {
        let a = aug("cubes balls red");
        let sdg = SpanDependencyGraph {
            nodes: vec![vec![0], vec![1], vec![2]],
            edges: vec![
                SdgEdge { src: 2, dst: 0, tag: tag(Operator::Filter, ArgName::Sub) },
                SdgEdge { src: 2, dst: 1, tag: tag(Operator::Project, ArgName::Sub) },
            ],
            duplicates: vec![],
        };
        assert_eq!(sdg_to_lf(&sdg, &a).unwrap_err(), GraphError::InconsistentNode { node: 2 });
    }

    #[test]
    fn stray_span_joins_one_component() {
        let a = aug("a b c d");
        let dg = DependencyGraph::new(
            a.len(),
            vec![
                DgEdge::new(0, 1, EdgeTag::Span),
                DgEdge::new(1, 2, EdgeTag::Span),
                DgEdge::new(0, 2, EdgeTag::Span),
            ],
        );
        assert_eq!(dg_to_sdg_soft(&dg, &a).nodes, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn soft_decoding_inverts_projection() {
        let a = aug("red cubes and red balls");
        let sdg = SpanDependencyGraph {
            nodes: vec![vec![0, 1], vec![2], vec![3, 4]],
            edges: vec![
                SdgEdge { src: 1, dst: 0, tag: tag(Operator::Union, ArgName::Sub) },
                SdgEdge { src: 1, dst: 2, tag: tag(Operator::Union, ArgName::Sub) },
            ],
            duplicates: vec![],
        };
        let back = dg_to_sdg_soft(&sdg_to_dg(&sdg, &a), &a);
        assert_eq!(back, sdg);
    }

    #[test]
    fn cycles_are_rejected() {
        let a = aug("a b");
        let sdg = SpanDependencyGraph {
            nodes: vec![vec![0], vec![1]],
            edges: vec![
                SdgEdge { src: 0, dst: 1, tag: tag(Operator::Filter, ArgName::Sub) },
                SdgEdge { src: 1, dst: 0, tag: tag(Operator::Filter, ArgName::Sub) },
            ],
            duplicates: vec![],
        };
        assert_eq!(sdg_to_lf(&sdg, &a).unwrap_err(), GraphError::CyclicSdg);
    }
}
