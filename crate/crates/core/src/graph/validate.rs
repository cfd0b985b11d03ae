use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::DecodeContext;
use crate::model::{DependencyGraph, EdgeTag, Operation, SemanticTag, TokenKind};

/// The structural rule a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    /// An arc endpoint lies outside the augmented question.
    OutOfRange,
    /// Two arcs share both endpoints.
    SingleTag,
    SelfLoop,
    /// A span arc that does not point rightwards.
    SpanDirection,
    /// A duplicate arc that does not go from a `[DUP]` to a word.
    DuplicateLegality,
    /// More than one outgoing or incoming span arc at a token.
    SpanDegree,
    /// More than one outgoing duplicate arc at a token.
    DuplicateDegree,
    /// A `[DUP]` used without naming what it copies.
    DupActivation,
    /// Outgoing arcs of one token declaring different operations.
    OperatorConsistency,
    /// A token inside a span receiving a reference arc.
    Representative,
    /// A required argument combination left incomplete.
    Combination,
    /// More than one root span.
    Connectivity,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub family: Family,
    pub tokens: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {:?}: {}", self.family, self.tokens, self.detail)
    }
}

/// Which tokens belong to a span holding content: a content word itself, a
/// token reached by a span arc from a content-holding token to its left, or
/// a `[DUP]` copying a content word.
pub fn content_holders(dg: &DependencyGraph, ctx: &DecodeContext) -> Vec<bool> {
    let n = ctx.len();
    let mut c = ctx.meaningful.clone();
    c.resize(n, false);
    let mut span_in: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dup_out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &dg.edges {
        if e.src >= n || e.dst >= n {
            continue;
        }
        match e.tag {
            EdgeTag::Span if e.src < e.dst => span_in[e.dst].push(e.src),
            EdgeTag::Duplicate => dup_out[e.src].push(e.dst),
            _ => {}
        }
    }
    for i in 0..n {
        let from_span = span_in[i].iter().any(|&k| c[k]);
        let from_dup = ctx.aug.kind(i) == TokenKind::Dup && dup_out[i].iter().any(|&k| ctx.meaningful[k]);
        c[i] = c[i] || from_span || from_dup;
    }
    c
}

/// Every structural rule the graph breaks. An empty list means the graph
/// is a feasible point of the decoding program.
pub fn validate_dg(dg: &DependencyGraph, ctx: &DecodeContext) -> Vec<Violation> {
    let n = ctx.len();
    let mut out = Vec::new();
    let mut push = |family: Family, tokens: Vec<usize>, detail: String| {
        out.push(Violation { family, tokens, detail });
    };

    let mut seen: BTreeMap<(usize, usize), &EdgeTag> = BTreeMap::new();
    let mut edges = Vec::new();
    for e in &dg.edges {
        if e.src >= n || e.dst >= n {
            push(Family::OutOfRange, vec![e.src, e.dst], format!("{} arc beyond {n} tokens", e.tag));
            continue;
        }
        if let Some(prev) = seen.insert((e.src, e.dst), &e.tag) {
            push(
                Family::SingleTag,
                vec![e.src, e.dst],
                format!("tagged both {prev} and {}", e.tag),
            );
            continue;
        }
        edges.push(e);
    }

    let kind = |i: usize| ctx.aug.kind(i);
    for e in &edges {
        if e.src == e.dst {
            push(Family::SelfLoop, vec![e.src], format!("{} arc to itself", e.tag));
            continue;
        }
        match e.tag {
            EdgeTag::Span if e.src > e.dst => {
                push(Family::SpanDirection, vec![e.src, e.dst], "span arc points left".into());
            }
            EdgeTag::Duplicate if kind(e.src) != TokenKind::Dup || kind(e.dst).is_structural() => {
                push(
                    Family::DuplicateLegality,
                    vec![e.src, e.dst],
                    "duplicate arcs go from a [DUP] to a word".into(),
                );
            }
            _ => {}
        }
    }

    let mut out_span = vec![0usize; n];
    let mut in_span = vec![0usize; n];
    let mut out_dup = vec![0usize; n];
    let mut in_other = vec![0usize; n];
    let mut out_any = vec![0usize; n];
    let mut touched = vec![false; n];
    let mut ops: Vec<BTreeSet<Operation>> = vec![BTreeSet::new(); n];
    let mut tag_count: Vec<BTreeMap<&SemanticTag, usize>> = vec![BTreeMap::new(); n];
    for e in &edges {
        touched[e.src] = true;
        touched[e.dst] = true;
        out_any[e.src] += 1;
        match &e.tag {
            EdgeTag::Span => {
                out_span[e.src] += 1;
                in_span[e.dst] += 1;
            }
            EdgeTag::Duplicate => out_dup[e.src] += 1,
            EdgeTag::Semantic(t) => {
                in_other[e.dst] += 1;
                *tag_count[e.src].entry(t).or_default() += 1;
            }
        }
        if let Some(op) = e.tag.operation() {
            ops[e.src].insert(op);
        }
    }

    for i in 0..n {
        if out_span[i] > 1 {
            push(Family::SpanDegree, vec![i], format!("{} outgoing span arcs", out_span[i]));
        }
        if in_span[i] > 1 {
            push(Family::SpanDegree, vec![i], format!("{} incoming span arcs", in_span[i]));
        }
        if out_dup[i] > 1 {
            push(Family::DuplicateDegree, vec![i], format!("{} outgoing duplicate arcs", out_dup[i]));
        }
        if kind(i) == TokenKind::Dup && touched[i] && out_dup[i] == 0 {
            push(Family::DupActivation, vec![i], "[DUP] used without a duplicate arc".into());
        }
        if ops[i].len() > 1 {
            push(
                Family::OperatorConsistency,
                vec![i],
                format!("{} different operations leave this token", ops[i].len()),
            );
        }
        if out_span[i] > 0 && in_other[i] > 0 {
            push(
                Family::Representative,
                vec![i],
                "a token continuing a span is the target of a reference".into(),
            );
        }
    }

    let c = content_holders(dg, ctx);
    for i in 0..n {
        if tag_count[i].is_empty() {
            continue;
        }
        for combo in ctx.combinations.instances() {
            let count = |t: &SemanticTag| tag_count[i].get(t).copied().unwrap_or(0);
            if combo.trigger.iter().all(|t| count(t) == 0) {
                continue;
            }
            let have: usize = combo.require.iter().map(|(t, k)| count(t).min(*k)).sum::<usize>() + c[i] as usize;
            if have < combo.size() {
                let names: Vec<String> = combo.require.iter().map(|(t, k)| format!("{k}x{}", EdgeTag::Semantic(t.clone()))).collect();
                push(Family::Combination, vec![i], format!("needs {}", names.join(" + ")));
            }
        }
    }

    let roots: Vec<usize> = (0..n)
        .filter(|&i| (out_any[i] > 0 || in_span[i] > 0) && out_span[i] == 0 && in_other[i] == 0)
        .collect();
    if roots.len() > 1 {
        push(Family::Connectivity, roots.clone(), format!("{} root spans", roots.len()));
    }

    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Lexicon;
    use crate::model::{ArgName, AugmentedQuestion, DgEdge, Operator, Question};

    fn ctx(text: &str) -> DecodeContext {
        DecodeContext::new(AugmentedQuestion::new(Question::parse(text).unwrap(), &[], 1, 1), &Lexicon::default())
    }

    fn families(dg: &DependencyGraph, c: &DecodeContext) -> Vec<Family> {
        let mut f: Vec<Family> = validate_dg(dg, c).into_iter().map(|v| v.family).collect();
        f.dedup();
        f
    }

    fn tag(op: Operator, arg: ArgName) -> EdgeTag {
        EdgeTag::semantic(op, vec![], arg)
    }

    #[test]
    fn leftward_span_is_reported() {
        let c = ctx("red cubes");
        let dg = DependencyGraph::new(c.len(), vec![DgEdge::new(1, 0, EdgeTag::Span)]);
        assert_eq!(families(&dg, &c), vec![Family::SpanDirection]);
    }

    #[test]
    fn two_roots_are_reported() {
        let c = ctx("red cubes blue balls");
        let dg = DependencyGraph::new(
            c.len(),
            vec![DgEdge::new(0, 1, EdgeTag::Span), DgEdge::new(2, 3, EdgeTag::Span)],
        );
        assert_eq!(families(&dg, &c), vec![Family::Connectivity]);
    }

    #[test]
    fn valid_filter_graph() {
        let c = ctx("cubes that are red");
        let dg = DependencyGraph::new(c.len(), vec![DgEdge::new(3, 0, tag(Operator::Filter, ArgName::Sub))]);
        assert!(validate_dg(&dg, &c).is_empty());
    }

    #[test]
    fn mixed_operators_are_reported() {
        let c = ctx("cubes spheres red");
        let dg = DependencyGraph::new(
            c.len(),
            vec![
                DgEdge::new(2, 0, tag(Operator::Filter, ArgName::Sub)),
                DgEdge::new(2, 1, tag(Operator::Project, ArgName::Sub)),
            ],
        );
        assert_eq!(families(&dg, &c), vec![Family::OperatorConsistency]);
    }

    #[test]
    fn union_needs_two_subjects_or_content() {
        let c = ctx("cubes , balls");
        let with_text = DependencyGraph::new(c.len(), vec![DgEdge::new(2, 0, tag(Operator::Union, ArgName::Sub))]);
        assert!(validate_dg(&with_text, &c).is_empty());
        let bare = DependencyGraph::new(c.len(), vec![DgEdge::new(1, 0, tag(Operator::Union, ArgName::Sub))]);
        assert_eq!(families(&bare, &c), vec![Family::Combination]);
    }

    #[test]
    fn dup_needs_its_duplicate_arc() {
        let c = ctx("red cubes");
        let dup = c.aug.dup.start;
        let dg = DependencyGraph::new(c.len(), vec![DgEdge::new(dup, 1, tag(Operator::Filter, ArgName::Sub))]);
        assert_eq!(families(&dg, &c), vec![Family::DupActivation]);
        let fixed = DependencyGraph::new(
            c.len(),
            vec![DgEdge::new(dup, 1, tag(Operator::Filter, ArgName::Sub)), DgEdge::new(dup, 0, EdgeTag::Duplicate)],
        );
        assert!(validate_dg(&fixed, &c).is_empty());
    }
}
