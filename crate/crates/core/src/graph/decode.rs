use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{graph_log_score, DecodeContext, GraphError, ProbTensor};
use crate::ilp::{solve, IlpError, IlpModel, Sense, SolveStatus, SolverConfig};
use crate::model::{DependencyGraph, DgEdge, EdgeTag, Operation, TokenKind};

/// The decoding program and the arc behind each of its first variables.
#[derive(Clone, Debug)]
pub struct DecodeIlp {
    pub model: IlpModel,
    /// Variable `v < arcs.len()` selects arc `(i, j)` with tag index `t`.
    pub arcs: Vec<(usize, usize, usize)>,
}

impl DecodeIlp {
    pub fn graph(&self, assignment: &[bool], probs: &ProbTensor) -> DependencyGraph {
        let edges = self
            .arcs
            .iter()
            .enumerate()
            .filter(|(v, _)| assignment[*v])
            .map(|(_, &(i, j, t))| DgEdge::new(i, j, probs.tags[t].clone()))
            .collect();
        DependencyGraph::new(probs.n, edges)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeStatus {
    Optimal,
    /// The time limit was hit; the graph is the best valid one found.
    Timeout,
    /// No valid graph was found in time; the empty graph is returned.
    Fallback,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutput {
    pub dg: DependencyGraph,
    /// Log-probability of the returned graph.
    pub objective: f64,
    pub status: DecodeStatus,
}

/// Index lists of the arc variables around each token.
struct ArcIndex {
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

/// Builds the program whose feasible points are exactly the graphs that
/// [`super::validate_dg`] accepts and whose objective is their
/// log-probability.
pub fn build_decode_ilp(probs: &ProbTensor, ctx: &DecodeContext) -> Result<DecodeIlp, GraphError> {
    let n = probs.n;
    if n != ctx.len() {
        return Err(GraphError::SizeMismatch {
            tensor: n,
            question: ctx.len(),
        });
    }
    let kind = |i: usize| ctx.aug.kind(i);
    let tags = &probs.tags;
    let allowed = |i: usize, j: usize, t: usize| {
        i != j
            && match &tags[t] {
                EdgeTag::Span => i < j,
                EdgeTag::Duplicate => kind(i) == TokenKind::Dup && !kind(j).is_structural(),
                EdgeTag::Semantic(_) => true,
            }
    };

    // Arcs are declared best gain first, so that the search settles the
    // promising arcs before the long tail of unlikely ones.
    let mut m = IlpModel::new();
    let mut candidates = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let none = probs.log_p(i, j, None);
            m.objective_constant += none;
            for t in (0..tags.len()).filter(|&t| allowed(i, j, t)) {
                candidates.push((probs.log_p(i, j, Some(t)) - none, (i, j, t)));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut arcs = Vec::with_capacity(candidates.len());
    let mut idx = ArcIndex {
        out: vec![Vec::new(); n],
        inc: vec![Vec::new(); n],
    };
    for (gain, (i, j, t)) in candidates {
        let v = m.add_var(format!("x_{i}_{j}_{}", tags[t]));
        m.add_objective(v, gain);
        arcs.push((i, j, t));
        idx.out[i].push(v);
        idx.inc[j].push(v);
    }
    let tag_of = |v: usize| &tags[arcs[v].2];
    let ones = |vs: &[usize]| vs.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>();

    // One tag per arc.
    let mut per_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (v, &(i, j, _)) in arcs.iter().enumerate() {
        per_pair.entry((i, j)).or_default().push(v);
    }
    for ((i, j), vs) in &per_pair {
        if vs.len() > 1 {
            m.add_constraint(format!("single_{i}_{j}"), ones(vs), Sense::Le, 1.0);
        }
    }

    let filter = |vs: &[usize], f: &dyn Fn(&EdgeTag) -> bool| -> Vec<usize> {
        vs.iter().copied().filter(|&v| f(tag_of(v))).collect()
    };
    let out_span: Vec<Vec<usize>> = (0..n).map(|i| filter(&idx.out[i], &|t| t.is_span())).collect();
    let in_span: Vec<Vec<usize>> = (0..n).map(|i| filter(&idx.inc[i], &|t| t.is_span())).collect();
    let out_dup: Vec<Vec<usize>> = (0..n).map(|i| filter(&idx.out[i], &|t| t.is_duplicate())).collect();
    let in_sem: Vec<Vec<usize>> = (0..n)
        .map(|i| filter(&idx.inc[i], &|t| t.as_semantic().is_some()))
        .collect();

    for i in 0..n {
        for (name, vs) in [("out_span", &out_span[i]), ("in_span", &in_span[i]), ("out_dup", &out_dup[i])] {
            if vs.len() > 1 {
                m.add_constraint(format!("{name}_{i}"), ones(vs), Sense::Le, 1.0);
            }
        }
    }

    // A [DUP] touched by any arc needs an outgoing duplicate arc.
    for i in (0..n).filter(|&i| kind(i) == TokenKind::Dup) {
        let others: Vec<usize> = idx.out[i]
            .iter()
            .chain(&idx.inc[i])
            .copied()
            .filter(|v| !out_dup[i].contains(v))
            .collect();
        if others.is_empty() {
            continue;
        }
        let mut row = ones(&others);
        row.extend(out_dup[i].iter().map(|&v| (v, -(others.len() as f64))));
        m.add_constraint(format!("dup_active_{i}"), row, Sense::Le, 0.0);
    }

    // Outgoing arcs of a token declare a single operation.
    for i in 0..n {
        let mut groups: BTreeMap<Operation, Vec<usize>> = BTreeMap::new();
        for &v in &idx.out[i] {
            if let Some(op) = tag_of(v).operation() {
                groups.entry(op).or_default().push(v);
            }
        }
        if groups.len() < 2 {
            continue;
        }
        let mut ys = Vec::new();
        for (g, vs) in groups.values().enumerate() {
            let y = m.add_var(format!("yout_{i}_{g}"));
            let mut row = ones(vs);
            row.push((y, -(vs.len() as f64)));
            m.add_constraint(format!("yout_up_{i}_{g}"), row, Sense::Le, 0.0);
            let mut row = vec![(y, 1.0)];
            row.extend(vs.iter().map(|&v| (v, -1.0)));
            m.add_constraint(format!("yout_lo_{i}_{g}"), row, Sense::Le, 0.0);
            ys.push((y, 1.0));
        }
        m.add_constraint(format!("one_op_{i}"), ys, Sense::Le, 1.0);
    }

    // A token continuing a span receives no reference arc.
    for j in 0..n {
        if out_span[j].is_empty() || in_sem[j].is_empty() {
            continue;
        }
        let big = in_sem[j].len() as f64;
        let mut row = ones(&in_sem[j]);
        row.extend(out_span[j].iter().map(|&v| (v, big)));
        m.add_constraint(format!("repr_{j}"), row, Sense::Le, big);
    }

    // Content holders, left to right.
    let c: Vec<usize> = (0..n).map(|i| m.add_var(format!("c_{i}"))).collect();
    for i in 0..n {
        let mut terms = Vec::new();
        for &v in &in_span[i] {
            let k = arcs[v].0;
            let ck = m.add_var(format!("c_{k}_{i}"));
            m.add_constraint(format!("cki_up_{k}_{i}"), vec![(ck, 2.0), (v, -1.0), (c[k], -1.0)], Sense::Le, 0.0);
            m.add_constraint(format!("cki_lo_{k}_{i}"), vec![(ck, -1.0), (v, 1.0), (c[k], 1.0)], Sense::Le, 1.0);
            terms.push(ck);
        }
        if kind(i) == TokenKind::Dup {
            terms.extend(out_dup[i].iter().copied().filter(|&v| ctx.meaningful[arcs[v].1]));
        }
        if ctx.meaningful[i] {
            m.add_constraint(format!("c_fix_{i}"), vec![(c[i], 1.0)], Sense::Eq, 1.0);
            continue;
        }
        let mut row = vec![(c[i], 1.0)];
        row.extend(terms.iter().map(|&v| (v, -1.0)));
        m.add_constraint(format!("c_up_{i}"), row, Sense::Le, 0.0);
        if !terms.is_empty() {
            let mut row = ones(&terms);
            row.push((c[i], -(terms.len() as f64)));
            m.add_constraint(format!("c_lo_{i}"), row, Sense::Le, 0.0);
        }
    }

    // Required argument combinations.
    let mut ybar: BTreeMap<(usize, usize), Option<usize>> = BTreeMap::new();
    for i in 0..n {
        let out_by_tag = |t: usize| -> Vec<usize> { idx.out[i].iter().copied().filter(|&v| arcs[v].2 == t).collect() };
        for (q, combo) in ctx.combinations.instances().iter().enumerate() {
            let trig: Vec<usize> = combo
                .trigger
                .iter()
                .filter_map(|t| probs.tag_index(&EdgeTag::Semantic(t.clone())))
                .flat_map(out_by_tag)
                .collect();
            if trig.is_empty() {
                continue;
            }
            let mut s_terms = Vec::new();
            for (tag, k) in &combo.require {
                let Some(t) = probs.tag_index(&EdgeTag::Semantic(tag.clone())) else {
                    continue;
                };
                let xs = out_by_tag(t);
                if xs.is_empty() {
                    continue;
                }
                if *k > 1 {
                    s_terms.extend(xs);
                    continue;
                }
                let y = *ybar.entry((i, t)).or_insert_with(|| {
                    let y = m.add_var(format!("ybar_{i}_{}", tags[t]));
                    let mut row = vec![(y, 1.0)];
                    row.extend(xs.iter().map(|&v| (v, -1.0)));
                    m.add_constraint(format!("ybar_up_{i}_{t}"), row, Sense::Le, 0.0);
                    let mut row = ones(&xs);
                    row.push((y, -(xs.len() as f64)));
                    m.add_constraint(format!("ybar_lo_{i}_{t}"), row, Sense::Le, 0.0);
                    Some(y)
                });
                s_terms.extend(y);
            }
            let size = combo.size() as f64;
            let smax = s_terms.len() as f64;
            let zp = m.add_var(format!("zplus_{i}_{q}"));
            let zm = m.add_var(format!("zminus_{i}_{q}"));
            let mut s_row = ones(&s_terms);
            s_row.push((c[i], 1.0));

            let mut row = s_row.clone();
            row.push((zp, -size));
            m.add_constraint(format!("zplus_up_{i}_{q}"), row, Sense::Ge, 0.0);
            let slack = smax + 2.0 - size;
            if slack > 0.0 {
                let mut row = s_row;
                row.push((zp, -slack));
                m.add_constraint(format!("zplus_lo_{i}_{q}"), row, Sense::Le, size - 1.0);
            }
            let big = trig.len() as f64;
            let mut row = ones(&trig);
            row.push((zm, big));
            m.add_constraint(format!("zminus_up_{i}_{q}"), row, Sense::Le, big);
            let mut row = ones(&trig);
            row.push((zm, 1.0));
            m.add_constraint(format!("zminus_lo_{i}_{q}"), row, Sense::Ge, 1.0);
            m.add_constraint(format!("zeither_{i}_{q}"), vec![(zp, 1.0), (zm, 1.0)], Sense::Ge, 1.0);
        }
    }

    // At most one root span.
    let mut roots = Vec::new();
    for i in 0..n {
        let mut active = idx.out[i].clone();
        active.extend(&in_span[i]);
        if active.is_empty() {
            continue;
        }
        let r1 = m.add_var(format!("r1_{i}"));
        let mut row = vec![(r1, 1.0)];
        row.extend(active.iter().map(|&v| (v, -1.0)));
        m.add_constraint(format!("r1_up_{i}"), row, Sense::Le, 0.0);
        let mut row = ones(&active);
        row.push((r1, -(active.len() as f64)));
        m.add_constraint(format!("r1_lo_{i}"), row, Sense::Le, 0.0);

        let mut blocking = in_sem[i].clone();
        blocking.extend(&out_span[i]);
        if blocking.is_empty() {
            roots.push((r1, 1.0));
            continue;
        }
        let r2 = m.add_var(format!("r2_{i}"));
        let mut row = ones(&blocking);
        row.push((r2, 1.0));
        m.add_constraint(format!("r2_up_{i}"), row, Sense::Ge, 1.0);
        let big = blocking.len() as f64;
        let mut row = ones(&blocking);
        row.push((r2, big));
        m.add_constraint(format!("r2_lo_{i}"), row, Sense::Le, big);

        let r = m.add_var(format!("r_{i}"));
        m.add_constraint(format!("r_up_{i}"), vec![(r, 2.0), (r1, -1.0), (r2, -1.0)], Sense::Le, 0.0);
        m.add_constraint(format!("r_lo_{i}"), vec![(r1, 1.0), (r2, 1.0), (r, -1.0)], Sense::Le, 1.0);
        roots.push((r, 1.0));
    }
    if roots.len() > 1 {
        m.add_constraint("one_root", roots, Sense::Le, 1.0);
    }

    Ok(DecodeIlp { model: m, arcs })
}

/// The most probable valid graph. When the solver finds nothing in time
/// the empty graph, which is always valid, is returned and flagged.
pub fn ilp_decode(probs: &ProbTensor, ctx: &DecodeContext, solver: &SolverConfig) -> Result<DecodeOutput, GraphError> {
    let ilp = build_decode_ilp(probs, ctx)?;
    match solve(&ilp.model, solver) {
        Ok(sol) => {
            let dg = ilp.graph(&sol.assignment, probs);
            Ok(DecodeOutput {
                objective: graph_log_score(probs, &dg),
                dg,
                status: match sol.status {
                    SolveStatus::Optimal => DecodeStatus::Optimal,
                    SolveStatus::Timeout => DecodeStatus::Timeout,
                },
            })
        }
        Err(IlpError::Infeasible | IlpError::TimeoutWithoutIncumbent) => {
            let dg = DependencyGraph::new(probs.n, Vec::new());
            Ok(DecodeOutput {
                objective: graph_log_score(probs, &dg),
                dg,
                status: DecodeStatus::Fallback,
            })
        }
        Err(e) => Err(e.into()),
    }
}
