use super::{graph_log_score, validate_dg, DecodeContext, ProbTensor};
use crate::model::{DependencyGraph, DgEdge, EdgeTag, Operation, TokenKind};

/// The most probable graph among all graphs [`validate_dg`] accepts, found
/// by enumerating one choice (no arc or one tag) per ordered token pair.
///
/// Branches are cut when their score cannot beat the best graph so far or
/// when they already break a rule that more arcs cannot mend. Meant for
/// tiny inputs; the work grows exponentially with the number of pairs.
pub fn brute_force_decode(probs: &ProbTensor, ctx: &DecodeContext) -> (f64, DependencyGraph) {
    let n = probs.n;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .collect();
    let diag: f64 = (0..n).map(|i| probs.log_p(i, i, None)).sum();

    let options: Vec<Vec<(Option<usize>, f64)>> = pairs
        .iter()
        .map(|&(i, j)| {
            let mut opts = vec![(None, probs.log_p(i, j, None))];
            opts.extend((0..probs.tags.len()).map(|t| (Some(t), probs.log_p(i, j, Some(t)))));
            opts.sort_by(|a, b| b.1.total_cmp(&a.1));
            opts
        })
        .collect();
    let mut suffix_best = vec![0.0; pairs.len() + 1];
    for p in (0..pairs.len()).rev() {
        suffix_best[p] = suffix_best[p + 1] + options[p][0].1;
    }

    let empty = DependencyGraph::new(n, Vec::new());
    let mut search = Search {
        probs,
        ctx,
        pairs: &pairs,
        options: &options,
        suffix_best: &suffix_best,
        best: (graph_log_score(probs, &empty), empty),
        edges: Vec::new(),
    };
    search.dfs(0, diag);
    search.best
}

struct Search<'a> {
    probs: &'a ProbTensor,
    ctx: &'a DecodeContext,
    pairs: &'a [(usize, usize)],
    options: &'a [Vec<(Option<usize>, f64)>],
    suffix_best: &'a [f64],
    best: (f64, DependencyGraph),
    edges: Vec<DgEdge>,
}

impl Search<'_> {
    fn dfs(&mut self, p: usize, score: f64) {
        if score + self.suffix_best[p] <= self.best.0 + 1e-12 {
            return;
        }
        if p == self.pairs.len() {
            let dg = DependencyGraph::new(self.probs.n, self.edges.clone());
            if validate_dg(&dg, self.ctx).is_empty() {
                self.best = (score, dg);
            }
            return;
        }
        let (i, j) = self.pairs[p];
        for &(choice, lp) in &self.options[p] {
            match choice {
                None => self.dfs(p + 1, score + lp),
                Some(t) => {
                    let edge = DgEdge::new(i, j, self.probs.tags[t].clone());
                    if !self.admissible(&edge) {
                        continue;
                    }
                    self.edges.push(edge);
                    self.dfs(p + 1, score + lp);
                    self.edges.pop();
                }
            }
        }
    }

    /// Rules that adding further arcs can only break further.
    fn admissible(&self, e: &DgEdge) -> bool {
        let kind = |i: usize| self.ctx.aug.kind(i);
        match e.tag {
            EdgeTag::Span if e.src > e.dst => return false,
            EdgeTag::Duplicate if kind(e.src) != TokenKind::Dup || kind(e.dst).is_structural() => return false,
            _ => {}
        }
        let out = |i: usize, f: &dyn Fn(&EdgeTag) -> bool| self.edges.iter().filter(|x| x.src == i && f(&x.tag)).count();
        let inc = |i: usize, f: &dyn Fn(&EdgeTag) -> bool| self.edges.iter().filter(|x| x.dst == i && f(&x.tag)).count();
        let semantic = |t: &EdgeTag| t.as_semantic().is_some();
        match e.tag {
            EdgeTag::Span => {
                if out(e.src, &EdgeTag::is_span) > 0 || inc(e.dst, &EdgeTag::is_span) > 0 || inc(e.src, &semantic) > 0 {
                    return false;
                }
            }
            EdgeTag::Duplicate => {
                if out(e.src, &EdgeTag::is_duplicate) > 0 {
                    return false;
                }
            }
            EdgeTag::Semantic(_) => {
                if out(e.dst, &EdgeTag::is_span) > 0 {
                    return false;
                }
            }
        }
        if let Some(op) = e.tag.operation() {
            let clash = self
                .edges
                .iter()
                .filter(|x| x.src == e.src)
                .filter_map(|x| x.tag.operation())
                .any(|o: Operation| o != op);
            if clash {
                return false;
            }
        }
        true
    }
}
