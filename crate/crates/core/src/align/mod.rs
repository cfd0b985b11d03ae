//! Token alignment between a question and the steps of its decomposition.
//!
//! Every step word that has an equivalent question word must be aligned to
//! at least one of them. Among such alignments the integer program prefers,
//! in strict priority order: fewer aligned pairs, question words shared by
//! fewer steps, longer aligned runs, and then exact string matches together
//! with adjacency between a step and the steps it references.

mod oracle;

pub use oracle::brute_force_alignment;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ilp::{solve, IlpError, IlpModel, Sense, SolveStatus, SolverConfig};
use crate::lexicon::Lexicon;
use crate::model::{is_punctuation, Qdmr, DUM_TOKEN, DUP_TOKEN, SEP_TOKEN};

/// Question position `i`, step `k` and step token position `j`, 0-based.
pub type AlignedPair = (usize, usize, usize);

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    /// Sorted and free of duplicates.
    pub pairs: Vec<AlignedPair>,
}

impl Alignment {
    pub fn new(pairs: impl IntoIterator<Item = AlignedPair>) -> Self {
        let set: BTreeSet<AlignedPair> = pairs.into_iter().collect();
        Self {
            pairs: set.into_iter().collect(),
        }
    }

    /// Question positions aligned to some token of step `k`.
    pub fn question_tokens_of(&self, k: usize) -> BTreeSet<usize> {
        self.pairs.iter().filter(|p| p.1 == k).map(|p| p.0).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Which pairs may be aligned (`a`), which are exact matches (`b`) and
/// which steps reference which (`r`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateMatrix {
    pub n: usize,
    pub step_lens: Vec<usize>,
    /// `a[k][j][i]`
    pub a: Vec<Vec<Vec<bool>>>,
    /// `b[k][j][i]`; implies `a`.
    pub b: Vec<Vec<Vec<bool>>>,
    /// `r[k][k2]`: step `k` references the earlier step `k2`.
    pub r: Vec<Vec<bool>>,
}

impl CandidateMatrix {
    pub fn num_steps(&self) -> usize {
        self.step_lens.len()
    }

    pub fn is_candidate(&self, i: usize, k: usize, j: usize) -> bool {
        self.a[k][j][i]
    }

    /// All candidate pairs in `(k, j, i)` order.
    pub fn pairs(&self) -> Vec<AlignedPair> {
        let mut out = Vec::new();
        for (k, rows) in self.a.iter().enumerate() {
            for (j, row) in rows.iter().enumerate() {
                for (i, &ok) in row.iter().enumerate() {
                    if ok {
                        out.push((i, k, j));
                    }
                }
            }
        }
        out
    }

    /// Step tokens that have at least one candidate and so must be covered.
    pub fn coverable(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, rows) in self.a.iter().enumerate() {
            for (j, row) in rows.iter().enumerate() {
                if row.iter().any(|&x| x) {
                    out.push((k, j));
                }
            }
        }
        out
    }
}

fn alignable_word(w: &str, lexicon: &Lexicon) -> bool {
    !(w == SEP_TOKEN
        || w == DUM_TOKEN
        || w == DUP_TOKEN
        || is_punctuation(w)
        || lexicon.is_aux(w)
        || lexicon.is_op(w))
}

/// Candidates between `question` (question words, optionally followed by
/// the separator and store words) and the step words of `qdmr`. Two words
/// are candidates when they are identical or equivalent and neither is an
/// auxiliary word, a connective, punctuation or a placeholder.
pub fn build_candidates(question: &[String], qdmr: &Qdmr, lexicon: &Lexicon) -> CandidateMatrix {
    let n = question.len();
    let reps: Vec<Option<String>> = question
        .iter()
        .map(|q| alignable_word(q, lexicon).then(|| lexicon.representative(q)))
        .collect();
    let m = qdmr.len();
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    let mut r = vec![vec![false; m]; m];
    for (k, step) in qdmr.steps.iter().enumerate() {
        let mut ak = Vec::with_capacity(step.len());
        let mut bk = Vec::with_capacity(step.len());
        for tok in &step.tokens {
            let mut arow = vec![false; n];
            let mut brow = vec![false; n];
            if let Some(w) = tok.as_word().filter(|w| alignable_word(w, lexicon)) {
                let rep = lexicon.representative(w);
                for i in 0..n {
                    if let Some(qrep) = &reps[i] {
                        let exact = question[i] == w;
                        if exact || *qrep == rep {
                            arow[i] = true;
                            brow[i] = exact;
                        }
                    }
                }
            }
            ak.push(arow);
            bk.push(brow);
        }
        for target in step.refs() {
            r[k][target] = true;
        }
        a.push(ak);
        b.push(bk);
    }
    CandidateMatrix {
        n,
        step_lens: qdmr.steps.iter().map(|s| s.len()).collect(),
        a,
        b,
        r,
    }
}

/// Objective weights; each must dominate the total of all weaker terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignWeights {
    pub min: i64,
    pub unique: i64,
    pub seq: i64,
    pub exact: i64,
    pub reference: i64,
}

impl Default for AlignWeights {
    fn default() -> Self {
        Self {
            min: 1_000_000,
            unique: 10_000,
            seq: 100,
            exact: 1,
            reference: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignConfig {
    pub weights: AlignWeights,
    /// Longest run, in extra tokens, that earns a sequence bonus.
    pub max_run: usize,
    pub solver: SolverConfig,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            weights: AlignWeights::default(),
            max_run: 6,
            solver: SolverConfig::default(),
        }
    }
}

/// The integer program together with the meaning of its pair variables.
#[derive(Clone, Debug)]
pub struct AlignmentIlp {
    pub model: IlpModel,
    /// `(pair, variable)` for every candidate pair.
    pub x: Vec<(AlignedPair, usize)>,
}

/// Builds the alignment program. Variables exist only where they can be
/// true: pair variables for candidates, run variables for runs of
/// candidates, adjacency variables for referencing step pairs, and
/// sharing variables up to the number of steps that can use a question
/// word.
pub fn build_alignment_ilp(cand: &CandidateMatrix, config: &AlignConfig) -> AlignmentIlp {
    let w = config.weights;
    let n = cand.n;
    let m = cand.num_steps();
    let mut model = IlpModel::new();
    // x[k][j][i]
    let mut xv: Vec<Vec<Vec<Option<usize>>>> = cand
        .step_lens
        .iter()
        .map(|&len| vec![vec![None; n]; len])
        .collect();
    let mut pairs = Vec::new();
    for (k, rows) in cand.a.iter().enumerate() {
        for (j, row) in rows.iter().enumerate() {
            for (i, &ok) in row.iter().enumerate() {
                if ok {
                    let v = model.add_var(format!("x_{k}_{i}_{j}"));
                    let exact = if cand.b[k][j][i] { w.exact } else { 0 };
                    model.add_objective(v, (exact - w.min) as f64);
                    xv[k][j][i] = Some(v);
                    pairs.push(((i, k, j), v));
                }
            }
        }
    }

    // Coverage, in the form n * sum x >= number of candidates.
    for (k, j) in cand.coverable() {
        let coeffs: Vec<(usize, f64)> = xv[k][j].iter().flatten().map(|&v| (v, n as f64)).collect();
        let count = cand.a[k][j].iter().filter(|&&x| x).count();
        model.add_constraint(format!("cover_{k}_{j}"), coeffs, Sense::Ge, count as f64);
    }

    // Token-level links: xk[k][i] is the disjunction of x[k][.][i].
    let mut xk: Vec<Vec<Option<usize>>> = vec![vec![None; n]; m];
    for k in 0..m {
        for i in 0..n {
            let terms: Vec<usize> = (0..cand.step_lens[k]).filter_map(|j| xv[k][j][i]).collect();
            if terms.is_empty() {
                continue;
            }
            let v = model.add_var(format!("xk_{k}_{i}"));
            xk[k][i] = Some(v);
            let mut lower = vec![(v, -1.0)];
            lower.extend(terms.iter().map(|&t| (t, 1.0)));
            model.add_constraint(format!("link_lo_{k}_{i}"), lower, Sense::Ge, 0.0);
            let mut upper = vec![(v, terms.len() as f64)];
            upper.extend(terms.iter().map(|&t| (t, -1.0)));
            model.add_constraint(format!("link_hi_{k}_{i}"), upper, Sense::Ge, 0.0);
        }
    }

    // Runs: y is the conjunction of d+1 diagonal pair variables.
    for k in 0..m {
        for j in 0..cand.step_lens[k] {
            for i in 0..n {
                for d in 1..=config.max_run {
                    if i + d >= n || j + d >= cand.step_lens[k] {
                        break;
                    }
                    let run: Option<Vec<usize>> = (0..=d).map(|p| xv[k][j + p][i + p]).collect();
                    let Some(run) = run else { break };
                    let y = model.add_var(format!("y_{k}_{d}_{i}_{j}"));
                    model.add_objective(y, w.seq as f64);
                    let mut lo = vec![(y, -((d + 1) as f64))];
                    lo.extend(run.iter().map(|&x| (x, 1.0)));
                    model.add_constraint(format!("run_lo_{k}_{d}_{i}_{j}"), lo, Sense::Ge, 0.0);
                    let mut hi = vec![(y, 1.0)];
                    hi.extend(run.iter().map(|&x| (x, -1.0)));
                    model.add_constraint(format!("run_hi_{k}_{d}_{i}_{j}"), hi, Sense::Ge, -(d as f64));
                }
            }
        }
    }

    // Adjacency between a step and a step it references; the reference
    // indicator is a constant 1 here and is folded into the right-hand side.
    for k in 0..m {
        for k2 in 0..m {
            if !cand.r[k][k2] {
                continue;
            }
            for i in 0..n {
                let Some(a) = xk[k][i] else { continue };
                for (label, neighbour) in [("p", i.checked_add(1)), ("m", i.checked_sub(1))] {
                    let Some(b) = neighbour.filter(|&t| t < n).and_then(|t| xk[k2][t]) else {
                        continue;
                    };
                    let z = model.add_var(format!("z{label}_{k}_{k2}_{i}"));
                    model.add_objective(z, w.reference as f64);
                    model.add_constraint(
                        format!("adj_lo_{label}_{k}_{k2}_{i}"),
                        vec![(z, -3.0), (a, 1.0), (b, 1.0)],
                        Sense::Ge,
                        -1.0,
                    );
                    model.add_constraint(
                        format!("adj_hi_{label}_{k}_{k2}_{i}"),
                        vec![(z, 1.0), (a, -1.0), (b, -1.0)],
                        Sense::Ge,
                        -1.0,
                    );
                }
            }
        }
    }

    // Sharing: u[d][i] is on when at least d steps use question word i.
    for i in 0..n {
        let users: Vec<usize> = (0..m).filter_map(|k| xk[k][i]).collect();
        let total = users.len();
        for d in 1..=total {
            let u = model.add_var(format!("u_{d}_{i}"));
            model.add_objective(u, -(w.unique as f64));
            let mut lo = vec![(u, -(d as f64))];
            lo.extend(users.iter().map(|&x| (x, 1.0)));
            model.add_constraint(format!("share_lo_{d}_{i}"), lo, Sense::Ge, 0.0);
            let mut hi = vec![(u, -(total as f64))];
            hi.extend(users.iter().map(|&x| (x, 1.0)));
            model.add_constraint(format!("share_hi_{d}_{i}"), hi, Sense::Le, (d - 1) as f64);
        }
    }

    AlignmentIlp { model, x: pairs }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignOutput {
    pub alignment: Alignment,
    /// Step words with no candidate at all, left unaligned.
    pub uncovered: Vec<(usize, usize)>,
    pub objective: i64,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlignError {
    #[error("alignment solver failed: {0}")]
    Solver(#[from] IlpError),
}

/// Aligns `question` (question words, optionally followed by the separator
/// and store words) with the steps of `qdmr`.
pub fn align(question: &[String], qdmr: &Qdmr, lexicon: &Lexicon, config: &AlignConfig) -> Result<AlignOutput, AlignError> {
    let cand = build_candidates(question, qdmr, lexicon);
    align_candidates(&cand, qdmr, lexicon, config)
}

pub fn align_candidates(
    cand: &CandidateMatrix,
    qdmr: &Qdmr,
    lexicon: &Lexicon,
    config: &AlignConfig,
) -> Result<AlignOutput, AlignError> {
    let ilp = build_alignment_ilp(cand, config);
    let solution = solve(&ilp.model, &config.solver)?;
    let alignment = Alignment::new(ilp.x.iter().filter(|(_, v)| solution.value(*v)).map(|(p, _)| *p));
    let mut uncovered = Vec::new();
    for (k, step) in qdmr.steps.iter().enumerate() {
        for (j, tok) in step.tokens.iter().enumerate() {
            let informative = tok.as_word().is_some_and(|w| alignable_word(w, lexicon));
            if informative && !cand.a[k][j].iter().any(|&x| x) {
                uncovered.push((k, j));
            }
        }
    }
    Ok(AlignOutput {
        alignment,
        uncovered,
        objective: solution
            .objective_int
            .expect("alignment models have integral coefficients"),
        status: solution.status,
    })
}
