use thiserror::Error;

use crate::model::{DependencyGraph, DgEdge, EdgeTag};

/// Probabilities are clamped to this floor before taking logarithms.
pub const PROB_FLOOR: f64 = 1e-12;

const MASS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("expected {expected} values for n={n} and {tags} tags, got {got}")]
    Shape { n: usize, tags: usize, expected: usize, got: usize },
    #[error("p({i},{j},{tag}) = {value} is outside [0, 1]")]
    OutOfRange { i: usize, j: usize, tag: String, value: f32 },
    #[error("tags of arc ({i},{j}) carry mass {mass}, more than 1")]
    MassExceeded { i: usize, j: usize, mass: f64 },
    #[error("tag {0} appears twice in the vocabulary")]
    RepeatedTag(String),
}

/// Arc tag probabilities `p(i, j, t)` over an augmented question, stored
/// densely in `(i, j, t)` row-major order. The probability of no arc is
/// whatever mass the tags leave over.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbTensor {
    pub n: usize,
    pub tags: Vec<EdgeTag>,
    pub values: Vec<f32>,
}

impl ProbTensor {
    pub fn new(n: usize, tags: Vec<EdgeTag>, values: Vec<f32>) -> Result<Self, TensorError> {
        let t = Self { n, tags, values };
        t.validate()?;
        Ok(t)
    }

    pub fn zeros(n: usize, tags: Vec<EdgeTag>) -> Self {
        let len = n * n * tags.len();
        Self {
            n,
            tags,
            values: vec![0.0; len],
        }
    }

    pub fn validate(&self) -> Result<(), TensorError> {
        let expected = self.n * self.n * self.tags.len();
        if self.values.len() != expected {
            return Err(TensorError::Shape {
                n: self.n,
                tags: self.tags.len(),
                expected,
                got: self.values.len(),
            });
        }
        for (a, t) in self.tags.iter().enumerate() {
            if self.tags[..a].contains(t) {
                return Err(TensorError::RepeatedTag(t.render()));
            }
        }
        for i in 0..self.n {
            for j in 0..self.n {
                for (t, tag) in self.tags.iter().enumerate() {
                    let value = self.get(i, j, t);
                    if !(0.0..=1.0).contains(&value) {
                        return Err(TensorError::OutOfRange {
                            i,
                            j,
                            tag: tag.render(),
                            value,
                        });
                    }
                }
                let mass = self.mass(i, j);
                if mass > 1.0 + MASS_TOLERANCE {
                    return Err(TensorError::MassExceeded { i, j, mass });
                }
            }
        }
        Ok(())
    }

    fn index(&self, i: usize, j: usize, t: usize) -> usize {
        (i * self.n + j) * self.tags.len() + t
    }

    pub fn get(&self, i: usize, j: usize, t: usize) -> f32 {
        self.values[self.index(i, j, t)]
    }

    pub fn set(&mut self, i: usize, j: usize, t: usize, p: f32) {
        let k = self.index(i, j, t);
        self.values[k] = p;
    }

    pub fn tag_index(&self, tag: &EdgeTag) -> Option<usize> {
        self.tags.iter().position(|t| t == tag)
    }

    /// Total probability that the arc exists.
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        (0..self.tags.len()).map(|t| self.get(i, j, t) as f64).sum()
    }

    /// Probability of no arc.
    pub fn none(&self, i: usize, j: usize) -> f64 {
        (1.0 - self.mass(i, j)).max(0.0)
    }

    /// Clamped log-probability of tag `t`, or of no arc when `t` is `None`.
    pub fn log_p(&self, i: usize, j: usize, t: Option<usize>) -> f64 {
        let p = match t {
            Some(t) => self.get(i, j, t) as f64,
            None => self.none(i, j),
        };
        p.max(PROB_FLOOR).ln()
    }

    /// A tensor that puts `high` on every arc of `dg` and `low` on each
    /// tag of every other arc. Handy for tests and demonstrations.
    pub fn from_graph(dg: &DependencyGraph, tags: Vec<EdgeTag>, high: f32, low: f32) -> Self {
        let mut out = Self::zeros(dg.token_count, tags);
        for i in 0..out.n {
            for j in 0..out.n {
                for t in 0..out.tags.len() {
                    out.set(i, j, t, low);
                }
            }
        }
        for e in &dg.edges {
            if let Some(t) = out.tag_index(&e.tag) {
                for u in 0..out.tags.len() {
                    out.set(e.src, e.dst, u, if u == t { high } else { low.min((1.0 - high) / out.tags.len() as f32) });
                }
            }
        }
        out
    }
}

/// Log-probability of a whole graph: every arc scores its tag, every
/// absent arc scores the no-arc mass. Arcs whose tag is not in the
/// vocabulary score the floor.
pub fn graph_log_score(probs: &ProbTensor, dg: &DependencyGraph) -> f64 {
    let mut total = 0.0;
    let mut chosen = vec![None; probs.n * probs.n];
    for e in &dg.edges {
        if e.src < probs.n && e.dst < probs.n {
            chosen[e.src * probs.n + e.dst] = Some(probs.tag_index(&e.tag).ok_or(()));
        }
    }
    for i in 0..probs.n {
        for j in 0..probs.n {
            total += match chosen[i * probs.n + j] {
                None => probs.log_p(i, j, None),
                Some(Ok(t)) => probs.log_p(i, j, Some(t)),
                Some(Err(())) => PROB_FLOOR.ln(),
            };
        }
    }
    total
}

/// Keeps every arc whose total tag mass exceeds one half and labels it
/// with its most probable tag. Ties go to the tag whose name sorts first.
pub fn greedy_decode(probs: &ProbTensor) -> DependencyGraph {
    let mut edges = Vec::new();
    for i in 0..probs.n {
        for j in 0..probs.n {
            if probs.mass(i, j) <= 0.5 {
                continue;
            }
            let best = (0..probs.tags.len()).max_by(|&a, &b| {
                probs
                    .get(i, j, a)
                    .total_cmp(&probs.get(i, j, b))
                    .then_with(|| probs.tags[b].render().cmp(&probs.tags[a].render()))
            });
            if let Some(t) = best {
                edges.push(DgEdge::new(i, j, probs.tags[t].clone()));
            }
        }
    }
    DependencyGraph::new(probs.n, edges)
}
