//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

pub mod lf;
pub mod table;

use std::path::PathBuf;

use qdmr_dg::graph::{greedy_decode, validate_dg, DecodeContext, ProbTensor};
use qdmr_dg::io::{read_break_csv, CorpusExample};
use qdmr_dg::pipeline::{qdmr_to_dg, PipelineConfig};
use qdmr_dg::{AugmentedQuestion, DependencyGraph, EdgeTag, Lexicon, Qdmr, QdmrStep, Question, StepToken};
use rand::seq::SliceRandom;
use rand::Rng;

pub const VOCAB: &[&str] = &[
    "red", "cube", "cubes", "ball", "balls", "large", "larger", "city", "cities", "river", "name", "of", "the",
];

/// A random question and decomposition over a small vocabulary, so that
/// repeated and equivalent words are common.
pub fn random_instance<R: Rng>(rng: &mut R, q_len: usize, steps: usize, step_len: usize) -> (Vec<String>, Qdmr) {
    let question: Vec<String> = (0..q_len).map(|_| VOCAB.choose(rng).unwrap().to_string()).collect();
    let mut qdmr_steps = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut tokens: Vec<StepToken> = (0..rng.gen_range(1..=step_len))
            .map(|_| StepToken::Word(VOCAB.choose(rng).unwrap().to_string()))
            .collect();
        if k > 0 && rng.gen_bool(0.7) {
            let pos = rng.gen_range(0..=tokens.len());
            tokens.insert(pos, StepToken::Ref(rng.gen_range(0..k)));
        }
        qdmr_steps.push(QdmrStep { tokens });
    }
    (question, Qdmr::new(qdmr_steps).unwrap())
}

pub const WORDS: &[&str] = &["red", "cubes", "the", "of", "balls", "large", "number", "river"];

/// Semantic tags likely to interact with the combination rows.
pub const TAG_POOL: &[&str] = &[
    "filter-sub",
    "project-sub",
    "union-sub",
    "arithmetic-left[diff]",
    "arithmetic-right[diff]",
    "superlative-sub[max]",
    "superlative-attribute[max]",
    "intersection-intersect",
    "aggregate-arg[count]",
];

/// An augmented question of exactly `n` tokens with a random split between
/// words, `[DUM]` and `[DUP]` tokens.
pub fn random_context<R: Rng>(rng: &mut R, n: usize) -> DecodeContext {
    let base = rng.gen_range(1..n);
    let rest = n - 1 - base;
    let k_dum = rng.gen_range(0..=rest);
    let words: Vec<String> = (0..base).map(|_| WORDS.choose(rng).unwrap().to_string()).collect();
    let aug = AugmentedQuestion::new(Question::new(words).unwrap(), &[], k_dum, rest - k_dum);
    DecodeContext::new(aug, &Lexicon::default())
}

/// `span`, then `k - 1` distinct tags drawn from `duplicate` and the pool.
pub fn random_tags<R: Rng>(rng: &mut R, k: usize) -> Vec<EdgeTag> {
    let mut pool: Vec<EdgeTag> = std::iter::once(EdgeTag::Duplicate)
        .chain(TAG_POOL.iter().map(|s| s.parse().unwrap()))
        .collect();
    pool.shuffle(rng);
    std::iter::once(EdgeTag::Span).chain(pool.into_iter().take(k - 1)).collect()
}

/// Each arc gets a random distribution over its tags and the no-arc
/// outcome; with probability `sparsity` the no-arc outcome dominates.
pub fn random_tensor<R: Rng>(rng: &mut R, n: usize, tags: Vec<EdgeTag>, sparsity: f64) -> ProbTensor {
    let mut p = ProbTensor::zeros(n, tags);
    let k = p.tags.len();
    for i in 0..n {
        for j in 0..n {
            let none_weight = if rng.gen_bool(sparsity) { 20.0 } else { rng.gen_range(0.0..2.0) };
            let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0f64..1.0).powi(2)).collect();
            let total: f64 = none_weight + weights.iter().sum::<f64>();
            for (t, w) in weights.iter().enumerate() {
                p.set(i, j, t, (w / total) as f32);
            }
        }
    }
    p
}

pub fn sample_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/sample.csv")
}

pub fn sample_examples() -> Vec<CorpusExample> {
    read_break_csv(sample_path()).unwrap()
}

/// The graph the forward pipeline extracts for a corpus example.
pub fn gold_graph(ex: &CorpusExample, lex: &Lexicon) -> (DecodeContext, DependencyGraph) {
    let qdmr = Qdmr::parse(&ex.decomposition).unwrap();
    let art = qdmr_to_dg(&ex.question, &qdmr, lex, &PipelineConfig::default()).unwrap();
    (DecodeContext::new(art.aug, lex), art.dg)
}

/// The tags of `dg` plus `span`, `duplicate` and `extra` pool tags.
pub fn vocabulary_for<R: Rng>(rng: &mut R, dg: &DependencyGraph, extra: usize) -> Vec<EdgeTag> {
    let mut tags = vec![EdgeTag::Span, EdgeTag::Duplicate];
    for e in &dg.edges {
        if !tags.contains(&e.tag) {
            tags.push(e.tag.clone());
        }
    }
    let mut pool: Vec<EdgeTag> = TAG_POOL.iter().map(|s| s.parse().unwrap()).collect();
    pool.shuffle(rng);
    for t in pool {
        if tags.len() >= extra + 2 + dg.edges.len() {
            break;
        }
        if !tags.contains(&t) {
            tags.push(t);
        }
    }
    tags
}

/// What a reasonably trained scorer might output for `dg`: its arcs are
/// likely and every other arc carries a little noise.
pub fn model_like_tensor<R: Rng>(rng: &mut R, dg: &DependencyGraph, tags: Vec<EdgeTag>) -> ProbTensor {
    let mut p = ProbTensor::zeros(dg.token_count, tags);
    let k = p.tags.len();
    let cap = 0.3 / k as f32;
    for i in 0..p.n {
        for j in 0..p.n {
            for t in 0..k {
                p.set(i, j, t, rng.gen_range(0.0..cap));
            }
        }
    }
    for e in &dg.edges {
        let t = p.tag_index(&e.tag).unwrap();
        let high = rng.gen_range(0.7..0.95);
        for u in 0..k {
            let v = if u == t { high } else { rng.gen_range(0.0..(1.0 - high) / k as f32) };
            p.set(e.src, e.dst, u, v);
        }
    }
    p
}

/// Plants one confident but illegal arc into a model-like tensor so that
/// greedy decoding returns an invalid graph. Returns `None` when the
/// chosen corruption happens not to break validity.
pub fn corrupt<R: Rng>(rng: &mut R, ctx: &DecodeContext, dg: &DependencyGraph, p: &mut ProbTensor) -> Option<()> {
    let n = p.n;
    let words = ctx.aug.sep_index;
    let touched: Vec<usize> = (0..n)
        .filter(|&i| dg.edges.iter().any(|e| e.src == i || e.dst == i))
        .collect();
    let untouched: Vec<usize> = (0..words).filter(|i| !touched.contains(i)).collect();
    let span = p.tag_index(&EdgeTag::Span).unwrap();
    let (i, j, t) = match rng.gen_range(0..4) {
        // A token depending on itself.
        0 => {
            let i = *touched.choose(rng)?;
            (i, i, rng.gen_range(0..p.tags.len()))
        }
        // A span arc pointing backwards.
        1 => {
            let e = dg.edges.iter().filter(|e| e.tag == EdgeTag::Span).collect::<Vec<_>>();
            let e = e.choose(rng)?;
            (e.dst, e.src, span)
        }
        // A second operator leaving a token that already has one.
        2 => {
            let e = dg.edges.iter().filter(|e| e.tag.as_semantic().is_some()).collect::<Vec<_>>();
            let e = *e.choose(rng)?;
            let op = e.tag.as_semantic()?.operator;
            let others: Vec<usize> = (0..p.tags.len())
                .filter(|&u| p.tags[u].as_semantic().is_some_and(|s| s.operator != op))
                .collect();
            let target = (0..n).find(|&j| j != e.src && j != e.dst && !dg.edges.iter().any(|f| f.src == e.src && f.dst == j))?;
            (e.src, target, *others.choose(rng)?)
        }
        // A detached span pair, which makes a second root.
        _ => {
            if untouched.len() < 2 {
                return None;
            }
            let a = rng.gen_range(0..untouched.len() - 1);
            (untouched[a], untouched[a + 1], span)
        }
    };
    let k = p.tags.len();
    for u in 0..k {
        p.set(i, j, u, if u == t { 0.6 } else { 0.3 / k as f32 });
    }
    (!validate_dg(&greedy_decode(p), ctx).is_empty()).then_some(())
}

/// Model-like tensors over sample examples whose greedy decoding breaks a
/// validity rule.
pub fn adversarial_cases<R: Rng>(rng: &mut R, count: usize) -> Vec<(String, DecodeContext, ProbTensor)> {
    let lex = Lexicon::default();
    let examples = sample_examples();
    let mut out = Vec::new();
    while out.len() < count {
        let ex = examples.choose(rng).unwrap();
        let (ctx, dg) = gold_graph(ex, &lex);
        let tags = vocabulary_for(rng, &dg, 2);
        let mut p = model_like_tensor(rng, &dg, tags);
        if corrupt(rng, &ctx, &dg, &mut p).is_some() {
            out.push((ex.id.clone(), ctx, p));
        }
    }
    out
}

/// Every semantic tag of the bundled table plus span and duplicate, cut to
/// `k` tags.
pub fn wide_tags(k: usize) -> Vec<qdmr_dg::EdgeTag> {
    use qdmr_dg::{EdgeTag, Operator};
    let mut tags = vec![EdgeTag::Span, EdgeTag::Duplicate];
    'outer: for op in Operator::ALL {
        let mut props: Vec<Vec<qdmr_dg::Property>> = vec![vec![]];
        props.extend(op.properties().iter().map(|p| vec![*p]));
        for ps in props {
            for arg in op.arguments() {
                if tags.len() == k {
                    break 'outer;
                }
                tags.push(EdgeTag::semantic(op, ps.clone(), *arg));
            }
        }
    }
    tags
}
