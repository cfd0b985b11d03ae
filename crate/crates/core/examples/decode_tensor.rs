//! Decoding a noisy arc-probability tensor. A confident self-loop makes the
//! greedy graph invalid; the constrained decoder returns the best valid
//! graph, which decodes back to the original logical form.

use qdmr_dg::graph::{graph_log_score, greedy_decode, ilp_decode, validate_dg, DecodeContext, ProbTensor};
use qdmr_dg::ilp::SolverConfig;
use qdmr_dg::pipeline::{dg_to_lf, qdmr_to_dg, PipelineConfig};
use qdmr_dg::{EdgeTag, Lexicon, Qdmr};

fn main() -> anyhow::Result<()> {
    let lex = Lexicon::default();
    let qdmr = Qdmr::parse("return employees ;return #1 from Toronto")?;
    let art = qdmr_to_dg("Which employees are from Toronto?", &qdmr, &lex, &PipelineConfig::default())?;
    let ctx = DecodeContext::new(art.aug.clone(), &lex);

    let mut tags = vec![EdgeTag::Span, EdgeTag::Duplicate];
    tags.extend(art.dg.edges.iter().map(|e| e.tag.clone()).filter(|t| t.as_semantic().is_some()));
    tags.dedup();
    let mut probs = ProbTensor::from_graph(&art.dg, tags, 0.8, 0.01);
    // "employees" depending on itself.
    probs.set(1, 1, 0, 0.7);

    let greedy = greedy_decode(&probs);
    println!("greedy: log p = {:.3}", graph_log_score(&probs, &greedy));
    for v in validate_dg(&greedy, &ctx) {
        println!("  violation: {v}");
    }
    let out = ilp_decode(&probs, &ctx, &SolverConfig::default())?;
    println!("constrained: log p = {:.3} ({:?})", out.objective, out.status);
    println!("  violations: {}", validate_dg(&out.dg, &ctx).len());
    println!("decoded:\n{}", dg_to_lf(&out.dg, &art.aug)?);
    Ok(())
}
