//! Converts one question and decomposition into a dependency graph, prints
//! every intermediate artifact and decodes the graph back.
//!
//! cargo run --example qdmr_to_graph -- "How many cubes are there?" "return cubes ;return number of #1"

use qdmr_dg::pipeline::{roundtrip, PipelineConfig};
use qdmr_dg::{Lexicon, Qdmr};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let question = args.next().unwrap_or_else(|| "Which employees are from Toronto?".into());
    let decomposition = args.next().unwrap_or_else(|| "return employees ;return #1 from Toronto".into());

    let lexicon = Lexicon::default();
    let qdmr = Qdmr::parse(&decomposition)?;
    let rt = roundtrip(&question, &qdmr, &lexicon, &PipelineConfig::default())?;
    let art = &rt.artifacts;

    println!("logical form:\n{}\n", art.lf);
    println!("tokens:");
    for (i, t) in art.aug.tokens.iter().enumerate() {
        println!("  {i:>2} {t}");
    }
    println!("\nalignment (question token, step, step token):");
    for &(i, k, j) in &art.alignment.alignment.pairs {
        println!("  {:>12} <- step {} word {:?}", art.aug.tokens[i], k + 1, qdmr.steps[k].tokens[j]);
    }
    println!("\nspan graph nodes:");
    for (k, node) in art.sdg.nodes.iter().enumerate() {
        let words: Vec<&str> = node.iter().map(|&i| art.aug.tokens[i].as_str()).collect();
        println!("  step {}: {}", k + 1, words.join(" "));
    }
    println!("\ndependency graph:");
    for e in &art.dg.edges {
        println!("  {} -> {} [{}]", art.aug.tokens[e.src], art.aug.tokens[e.dst], e.tag.render());
    }
    println!("\ndecoded:\n{}\n\nmatches: {}", rt.decoded, rt.matches);
    Ok(())
}
