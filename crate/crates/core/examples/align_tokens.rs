//! Aligns question tokens to decomposition tokens with the integer program
//! and prints the chosen pairs.
//!
//! cargo run --example align_tokens -- "Which city has the lowest population?" "return cities ;return population of #1 ;return #1 where #2 is the lowest"

use qdmr_dg::align::{align, AlignConfig};
use qdmr_dg::{tokenize, Lexicon, Qdmr};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let question = args.next().unwrap_or_else(|| "Which rivers in Ohio are longer than the Nile?".into());
    let decomposition = args
        .next()
        .unwrap_or_else(|| "return rivers ;return #1 in Ohio ;return the Nile ;return #2 that are longer than #3".into());
    let lex = Lexicon::default();
    let q = tokenize(&question);
    let qdmr = Qdmr::parse(&decomposition)?;
    let out = align(&q, &qdmr, &lex, &AlignConfig::default())?;
    println!("objective {} ({:?})", out.objective, out.status);
    for &(i, k, j) in &out.alignment.pairs {
        println!("  {:>10} (q{i}) <-> step {} token {j} {:?}", q[i], k + 1, qdmr.steps[k].tokens[j]);
    }
    for &(k, j) in &out.uncovered {
        println!("  step {} token {j} {:?} has no counterpart", k + 1, qdmr.steps[k].tokens[j]);
    }
    Ok(())
}
