//! Reads the bundled corpus, converts it, and writes logical-form and
//! graph artifacts next to each other in a temporary directory.

use qdmr_dg::io::{read_break_csv, read_jsonl_file, write_jsonl_file, DgRecord, LfRecord};
use qdmr_dg::pipeline::{qdmr_to_dg, PipelineConfig};
use qdmr_dg::{Lexicon, Qdmr};

fn main() -> anyhow::Result<()> {
    let lex = Lexicon::default();
    let corpus = read_break_csv(concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample.csv"))?;
    let mut lfs = Vec::new();
    let mut graphs = Vec::new();
    for ex in &corpus {
        let art = qdmr_to_dg(&ex.question, &Qdmr::parse(&ex.decomposition)?, &lex, &PipelineConfig::default())?;
        lfs.push(LfRecord::new(&ex.id, &art.lf));
        graphs.push(DgRecord::new(&ex.id, &art.aug, &art.dg));
    }
    let dir = std::env::temp_dir().join("qdmr-dg-example");
    std::fs::create_dir_all(&dir)?;
    write_jsonl_file(dir.join("lf.jsonl"), &lfs)?;
    write_jsonl_file(dir.join("dg.jsonl"), &graphs)?;
    let back: Vec<DgRecord> = read_jsonl_file(dir.join("dg.jsonl"))?;
    println!("{} examples written to {}", back.len(), dir.display());
    println!("first graph: {}", serde_json::to_string(&back[0])?);
    Ok(())
}
