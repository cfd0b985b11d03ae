//! Rule-based conversion of a decomposition into a logical form, with the
//! operator triggers that fired for each step.
//!
//! cargo run --example convert_qdmr -- "return cities ;return population of #1 ;return #1 where #2 is the lowest"

use qdmr_dg::convert::qdmr_to_lf_traced;
use qdmr_dg::{Lexicon, Qdmr};

fn main() -> anyhow::Result<()> {
    let text = std::env::args().nth(1).unwrap_or_else(|| {
        "return census groups ;return #1 that is Pacific islander ;return #1 that is African American ;\
         return size of #2 ;return size of #3 ;return which is lowest of #4 , #5"
            .to_string()
    });
    let lexicon = Lexicon::default();
    let qdmr = Qdmr::parse(&text)?;
    let (lf, trace) = qdmr_to_lf_traced(&qdmr, &lexicon)?;
    for (k, (step, t)) in qdmr.steps.iter().zip(&trace.steps).enumerate() {
        println!("{}. {}", k + 1, step.text());
        println!("   => {}", lf.steps[k]);
        let fired: Vec<String> = t.triggers.iter().map(|m| format!("{:?}", m.span)).collect();
        if !fired.is_empty() {
            println!("   triggers at token spans {}", fired.join(", "));
        }
    }
    Ok(())
}
