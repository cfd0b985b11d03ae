//! Normal forms and the exact-match metric: reordered parallel branches
//! and merged filters match, swapped difference operands do not.

use qdmr_dg::convert::convert_text;
use qdmr_dg::normalize::{lf_em, normalize};
use qdmr_dg::Lexicon;

fn main() -> anyhow::Result<()> {
    let lex = Lexicon::default();
    let pairs = [
        ("return metal objects", "return objects ;return #1 that are metal"),
        (
            "return cats ;return dogs ;return #1 , #2",
            "return dogs ;return cats ;return #2 , #1",
        ),
        (
            "return apples ;return pears ;return the difference of #1 and #2",
            "return apples ;return pears ;return the difference of #2 and #1",
        ),
    ];
    for (a, b) in pairs {
        let (la, lb) = (convert_text(a, &lex)?, convert_text(b, &lex)?);
        println!("{a}\n{b}");
        println!("  normal form: {:?}", normalize(&la, &lex)?.steps);
        println!("  match: {}\n", lf_em(&la, &lb, &lex));
    }
    Ok(())
}
