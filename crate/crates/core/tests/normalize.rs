//! Properties of the normal form and of the exact-match metric.

mod common;

use common::lf::{permute, random_lf};
use proptest::prelude::*;
use qdmr_dg::convert::convert_text;
use qdmr_dg::normalize::{lf_em, normalize};
use qdmr_dg::{ArgToken, Lexicon, LogicalForm, LogicalFormStep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn permuting_independent_steps_keeps_the_match(seed in any::<u64>(), len in 1usize..9) {
        let lex = Lexicon::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lf = random_lf(&mut rng, len);
        let shuffled = permute(&mut rng, &lf);
        prop_assert!(shuffled.validate().is_ok());
        prop_assert!(lf_em(&shuffled, &lf, &lex), "{}\n--\n{}", lf, shuffled);
    }

    #[test]
    fn matching_is_reflexive_and_symmetric(seed in any::<u64>(), len in 1usize..9) {
        let lex = Lexicon::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_lf(&mut rng, len);
        let b = random_lf(&mut rng, len);
        prop_assert!(lf_em(&a, &a, &lex));
        prop_assert_eq!(lf_em(&a, &b, &lex), lf_em(&b, &a, &lex));
    }

    #[test]
    fn normal_form_is_a_fixed_point(seed in any::<u64>(), len in 1usize..9) {
        let lex = Lexicon::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lf = random_lf(&mut rng, len);
        let once = normalize(&lf, &lex).unwrap();
        let reparsed = LogicalForm::new(
            once.steps.iter().map(|s| LogicalFormStep::parse(s).unwrap()).collect(),
        );
        let twice = normalize(&reparsed, &lex).unwrap();
        prop_assert_eq!(&once.steps, &twice.steps);
        let mut folded: Vec<usize> = once.provenance.iter().flatten().copied().collect();
        folded.sort_unstable();
        prop_assert_eq!(folded, (0..lf.len()).collect::<Vec<_>>());
    }

    #[test]
    fn changing_a_word_breaks_the_match(seed in any::<u64>(), len in 1usize..9) {
        let lex = Lexicon::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lf = random_lf(&mut rng, len);
        let mut other = lf.clone();
        let step = rng.gen_range(0..other.len());
        other.steps[step].args[0].value.push(ArgToken::word("zeppelin"));
        prop_assert!(!lf_em(&other, &lf, &lex));
    }
}

#[test]
fn merged_and_split_filters_match() {
    let lex = Lexicon::default();
    let a = convert_text("return metal objects", &lex).unwrap();
    let b = convert_text("return objects ;return #1 that are metal", &lex).unwrap();
    assert!(lf_em(&a, &b, &lex));
}

#[test]
fn swapping_difference_operands_breaks_the_match() {
    let lex = Lexicon::default();
    let a = convert_text("return apples ;return pears ;return the difference of #1 and #2", &lex).unwrap();
    let b = convert_text("return apples ;return pears ;return the difference of #2 and #1", &lex).unwrap();
    assert!(!lf_em(&a, &b, &lex));
}

#[test]
fn swapping_union_operands_keeps_the_match() {
    let lex = Lexicon::default();
    let a = convert_text("return cats ;return dogs ;return #1 , #2", &lex).unwrap();
    let b = convert_text("return dogs ;return cats ;return #2 , #1", &lex).unwrap();
    assert!(lf_em(&a, &b, &lex));
}
