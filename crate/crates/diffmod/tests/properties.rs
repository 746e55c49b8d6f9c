//! Randomized invariants of the operator algebra, completion and the parser.

mod support;

use diffmod::dsl::load;
use proptest::prelude::*;
use support::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg(128))]

    #[test]
    fn adjoint_is_an_involution(spec in matrix(2, 2, 3, true)) {
        check_adjoint_is_an_involution(&spec)?;
    }

    #[test]
    fn adjoint_reverses_composition(b in matrix(2, 3, 2, true), a in matrix(3, 2, 2, true)) {
        check_adjoint_reverses_composition(&b, &a)?;
    }

    #[test]
    fn compatibility_conditions_annihilate(spec in matrix(3, 1, 2, false), sec in section(1)) {
        check_compatibility_conditions_annihilate(&spec, 1, &sec)?;
    }

    #[test]
    fn compatibility_conditions_annihilate_variable_coefficients(spec in matrix(2, 2, 1, true), sec in section(2)) {
        check_compatibility_conditions_annihilate(&spec, 2, &sec)?;
    }

    #[test]
    fn normal_form_is_idempotent_and_decides_membership(
        spec in matrix(2, 2, 2, false),
        mult in prop::collection::vec(op(2, true), 2),
        extra in prop::collection::vec(op(2, true), 2),
    ) {
        check_normal_form_decides_membership(&spec, &mult, &extra)?;
    }

    #[test]
    fn parser_round_trip(spec in matrix(2, 2, 3, true)) {
        check_parser_round_trip(&spec)?;
    }
}

proptest! {
    #![proptest_config(cfg(512))]

    #[test]
    fn arbitrary_text_never_panics(src in "\\PC{0,200}") {
        let _ = load(&src);
    }

    #[test]
    fn token_soup_never_panics(src in token_soup()) {
        let _ = load(&src);
    }

    #[test]
    fn mutated_corpus_never_panics(pos in 0usize..400, byte in any::<u8>()) {
        if let Some(s) = mutated_source(pos, byte) {
            let _ = load(&s);
        }
    }
}
