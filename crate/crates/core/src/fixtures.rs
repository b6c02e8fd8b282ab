//! Bundled example data.

use crate::conllu::{parse_conllu_str, Sentence};

/// An 11-word Hindi clause with four preverbal constituents of lengths
/// 2, 3, 1 and 4 in front of the verb `di`.
pub const SAMPLE_CONLLU: &str = include_str!("../data/sample_clause.conllu");

pub fn sample_sentence() -> Sentence {
    parse_conllu_str(SAMPLE_CONLLU, "sample_clause.conllu")
        .expect("bundled fixture parses")
        .remove(0)
}
