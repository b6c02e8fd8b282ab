//! Counterfactual constituent orders for verb-final clauses.
//!
//! Reads dependency treebanks in CoNLL-U, permutes the constituents that
//! precede the main verb, measures dependency length under each order, and
//! asks whether the attested order can be told apart from its permutations
//! by the length of the verb-adjacent constituent or by total dependency
//! length.

pub mod conllu;
pub mod error;
pub mod filter;
pub mod fixtures;
pub mod par;
pub mod pipeline;
pub mod rank;
pub mod stats;
pub mod synth;
pub mod tree;
pub mod variants;

pub use error::{Error, Result, TreeError};
