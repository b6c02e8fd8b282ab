//! Synthetic verb-final treebanks with a known ordering rule, for tests and
//! benchmarks.
//!
//! Every sentence is a projective tree whose root verb is the last word
//! (optionally followed by a punctuation mark). Each preverbal constituent
//! is a chain of words pointing towards its head, so internal arcs all have
//! length 0. The constituents are placed according to [`ReferenceOrder`].

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conllu::{Sentence, Token};
use crate::tree::ClauseLayout;
use crate::variants::{least_effort_transform, Permutation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceOrder {
    /// Least-effort transform of a uniformly random base order.
    LeastEffort,
    /// A uniformly random order.
    Random,
    /// Least effort with the given probability, otherwise random.
    Mixed(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct SynthOptions {
    pub min_constituents: usize,
    pub max_constituents: usize,
    pub max_length: u64,
    pub order: ReferenceOrder,
    /// Probability of a trailing punctuation token attached to the verb.
    pub punct_rate: f64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            min_constituents: 2,
            max_constituents: 5,
            max_length: 8,
            order: ReferenceOrder::LeastEffort,
            punct_rate: 0.0,
        }
    }
}

const RELATIONS: [&str; 6] = ["nsubj", "obj", "obl", "advmod", "iobj", "ccomp"];

fn token(position: usize, form: String, upos: &str, head: usize, deprel: &str) -> Token {
    Token {
        position,
        lemma: form.clone(),
        form,
        upos: upos.to_string(),
        xpos: "_".into(),
        feats: "_".into(),
        head,
        deprel: deprel.to_string(),
        deps: "_".into(),
        misc: "_".into(),
    }
}

/// Draw lengths and head offsets for one clause.
pub fn random_parts<R: Rng + ?Sized>(rng: &mut R, opts: &SynthOptions) -> (Vec<u64>, Vec<u64>) {
    let n = rng.random_range(opts.min_constituents..=opts.max_constituents);
    let lengths: Vec<u64> = (0..n)
        .map(|_| rng.random_range(1..=opts.max_length))
        .collect();
    let offsets = lengths.iter().map(|&l| rng.random_range(0..l)).collect();
    (lengths, offsets)
}

/// Build one sentence whose constituents (given by length and head offset
/// from the right edge) appear in the given order.
pub fn build_sentence(
    sent_id: &str,
    lengths: &[u64],
    offsets: &[u64],
    order: &[usize],
    punct: bool,
) -> Sentence {
    let total: u64 = lengths.iter().sum();
    let verb = total as usize + 1;
    let mut tokens = Vec::with_capacity(verb + 1);
    for &c in order {
        let start = tokens.len() + 1;
        let len = lengths[c] as usize;
        let head = start + len - 1 - offsets[c] as usize;
        for pos in start..start + len {
            let (h, rel) = match pos.cmp(&head) {
                std::cmp::Ordering::Less => (pos + 1, "dep"),
                std::cmp::Ordering::Greater => (pos - 1, "dep"),
                std::cmp::Ordering::Equal => (verb, RELATIONS[c % RELATIONS.len()]),
            };
            let upos = if pos == head { "NOUN" } else { "ADJ" };
            tokens.push(token(pos, format!("c{c}w{}", pos - start), upos, h, rel));
        }
    }
    tokens.push(token(verb, "verb".into(), "VERB", 0, "root"));
    if punct {
        tokens.push(token(verb + 1, ".".into(), "PUNCT", verb, "punct"));
    }
    Sentence {
        sent_id: sent_id.to_string(),
        tokens,
        source_line: 0,
        comments: vec![format!("sent_id = {sent_id}")],
        extra_lines: Vec::new(),
    }
}

/// Generate `n_sentences` sentences with ids `syn-00001`, ... from `seed`.
pub fn generate_corpus(n_sentences: usize, seed: u64, opts: &SynthOptions) -> Vec<Sentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_sentences)
        .map(|i| {
            let (lengths, offsets) = random_parts(&mut rng, opts);
            let n = lengths.len();
            let mut base: Vec<usize> = (0..n).collect();
            base.shuffle(&mut rng);
            let least_effort = match opts.order {
                ReferenceOrder::Random => false,
                ReferenceOrder::LeastEffort => true,
                ReferenceOrder::Mixed(rate) => rng.random_bool(rate),
            };
            let order = match least_effort {
                false => base,
                true => {
                    let layout =
                        ClauseLayout::from_parts("", &lengths, &offsets).expect("valid parts");
                    least_effort_transform(&Permutation::new(base).expect("shuffle"), &layout)
                        .as_slice()
                        .to_vec()
                }
            };
            let punct = rng.random_bool(opts.punct_rate);
            build_sentence(
                &format!("syn-{:05}", i + 1),
                &lengths,
                &offsets,
                &order,
                punct,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{build_tree, extract_layout, is_projective, LengthPolicy};

    #[test]
    fn generated_sentences_have_the_intended_layout() {
        let opts = SynthOptions {
            punct_rate: 0.5,
            ..SynthOptions::default()
        };
        for s in generate_corpus(50, 5, &opts) {
            let t = build_tree(&s).unwrap();
            assert!(is_projective(&t));
            let l = extract_layout(&t, LengthPolicy::default()).unwrap();
            assert!((2..=5).contains(&l.n_constituents()));
            let min = l.lengths().into_iter().min().unwrap();
            assert_eq!(l.preverbal.last().unwrap().length, min);
            assert_eq!(l.fixed_dl, 0);
        }
    }
}
