//! Corpus filtering: keep verb-rooted projective sentences with enough
//! preverbal constituents, and log why everything else was dropped.

use std::collections::{BTreeSet, HashSet};

use crate::conllu::Sentence;
use crate::tree::{build_tree, extract_layout, is_projective, ClauseLayout, LengthPolicy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterPolicy {
    pub min_preverbal: usize,
    pub require_projective: bool,
    pub root_upos_allowed: BTreeSet<String>,
    /// Below this many kept sentences a warning is recorded.
    pub min_corpus_sentences: usize,
}

impl Default for FilterPolicy {
    fn default() -> Self {
        FilterPolicy {
            min_preverbal: 2,
            require_projective: true,
            root_upos_allowed: ["VERB".to_string()].into_iter().collect(),
            min_corpus_sentences: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkipEntry {
    pub sent_id: String,
    pub reason: &'static str,
}

/// A kept sentence along with the layout the filter already extracted.
#[derive(Debug, Clone)]
pub struct KeptSentence {
    pub sentence: Sentence,
    pub layout: ClauseLayout,
}

#[derive(Debug, Clone, Default)]
pub struct FilterOutcome {
    pub kept: Vec<KeptSentence>,
    pub skiplog: Vec<SkipEntry>,
    pub warnings: Vec<String>,
}

fn classify(
    sentence: &Sentence,
    policy: &FilterPolicy,
    length_policy: LengthPolicy,
) -> Result<ClauseLayout, &'static str> {
    let tree = build_tree(sentence).map_err(|e| e.reason())?;
    if !policy
        .root_upos_allowed
        .contains(&sentence.token(tree.root).upos)
    {
        return Err("root-not-verb");
    }
    if policy.require_projective && !is_projective(&tree) {
        return Err("non-projective");
    }
    let layout = extract_layout(&tree, length_policy).map_err(|e| e.reason())?;
    if layout.n_constituents() < policy.min_preverbal {
        return Err("too-few-preverbal");
    }
    Ok(layout)
}

/// Partition `sentences` into kept sentences and skip-log entries. Every
/// input ends up in exactly one of the two. A sentence whose id was already
/// seen is skipped as `duplicate-sent-id`.
pub fn filter_corpus(
    sentences: Vec<Sentence>,
    policy: &FilterPolicy,
    length_policy: LengthPolicy,
) -> FilterOutcome {
    let mut out = FilterOutcome::default();
    let mut seen = HashSet::new();
    for sentence in sentences {
        if !seen.insert(sentence.sent_id.clone()) {
            out.skiplog.push(SkipEntry {
                sent_id: sentence.sent_id,
                reason: "duplicate-sent-id",
            });
            continue;
        }
        match classify(&sentence, policy, length_policy) {
            Ok(layout) => out.kept.push(KeptSentence { sentence, layout }),
            Err(reason) => out.skiplog.push(SkipEntry {
                sent_id: sentence.sent_id,
                reason,
            }),
        }
    }
    if out.kept.len() < policy.min_corpus_sentences {
        let msg = format!(
            "only {} sentences kept, fewer than the recommended {}",
            out.kept.len(),
            policy.min_corpus_sentences
        );
        log::warn!("{msg}");
        out.warnings.push(msg);
    }
    out
}
