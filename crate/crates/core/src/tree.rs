//! Dependency trees, projectivity, preverbal clause layouts and dependency
//! length.
//!
//! Dependency length is the number of words strictly between a head and its
//! dependent, so adjacent words are at distance 0.

use crate::conllu::{Sentence, Token};
use crate::error::{Error, Result, TreeError};

/// Which tokens count as words for lengths and intervention counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthPolicy {
    /// When false, tokens with UPOS `PUNCT` are not counted.
    pub count_punct: bool,
}

impl Default for LengthPolicy {
    fn default() -> Self {
        LengthPolicy { count_punct: true }
    }
}

/// Prefix counts of words under a [`LengthPolicy`], so interval word counts
/// are O(1).
#[derive(Debug, Clone)]
pub struct WordCounter {
    // prefix[p] = counted words among positions 1..=p
    prefix: Vec<u64>,
}

impl WordCounter {
    pub fn new(tokens: &[Token], policy: LengthPolicy) -> Self {
        let mut prefix = Vec::with_capacity(tokens.len() + 1);
        prefix.push(0);
        let mut acc = 0;
        for tok in tokens {
            if policy.count_punct || !tok.is_punct() {
                acc += 1;
            }
            prefix.push(acc);
        }
        WordCounter { prefix }
    }

    /// Counted words in the inclusive interval `lo..=hi`.
    pub fn span(&self, lo: usize, hi: usize) -> u64 {
        if lo > hi {
            return 0;
        }
        self.prefix[hi] - self.prefix[lo - 1]
    }

    /// Counted words strictly between two positions.
    pub fn between(&self, a: usize, b: usize) -> u64 {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if hi - lo < 2 {
            0
        } else {
            self.span(lo + 1, hi - 1)
        }
    }

    pub fn total(&self) -> u64 {
        *self.prefix.last().unwrap_or(&0)
    }
}

/// Intervening-word distance between two positions when every word counts.
pub fn arc_length(a: usize, b: usize) -> Result<u64> {
    if a == b {
        return Err(Error::domain(format!(
            "arc_length of a position with itself ({a})"
        )));
    }
    Ok((a.abs_diff(b) - 1) as u64)
}

#[derive(Debug, Clone)]
pub struct DepTree<'s> {
    pub sentence: &'s Sentence,
    pub root: usize,
    /// `children[p]` lists the dependents of position `p` in surface order;
    /// index 0 is unused.
    pub children: Vec<Vec<usize>>,
}

pub fn build_tree(sentence: &Sentence) -> Result<DepTree<'_>, TreeError> {
    let n = sentence.tokens.len();
    let roots: Vec<usize> = sentence
        .tokens
        .iter()
        .filter(|t| t.head == 0)
        .map(|t| t.position)
        .collect();
    if roots.len() != 1 {
        return Err(TreeError::BadRoot(roots.len()));
    }
    for tok in &sentence.tokens {
        if tok.head > n {
            return Err(TreeError::DanglingHead {
                position: tok.position,
                head: tok.head,
            });
        }
    }

    // 0 = unknown, 1 = on current path, 2 = reaches the root
    let mut state = vec![0u8; n + 1];
    let mut path = Vec::new();
    for start in 1..=n {
        let mut p = start;
        while p != 0 && state[p] == 0 {
            state[p] = 1;
            path.push(p);
            p = sentence.token(p).head;
        }
        if p != 0 && state[p] == 1 {
            return Err(TreeError::Cyclic(p));
        }
        for q in path.drain(..) {
            state[q] = 2;
        }
    }

    let mut children = vec![Vec::new(); n + 1];
    for tok in &sentence.tokens {
        if tok.head != 0 {
            children[tok.head].push(tok.position);
        }
    }
    Ok(DepTree {
        sentence,
        root: roots[0],
        children,
    })
}

/// Yield extent of every subtree: `(min, max, size)` indexed by position.
fn subtree_extents(tree: &DepTree<'_>) -> Vec<(usize, usize, usize)> {
    let n = tree.sentence.len();
    let mut ext = vec![(usize::MAX, 0, 0); n + 1];
    // Iterative post-order from the root.
    let mut stack = vec![(tree.root, false)];
    while let Some((node, expanded)) = stack.pop() {
        if expanded {
            let mut e = (node, node, 1);
            for &c in &tree.children[node] {
                let (lo, hi, size) = ext[c];
                e = (e.0.min(lo), e.1.max(hi), e.2 + size);
            }
            ext[node] = e;
        } else {
            stack.push((node, true));
            for &c in &tree.children[node] {
                stack.push((c, false));
            }
        }
    }
    ext
}

/// True iff for every arc, every word strictly between head and dependent
/// is dominated by the head. Computed via the equivalent condition that
/// every subtree yield is a contiguous interval.
pub fn is_projective(tree: &DepTree<'_>) -> bool {
    subtree_extents(tree)
        .iter()
        .skip(1)
        .all(|&(lo, hi, size)| hi + 1 - lo == size)
}

/// A root dependent together with its subtree yield.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constituent {
    pub head_position: usize,
    /// First and last position of the yield (inclusive).
    pub start: usize,
    pub end: usize,
    /// Counted words in the yield.
    pub length: u64,
    /// Counted words in the yield strictly after the head.
    pub right_offset: u64,
    pub deprel: String,
}

/// The permutable part of a clause: the preverbal constituents in surface
/// order, the verb, and the fixed material after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseLayout {
    pub sent_id: String,
    pub preverbal: Vec<Constituent>,
    pub verb_position: usize,
    /// Inclusive position range after the verb, if any.
    pub postverbal_suffix: Option<(usize, usize)>,
    pub length_policy: LengthPolicy,
    /// Counted words in the whole sentence.
    pub n_words: u64,
    /// Dependency length of every arc that is not a verb-to-preverbal-head
    /// arc. Reordering preverbal constituents never changes it.
    pub fixed_dl: u64,
}

impl ClauseLayout {
    /// Layout built from bare constituent lengths and right offsets, with
    /// a verb-final sentence and no other arcs contributing length.
    pub fn from_parts(
        sent_id: impl Into<String>,
        lengths: &[u64],
        right_offsets: &[u64],
    ) -> Result<Self> {
        if lengths.len() != right_offsets.len() {
            return Err(Error::domain("lengths and right offsets differ in size"));
        }
        let mut preverbal = Vec::with_capacity(lengths.len());
        let mut next = 1usize;
        for (i, (&len, &off)) in lengths.iter().zip(right_offsets).enumerate() {
            if len == 0 || off >= len {
                return Err(Error::domain(format!(
                    "constituent {i}: need 0 <= right_offset < length, got {off} and {len}"
                )));
            }
            let start = next;
            let end = start + len as usize - 1;
            preverbal.push(Constituent {
                head_position: end - off as usize,
                start,
                end,
                length: len,
                right_offset: off,
                deprel: "dep".into(),
            });
            next = end + 1;
        }
        Ok(ClauseLayout {
            sent_id: sent_id.into(),
            preverbal,
            verb_position: next,
            postverbal_suffix: None,
            length_policy: LengthPolicy::default(),
            n_words: next as u64,
            fixed_dl: 0,
        })
    }

    /// Layout restored from its persisted summary. Word positions are not
    /// persisted, so `start`, `end` and `head_position` hold slot numbers.
    pub fn from_summary(
        sent_id: impl Into<String>,
        n_words: u64,
        fixed_dl: u64,
        lengths: &[u64],
        right_offsets: &[u64],
        deprels: &[String],
    ) -> Result<Self> {
        if lengths.len() != right_offsets.len() || lengths.len() != deprels.len() {
            return Err(Error::domain("layout summary columns differ in size"));
        }
        let mut preverbal = Vec::with_capacity(lengths.len());
        for (i, ((&length, &right_offset), deprel)) in
            lengths.iter().zip(right_offsets).zip(deprels).enumerate()
        {
            if right_offset >= length && !(length == 0 && right_offset == 0) {
                return Err(Error::domain(format!(
                    "constituent {i}: right offset {right_offset} does not fit length {length}"
                )));
            }
            preverbal.push(Constituent {
                head_position: i + 1,
                start: i + 1,
                end: i + 1,
                length,
                right_offset,
                deprel: deprel.clone(),
            });
        }
        let counted: u64 = lengths.iter().sum();
        if counted > n_words {
            return Err(Error::domain("constituents are longer than the sentence"));
        }
        Ok(ClauseLayout {
            sent_id: sent_id.into(),
            verb_position: preverbal.len() + 1,
            preverbal,
            postverbal_suffix: None,
            length_policy: LengthPolicy::default(),
            n_words,
            fixed_dl,
        })
    }

    pub fn n_constituents(&self) -> usize {
        self.preverbal.len()
    }

    pub fn lengths(&self) -> Vec<u64> {
        self.preverbal.iter().map(|c| c.length).collect()
    }

    /// Sum of the verb-to-head arc lengths when constituents are placed in
    /// `order` (slot 0 sentence-initial, last slot verb-adjacent).
    pub fn root_arc_total(&self, order: &[usize]) -> Result<u64> {
        check_permutation(order, self.preverbal.len())?;
        Ok(self.root_arc_total_unchecked(order))
    }

    pub(crate) fn root_arc_total_unchecked(&self, order: &[usize]) -> u64 {
        let mut passed = 0;
        let mut total = 0;
        for &c in order.iter().rev() {
            let con = &self.preverbal[c];
            total += con.right_offset + passed;
            passed += con.length;
        }
        total
    }
}

pub fn root_arc_total(layout: &ClauseLayout, order: &[usize]) -> Result<u64> {
    layout.root_arc_total(order)
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::domain(format!(
            "order has {} entries for {n} constituents",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::domain(format!(
                "{order:?} is not a permutation of 0..{n}"
            )));
        }
    }
    Ok(())
}

/// Sum of dependency lengths over all non-root words.
pub fn total_dependency_length(sentence: &Sentence, policy: LengthPolicy) -> Result<u64> {
    let counter = WordCounter::new(&sentence.tokens, policy);
    let n = sentence.len();
    let mut total = 0;
    for tok in &sentence.tokens {
        if tok.head == 0 {
            continue;
        }
        if tok.head > n || tok.head == tok.position {
            return Err(TreeError::DanglingHead {
                position: tok.position,
                head: tok.head,
            }
            .into());
        }
        total += counter.between(tok.head, tok.position);
    }
    Ok(total)
}

pub fn extract_layout(tree: &DepTree<'_>, policy: LengthPolicy) -> Result<ClauseLayout, TreeError> {
    let sentence = tree.sentence;
    let counter = WordCounter::new(&sentence.tokens, policy);
    let ext = subtree_extents(tree);
    let verb = tree.root;
    let n = sentence.len();

    let mut preverbal = Vec::new();
    for &d in &tree.children[verb] {
        let (lo, hi, size) = ext[d];
        if hi < verb {
            if hi + 1 - lo != size {
                return Err(TreeError::NonContiguous(d));
            }
            preverbal.push(Constituent {
                head_position: d,
                start: lo,
                end: hi,
                length: counter.span(lo, hi),
                right_offset: counter.span(d + 1, hi),
                deprel: sentence.token(d).deprel.clone(),
            });
        } else if lo < verb {
            return Err(TreeError::Straddling(d));
        }
    }
    // Non-contiguous yields elsewhere can leave words before the verb that
    // no preverbal constituent covers.
    let covered: usize = preverbal.iter().map(|c| c.end + 1 - c.start).sum();
    if covered != verb - 1 {
        let stray = (1..verb)
            .find(|&p| !preverbal.iter().any(|c| (c.start..=c.end).contains(&p)))
            .unwrap_or(verb);
        return Err(TreeError::NonContiguous(stray));
    }

    let mut layout = ClauseLayout {
        sent_id: sentence.sent_id.clone(),
        preverbal,
        verb_position: verb,
        postverbal_suffix: (verb < n).then_some((verb + 1, n)),
        length_policy: policy,
        n_words: counter.total(),
        fixed_dl: 0,
    };
    let identity: Vec<usize> = (0..layout.preverbal.len()).collect();
    let root_arcs = layout.root_arc_total_unchecked(&identity);
    let total: u64 = sentence
        .tokens
        .iter()
        .filter(|t| t.head != 0)
        .map(|t| counter.between(t.head, t.position))
        .sum();
    layout.fixed_dl = total - root_arcs;
    Ok(layout)
}

/// Rebuild a sentence with its preverbal constituents moved as blocks into
/// `order`. Words keep their internal order; the verb and everything after
/// it stay in place. Multiword-token lines are dropped since their ranges no
/// longer apply.
pub fn reorder_sentence(
    sentence: &Sentence,
    layout: &ClauseLayout,
    order: &[usize],
) -> Result<Sentence> {
    check_permutation(order, layout.preverbal.len())?;
    let n = sentence.len();
    let mut old_positions = Vec::with_capacity(n);
    for &c in order {
        let con = &layout.preverbal[c];
        old_positions.extend(con.start..=con.end);
    }
    old_positions.extend(layout.verb_position..=n);
    if old_positions.len() != n {
        return Err(Error::domain("layout does not cover the sentence"));
    }
    let mut new_of_old = vec![0usize; n + 1];
    for (i, &old) in old_positions.iter().enumerate() {
        new_of_old[old] = i + 1;
    }
    let tokens = old_positions
        .iter()
        .enumerate()
        .map(|(i, &old)| {
            let t = sentence.token(old);
            Token {
                position: i + 1,
                head: if t.head == 0 { 0 } else { new_of_old[t.head] },
                ..t.clone()
            }
        })
        .collect();
    Ok(Sentence {
        sent_id: sentence.sent_id.clone(),
        tokens,
        source_line: sentence.source_line,
        comments: Vec::new(),
        extra_lines: Vec::new(),
    })
}
