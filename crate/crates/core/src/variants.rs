//! Counterfactual constituent orders.
//!
//! An order lists constituent indices by slot: `order[0]` is the
//! sentence-initial constituent and the last entry sits next to the verb.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::tree::{check_permutation, ClauseLayout};

/// Largest constituent count whose factorial fits in a `u64`.
pub const MAX_CONSTITUENTS: usize = 20;

pub const DEFAULT_CAP: usize = 120;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        check_permutation(&order, order.len())?;
        Ok(Permutation(order))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &c)| i == c)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(Permutation(Vec::new()));
        }
        let order = s
            .split('-')
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| Error::domain(format!("bad order `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(order)
    }
}

/// Derives one independent random stream per sentence from a global seed,
/// so results do not depend on processing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedPolicy {
    pub global_seed: u64,
}

impl SeedPolicy {
    pub fn new(global_seed: u64) -> Self {
        SeedPolicy { global_seed }
    }

    /// Stable 64-bit seed for `(global_seed, stream, key)`.
    pub fn derive(&self, stream: &str, key: &str) -> u64 {
        let mut h = Sha256::new();
        h.update(self.global_seed.to_le_bytes());
        h.update((stream.len() as u64).to_le_bytes());
        h.update(stream.as_bytes());
        h.update(key.as_bytes());
        let digest = h.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(bytes)
    }

    pub fn rng(&self, stream: &str, key: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derive(stream, key))
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Rearranges `v` into the next permutation in lexicographic order; returns
/// false (leaving `v` sorted ascending) after the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        v.reverse();
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Non-identity orders of `n` constituents: all of them in lexicographic
/// order when there are at most `cap`, otherwise `cap` distinct ones drawn
/// uniformly.
pub fn enumerate_or_sample<R: rand::Rng + ?Sized>(
    n: usize,
    cap: usize,
    rng: &mut R,
) -> Result<Vec<Permutation>> {
    if n == 0 {
        return Err(Error::domain("cannot permute zero constituents"));
    }
    if cap == 0 {
        return Err(Error::domain("variant cap must be at least 1"));
    }
    if n > MAX_CONSTITUENTS {
        return Err(Error::domain(format!(
            "{n} constituents exceed the limit of {MAX_CONSTITUENTS}"
        )));
    }
    let alternatives = factorial(n) - 1;
    if alternatives <= cap as u64 {
        let mut cur: Vec<usize> = (0..n).collect();
        let mut out = Vec::with_capacity(alternatives as usize);
        while next_permutation(&mut cur) {
            out.push(Permutation(cur.clone()));
        }
        return Ok(out);
    }
    let mut seen = HashSet::with_capacity(cap);
    let mut out = Vec::with_capacity(cap);
    let mut cur: Vec<usize> = (0..n).collect();
    while out.len() < cap {
        cur.shuffle(rng);
        let p = Permutation(cur.clone());
        if !p.is_identity() && seen.insert(p.clone()) {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Random,
    Ascending,
    Descending,
    LeastEffort,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Random,
        Strategy::Ascending,
        Strategy::Descending,
        Strategy::LeastEffort,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Ascending => "ascending",
            Strategy::Descending => "descending",
            Strategy::LeastEffort => "least_effort",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown strategy `{s}`")))
    }
}

pub fn strategy_order<R: rand::Rng + ?Sized>(
    layout: &ClauseLayout,
    strategy: Strategy,
    rng: &mut R,
) -> Permutation {
    let n = layout.n_constituents();
    let mut order: Vec<usize> = (0..n).collect();
    match strategy {
        Strategy::Ascending => order.sort_by_key(|&c| layout.preverbal[c].length),
        Strategy::Descending => {
            order.sort_by_key(|&c| std::cmp::Reverse(layout.preverbal[c].length))
        }
        Strategy::Random => order.shuffle(rng),
        Strategy::LeastEffort => {
            order.shuffle(rng);
            return least_effort_transform(&Permutation(order), layout);
        }
    }
    Permutation(order)
}

/// Move the shortest constituent next to the verb, leaving the relative
/// order of the rest untouched. Among equally short constituents the one
/// already closest to the verb is moved.
pub fn least_effort_transform(base: &Permutation, layout: &ClauseLayout) -> Permutation {
    let order = base.as_slice();
    let Some(min_len) = order.iter().map(|&c| layout.preverbal[c].length).min() else {
        return base.clone();
    };
    let slot = order
        .iter()
        .rposition(|&c| layout.preverbal[c].length == min_len)
        .unwrap();
    let mut out = order.to_vec();
    let moved = out.remove(slot);
    out.push(moved);
    Permutation(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantRecord {
    pub sent_id: String,
    pub order: Permutation,
    pub is_reference: bool,
    pub n_constituents: usize,
    pub n_words: u64,
    /// Length of the constituent in the verb-adjacent slot.
    pub cl_last: u64,
    pub total_dl: u64,
    pub root_arc_dl: u64,
}

/// Evaluate one order of a layout. Internal and postverbal arcs do not move
/// with the constituents, so total DL is the layout's fixed part plus the
/// verb-to-head arcs of this order.
pub fn realize(layout: &ClauseLayout, order: &Permutation) -> Result<VariantRecord> {
    let root_arc_dl = layout.root_arc_total(order.as_slice())?;
    let cl_last = order
        .as_slice()
        .last()
        .map(|&c| layout.preverbal[c].length)
        .unwrap_or(0);
    Ok(VariantRecord {
        sent_id: layout.sent_id.clone(),
        order: order.clone(),
        is_reference: order.is_identity(),
        n_constituents: layout.n_constituents(),
        n_words: layout.n_words,
        cl_last,
        total_dl: layout.fixed_dl + root_arc_dl,
        root_arc_dl,
    })
}

pub const VARIANT_STREAM: &str = "variants";

/// Reference record followed by at most `cap` variant records.
pub fn generate_variants(
    layout: &ClauseLayout,
    cap: usize,
    seeds: &SeedPolicy,
) -> Result<Vec<VariantRecord>> {
    let n = layout.n_constituents();
    let mut rng = seeds.rng(VARIANT_STREAM, &layout.sent_id);
    let orders = enumerate_or_sample(n, cap, &mut rng)?;
    let mut out = Vec::with_capacity(orders.len() + 1);
    out.push(realize(layout, &Permutation::identity(n))?);
    for order in &orders {
        out.push(realize(layout, order)?);
    }
    Ok(out)
}
