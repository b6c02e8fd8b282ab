//! Independent reference implementations used by the integration tests.
//! None of these call into the library's length, tree or fitting code.

#![allow(dead_code, clippy::needless_range_loop)]

use ordolex::conllu::{Sentence, Token};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn token(position: usize, upos: &str, head: usize, deprel: &str) -> Token {
    Token {
        position,
        form: format!("w{position}"),
        lemma: "_".into(),
        upos: upos.into(),
        xpos: "_".into(),
        feats: "_".into(),
        head,
        deprel: deprel.into(),
        deps: "_".into(),
        misc: "_".into(),
    }
}

pub fn sentence(sent_id: &str, tokens: Vec<Token>) -> Sentence {
    Sentence {
        sent_id: sent_id.into(),
        tokens,
        source_line: 0,
        comments: vec![format!("sent_id = {sent_id}")],
        extra_lines: Vec::new(),
    }
}

fn counts(t: &Token, count_punct: bool) -> bool {
    count_punct || t.upos != "PUNCT"
}

/// Sum over arcs of the counted words strictly between head and dependent,
/// by direct scanning.
pub fn naive_total_dl(s: &Sentence, count_punct: bool) -> u64 {
    let mut total = 0;
    for t in &s.tokens {
        if t.head == 0 {
            continue;
        }
        let (lo, hi) = if t.head < t.position {
            (t.head, t.position)
        } else {
            (t.position, t.head)
        };
        total += s.tokens[lo..hi - 1]
            .iter()
            .filter(|w| counts(w, count_punct))
            .count() as u64;
    }
    total
}

/// Whether `anc` dominates `node`, following heads upwards.
fn dominates(s: &Sentence, anc: usize, mut node: usize) -> bool {
    for _ in 0..=s.tokens.len() {
        if node == anc {
            return true;
        }
        if node == 0 {
            return false;
        }
        node = s.tokens[node - 1].head;
    }
    false
}

/// Classic arc-based definition: every word between a head and its
/// dependent is dominated by the head.
pub fn projective_by_arcs(s: &Sentence) -> bool {
    s.tokens.iter().filter(|t| t.head != 0).all(|t| {
        let (lo, hi) = if t.head < t.position {
            (t.head, t.position)
        } else {
            (t.position, t.head)
        };
        (lo + 1..hi).all(|k| dominates(s, t.head, k))
    })
}

/// A random rooted tree over `n` words with arbitrary (often crossing) word
/// order. Position of the root is random.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut heads = vec![0; n + 1];
    for i in 1..n {
        heads[order[i]] = order[rng.random_range(0..i)];
    }
    heads[1..].to_vec()
}

/// A random projective sentence: a random tree linearized so that every
/// subtree is contiguous. The root is a VERB; about `punct_rate` of the other
/// words are PUNCT.
pub fn random_projective<R: Rng>(
    rng: &mut R,
    sent_id: &str,
    n: usize,
    punct_rate: f64,
) -> Sentence {
    // children lists over abstract node ids 0..n, node 0 is the root
    let mut children = vec![Vec::new(); n];
    for v in 1..n {
        children[rng.random_range(0..v)].push(v);
    }
    let mut linear = Vec::with_capacity(n);
    fn place<R: Rng>(v: usize, children: &[Vec<usize>], rng: &mut R, out: &mut Vec<usize>) {
        let mut kids = children[v].clone();
        kids.shuffle(rng);
        let split = rng.random_range(0..=kids.len());
        for &k in &kids[..split] {
            place(k, children, rng, out);
        }
        out.push(v);
        for &k in &kids[split..] {
            place(k, children, rng, out);
        }
    }
    place(0, &children, rng, &mut linear);
    let mut pos_of = vec![0; n];
    for (i, &v) in linear.iter().enumerate() {
        pos_of[v] = i + 1;
    }
    let mut parent = vec![usize::MAX; n];
    for (v, kids) in children.iter().enumerate() {
        for &k in kids {
            parent[k] = v;
        }
    }
    let tokens = linear
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v == 0 {
                token(i + 1, "VERB", 0, "root")
            } else {
                let upos = if rng.random_bool(punct_rate) {
                    "PUNCT"
                } else {
                    "NOUN"
                };
                let rel = ["nsubj", "obj", "obl", "advmod", "amod", "case"][v % 6];
                token(i + 1, upos, pos_of[parent[v]], rel)
            }
        })
        .collect();
    sentence(sent_id, tokens)
}

/// Every permutation of 0..n, generated recursively.
pub fn all_orders(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Verb-to-head arc lengths when the constituents are laid out left to
/// right in `order` and the verb follows them.
pub fn root_arcs_by_placement(lengths: &[u64], offsets: &[u64], order: &[usize]) -> u64 {
    let verb: u64 = lengths.iter().sum::<u64>() + 1;
    let mut start = 1;
    let mut total = 0;
    for &c in order {
        let head = start + lengths[c] - 1 - offsets[c];
        total += verb - head - 1;
        start += lengths[c];
    }
    total
}

fn neg_log_lik(b0: f64, b1: f64, x: &[f64], y: &[u8]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let eta = b0 + b1 * xi;
            let log1pexp = if eta > 0.0 {
                eta + (-eta).exp().ln_1p()
            } else {
                eta.exp().ln_1p()
            };
            log1pexp - f64::from(yi) * eta
        })
        .sum()
}

fn golden_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if hi - lo < 1e-11 {
            break;
        }
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    (lo + hi) / 2.0
}

/// Maximum-likelihood intercept and slope of a one-feature logistic model by
/// nested golden-section search on the negative log-likelihood. The search
/// box is `[-bound, bound]` in both coordinates.
pub fn logistic_oracle(x: &[f64], y: &[u8], bound: f64) -> (f64, f64) {
    let best_b0 = |b1: f64| golden_min(-bound, bound, |b0| neg_log_lik(b0, b1, x, y));
    let b1 = golden_min(-bound, bound, |b1| neg_log_lik(best_b0(b1), b1, x, y));
    (best_b0(b1), b1)
}

/// Two-tailed exact McNemar p-value, summing binomial terms in log space.
pub fn mcnemar_exact_oracle(b: u64, c: u64) -> f64 {
    let n = b + c;
    let k = b.min(c);
    let ln_fact = |m: u64| (1..=m).map(|i| (i as f64).ln()).sum::<f64>();
    let tail: f64 = (0..=k)
        .map(|i| (ln_fact(n) - ln_fact(i) - ln_fact(n - i) - n as f64 * 2f64.ln()).exp())
        .sum();
    (2.0 * tail).min(1.0)
}

/// Maximum-likelihood coefficients (intercept first) by plain Newton
/// iterations, solving each step with Gaussian elimination.
pub fn logistic_newton_oracle(columns: &[&[f64]], y: &[u8]) -> Vec<f64> {
    let n = y.len();
    let p = columns.len() + 1;
    let row = |i: usize| -> Vec<f64> {
        std::iter::once(1.0)
            .chain(columns.iter().map(|c| c[i]))
            .collect()
    };
    let mut beta = vec![0.0; p];
    for _ in 0..200 {
        let mut g = vec![0.0; p];
        let mut h = vec![vec![0.0; p]; p];
        for i in 0..n {
            let x = row(i);
            let eta: f64 = x.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let mu = 1.0 / (1.0 + (-eta).exp());
            for a in 0..p {
                g[a] += x[a] * (f64::from(y[i]) - mu);
                for b in 0..p {
                    h[a][b] += mu * (1.0 - mu) * x[a] * x[b];
                }
            }
        }
        let step = solve(h, g);
        let size = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        for (b, s) in beta.iter_mut().zip(&step) {
            *b += s;
        }
        if size < 1e-14 {
            break;
        }
    }
    beta
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}
