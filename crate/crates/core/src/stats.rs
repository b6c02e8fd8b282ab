//! Corpus aggregates and small numeric helpers shared by the ranking model.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::tree::ClauseLayout;
use crate::variants::{Strategy, VariantRecord};

/// Mean constituent length per preverbal slot for clauses with exactly
/// `n_constituents` constituents. Slot 0 is sentence-initial.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionalProfile {
    pub n_constituents: usize,
    pub mean_lengths: Vec<f64>,
    pub counts: usize,
}

pub fn positional_mean_lengths<'a, I>(corpus: I, n: usize) -> Result<PositionalProfile>
where
    I: IntoIterator<Item = &'a ClauseLayout>,
{
    if n < 2 {
        return Err(Error::domain("positional profiles need n >= 2"));
    }
    let mut sums = vec![0u64; n];
    let mut count = 0usize;
    for layout in corpus.into_iter().filter(|l| l.n_constituents() == n) {
        for (slot, c) in layout.preverbal.iter().enumerate() {
            sums[slot] += c.length;
        }
        count += 1;
    }
    let mean_lengths = if count == 0 {
        Vec::new()
    } else {
        sums.iter().map(|&s| s as f64 / count as f64).collect()
    };
    Ok(PositionalProfile {
        n_constituents: n,
        mean_lengths,
        counts: count,
    })
}

/// What produced an order: the corpus itself or one of the strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrderKind {
    Reference,
    Strategy(Strategy),
}

impl OrderKind {
    pub const ALL: [OrderKind; 5] = [
        OrderKind::Reference,
        OrderKind::Strategy(Strategy::Random),
        OrderKind::Strategy(Strategy::Ascending),
        OrderKind::Strategy(Strategy::Descending),
        OrderKind::Strategy(Strategy::LeastEffort),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OrderKind::Reference => "reference",
            OrderKind::Strategy(s) => s.as_str(),
        }
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Mean of `total_dl / n_words` over the records of one kind with `n`
/// constituents, or `None` when nothing matches.
pub fn mean_normalized_dl(
    records: &[(OrderKind, VariantRecord)],
    kind: OrderKind,
    n: usize,
) -> Option<f64> {
    let (sum, count) = records
        .iter()
        .filter(|(k, r)| *k == kind && r.n_constituents == n && r.n_words > 0)
        .fold((0.0, 0usize), |(s, c), (_, r)| {
            (s + r.total_dl as f64 / r.n_words as f64, c + 1)
        });
    (count > 0).then(|| sum / count as f64)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample Pearson correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::domain(
            "pearson needs two equal-length samples of size >= 2",
        ));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined(
            "correlation undefined for a constant sample".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Centering and scaling fitted on one sample (sample standard deviation),
/// reusable on another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardizer {
    pub mean: f64,
    pub sd: f64,
}

impl Standardizer {
    pub fn fit(column: &[f64]) -> Result<Self> {
        if column.len() < 2 {
            return Err(Error::domain("z-scores need at least two values"));
        }
        let m = mean(column);
        let var = column.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (column.len() - 1) as f64;
        let sd = var.sqrt();
        if !sd.is_finite() || sd <= 0.0 {
            return Err(Error::Undefined(
                "z-scores undefined for a zero-spread column".into(),
            ));
        }
        Ok(Standardizer { mean: m, sd })
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.mean) / self.sd
    }

    pub fn apply_all(&self, column: &[f64]) -> Vec<f64> {
        column.iter().map(|&x| self.apply(x)).collect()
    }
}

pub fn zscore(column: &[f64]) -> Result<Vec<f64>> {
    Ok(Standardizer::fit(column)?.apply_all(column))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    First,
    Last,
}

impl Slot {
    pub fn as_str(self) -> &'static str {
        match self {
            Slot::First => "first",
            Slot::Last => "last",
        }
    }
}

/// Distribution of the head relation of the constituent in the first or
/// last preverbal slot. Returns counts alongside proportions.
pub fn deprel_position_profile<'a, I>(corpus: I, slot: Slot) -> BTreeMap<String, (usize, f64)>
where
    I: IntoIterator<Item = &'a ClauseLayout>,
{
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut total = 0usize;
    for layout in corpus {
        let c = match slot {
            Slot::First => layout.preverbal.first(),
            Slot::Last => layout.preverbal.last(),
        };
        if let Some(c) = c {
            *counts.entry(c.deprel.clone()).or_default() += 1;
            total += 1;
        }
    }
    counts
        .into_iter()
        .map(|(k, c)| (k, (c, c as f64 / total as f64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variants::Permutation;

    fn layout(lengths: &[u64]) -> ClauseLayout {
        ClauseLayout::from_parts("x", lengths, &vec![0; lengths.len()]).unwrap()
    }

    #[test]
    fn positional_means() {
        let p = positional_mean_lengths(&[layout(&[1, 3]), layout(&[3, 1])], 2).unwrap();
        assert_eq!(p.mean_lengths, [2.0, 2.0]);
        let p = positional_mean_lengths(&[layout(&[2, 3, 1, 4])], 4).unwrap();
        assert_eq!(p.mean_lengths, [2.0, 3.0, 1.0, 4.0]);
        // (1,2,3), (4,4,1), (1,6,2) by hand: [2, 4, 2]; the 2-constituent one is ignored
        let corpus = [
            layout(&[1, 2, 3]),
            layout(&[4, 4, 1]),
            layout(&[5, 5]),
            layout(&[1, 6, 2]),
        ];
        let p = positional_mean_lengths(&corpus, 3).unwrap();
        assert_eq!(p.mean_lengths, [2.0, 4.0, 2.0]);
        assert_eq!(p.counts, 3);
        let empty = positional_mean_lengths(&corpus, 5).unwrap();
        assert_eq!((empty.counts, empty.mean_lengths.len()), (0, 0));
    }

    fn record(total_dl: u64, n_words: u64) -> (OrderKind, VariantRecord) {
        (
            OrderKind::Reference,
            VariantRecord {
                sent_id: "s".into(),
                order: Permutation::identity(2),
                is_reference: true,
                n_constituents: 2,
                n_words,
                cl_last: 1,
                total_dl,
                root_arc_dl: 0,
            },
        )
    }

    #[test]
    fn normalized_dl() {
        let mut one = record(20, 11);
        one.1.n_constituents = 4;
        let v = mean_normalized_dl(&[one], OrderKind::Reference, 4).unwrap();
        assert!((v - 20.0 / 11.0).abs() < 1e-12);
        assert_eq!(
            mean_normalized_dl(&[record(0, 5)], OrderKind::Reference, 2),
            Some(0.0)
        );
        assert_eq!(
            mean_normalized_dl(&[record(10, 10), record(20, 10)], OrderKind::Reference, 2),
            Some(1.5)
        );
        assert_eq!(
            mean_normalized_dl(&[record(10, 10)], OrderKind::Reference, 3),
            None
        );
        assert_eq!(
            mean_normalized_dl(&[record(10, 10)], OrderKind::Strategy(Strategy::Random), 2),
            None
        );
    }

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1., 2., 3.], &[2., 4., 6.]).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&[1., 2., 3.], &[3., 2., 1.]).unwrap() + 1.0).abs() < 1e-12);
        assert!((pearson(&[1., 2., 3., 4.], &[1., 3., 2., 4.]).unwrap() - 0.8).abs() < 1e-12);
        assert!(matches!(
            pearson(&[1., 1.], &[1., 2.]),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn zscore_examples() {
        assert_eq!(zscore(&[1., 2., 3.]).unwrap(), [-1.0, 0.0, 1.0]);
        let z = zscore(&[10., 20.]).unwrap();
        assert!((z[0] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((z[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(zscore(&[4., 4., 4.]).is_err());
        let col = [3.0, -1.5, 8.25, 0.0, 2.0];
        let once = zscore(&col).unwrap();
        let twice = zscore(&once).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn deprel_profiles() {
        let mut a = layout(&[1, 2]);
        a.preverbal[0].deprel = "cc".into();
        let mut b = a.clone();
        let only_cc = deprel_position_profile([&a, &b], Slot::First);
        assert_eq!(only_cc["cc"], (2, 1.0));
        b.preverbal[0].deprel = "nsubj".into();
        let split = deprel_position_profile([&a, &b], Slot::First);
        assert_eq!(split["cc"].1, 0.5);
        assert_eq!(split["nsubj"].1, 0.5);

        // ten sentences tallied by hand: 4 nsubj, 3 obl, 2 advmod, 1 obj
        let tags = [
            "nsubj", "obl", "nsubj", "advmod", "obj", "nsubj", "obl", "advmod", "obl", "nsubj",
        ];
        let corpus: Vec<ClauseLayout> = tags
            .iter()
            .map(|t| {
                let mut l = layout(&[2, 1]);
                l.preverbal[1].deprel = t.to_string();
                l
            })
            .collect();
        let prof = deprel_position_profile(&corpus, Slot::Last);
        assert_eq!(prof["nsubj"], (4, 0.4));
        assert_eq!(prof["obl"], (3, 0.3));
        assert_eq!(prof["advmod"], (2, 0.2));
        assert_eq!(prof["obj"], (1, 0.1));
        let total: f64 = prof.values().map(|v| v.1).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}
