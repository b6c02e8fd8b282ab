//! k-fold cross-validation with folds drawn over reference sentences, so
//! all pairs built from one reference land in the same fold.

use std::collections::HashMap;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::rank::logistic::{fit_logistic, FitOptions, ModelFit};
use crate::rank::pairs::{Feature, PairRecord};
use crate::stats::Standardizer;
use crate::variants::SeedPolicy;

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Percent correct per fold.
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Held-out correctness of every pair, in input order.
    pub correct: Vec<bool>,
    pub fold_of_pair: Vec<usize>,
}

/// Fold index for each group, in the order given. Groups are shuffled with
/// the seed and dealt round-robin, so fold sizes differ by at most one.
pub fn assign_folds(n_groups: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::domain("cross-validation needs at least two folds"));
    }
    if n_groups < k {
        return Err(Error::Data(format!(
            "{n_groups} reference groups cannot fill {k} folds"
        )));
    }
    let mut idx: Vec<usize> = (0..n_groups).collect();
    idx.shuffle(&mut SeedPolicy::new(seed).rng("folds", ""));
    let mut folds = vec![0; n_groups];
    for (rank, g) in idx.into_iter().enumerate() {
        folds[g] = rank % k;
    }
    Ok(folds)
}

/// Standardize the chosen delta columns of `pairs` with one standardizer per
/// feature.
pub fn standardized_columns(
    pairs: &[&PairRecord],
    features: &[Feature],
    scalers: &[Standardizer],
) -> Vec<Vec<f64>> {
    features
        .iter()
        .zip(scalers)
        .map(|(&f, s)| pairs.iter().map(|p| s.apply(p.delta.get(f))).collect())
        .collect()
}

/// Fit standardizers and a logistic model on `pairs`.
pub fn fit_standardized(
    pairs: &[&PairRecord],
    features: &[Feature],
    opts: FitOptions,
) -> Result<(Vec<Standardizer>, ModelFit)> {
    let scalers = features
        .iter()
        .map(|&f| {
            let raw: Vec<f64> = pairs.iter().map(|p| p.delta.get(f)).collect();
            Standardizer::fit(&raw).map_err(|e| Error::Data(format!("feature {f}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let columns = standardized_columns(pairs, features, &scalers);
    let named: Vec<(&str, &[f64])> = features
        .iter()
        .zip(&columns)
        .map(|(f, c)| (f.as_str(), c.as_slice()))
        .collect();
    let labels: Vec<u8> = pairs.iter().map(|p| p.label).collect();
    let fit = fit_logistic(&named, &labels, opts)?;
    Ok((scalers, fit))
}

pub fn cross_validate(
    pairs: &[PairRecord],
    features: &[Feature],
    k: usize,
    seed: u64,
    opts: FitOptions,
    exec: Execution,
) -> Result<CvReport> {
    let mut group_of: HashMap<&str, usize> = HashMap::new();
    let group_ids: Vec<usize> = pairs
        .iter()
        .map(|p| {
            let next = group_of.len();
            *group_of.entry(p.sent_id.as_str()).or_insert(next)
        })
        .collect();
    let folds = assign_folds(group_of.len(), k, seed)?;
    let fold_of_pair: Vec<usize> = group_ids.iter().map(|&g| folds[g]).collect();

    let fold_ids: Vec<usize> = (0..k).collect();
    let results = par::map(&fold_ids, exec, |&fold| -> Result<Vec<(usize, bool)>> {
        let train: Vec<&PairRecord> = pairs
            .iter()
            .zip(&fold_of_pair)
            .filter(|(_, &f)| f != fold)
            .map(|(p, _)| p)
            .collect();
        let (scalers, fit) = fit_standardized(&train, features, opts)?;
        Ok(pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| fold_of_pair[*i] == fold)
            .map(|(i, p)| {
                let row: Vec<f64> = features
                    .iter()
                    .zip(&scalers)
                    .map(|(&f, s)| s.apply(p.delta.get(f)))
                    .collect();
                (i, fit.predict(&row) == p.label)
            })
            .collect())
    });

    let mut correct = vec![false; pairs.len()];
    let mut fold_accuracies = Vec::with_capacity(k);
    for r in results {
        let held_out = r?;
        let hits = held_out.iter().filter(|(_, ok)| *ok).count();
        fold_accuracies.push(100.0 * hits as f64 / held_out.len() as f64);
        for (i, ok) in held_out {
            correct[i] = ok;
        }
    }
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / k as f64;
    Ok(CvReport {
        fold_accuracies,
        mean_accuracy,
        correct,
        fold_of_pair,
    })
}
