//! Pairwise ranking transformation: each reference/variant pair becomes one
//! training row holding the feature difference of its two members.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Neg, Sub};
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::variants::{SeedPolicy, VariantRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    ClLast,
    TotalDl,
}

impl Feature {
    pub const ALL: [Feature; 2] = [Feature::ClLast, Feature::TotalDl];

    pub fn as_str(self) -> &'static str {
        match self {
            Feature::ClLast => "cl_last",
            Feature::TotalDl => "total_dl",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Feature::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown feature `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FeatureVector {
    pub cl_last: f64,
    pub total_dl: f64,
}

impl FeatureVector {
    pub fn get(&self, feature: Feature) -> f64 {
        match feature {
            Feature::ClLast => self.cl_last,
            Feature::TotalDl => self.total_dl,
        }
    }
}

impl From<&VariantRecord> for FeatureVector {
    fn from(r: &VariantRecord) -> Self {
        FeatureVector {
            cl_last: r.cl_last as f64,
            total_dl: r.total_dl as f64,
        }
    }
}

impl Sub for FeatureVector {
    type Output = FeatureVector;

    fn sub(self, rhs: FeatureVector) -> FeatureVector {
        FeatureVector {
            cl_last: self.cl_last - rhs.cl_last,
            total_dl: self.total_dl - rhs.total_dl,
        }
    }
}

impl Neg for FeatureVector {
    type Output = FeatureVector;

    fn neg(self) -> FeatureVector {
        FeatureVector {
            cl_last: -self.cl_last,
            total_dl: -self.total_dl,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub sent_id: String,
    /// First member minus second member.
    pub delta: FeatureVector,
    /// 1 when the first member is the reference.
    pub label: u8,
}

impl PairRecord {
    /// The same pair with its members swapped.
    pub fn flipped(&self) -> PairRecord {
        PairRecord {
            sent_id: self.sent_id.clone(),
            delta: -self.delta,
            label: 1 - self.label,
        }
    }
}

/// Pairs alternate between reference-first (label 1) and variant-first
/// (label 0), so label counts per reference differ by at most one. The
/// first pair is reference-first unless `start_variant_first` is set.
pub fn build_pairs(
    reference: FeatureVector,
    variants: &[FeatureVector],
    sent_id: &str,
    start_variant_first: bool,
) -> Vec<PairRecord> {
    let shift = usize::from(start_variant_first);
    variants
        .iter()
        .enumerate()
        .map(|(k, &var)| {
            if (k + shift) % 2 == 0 {
                PairRecord {
                    sent_id: sent_id.to_string(),
                    delta: reference - var,
                    label: 1,
                }
            } else {
                PairRecord {
                    sent_id: sent_id.to_string(),
                    delta: var - reference,
                    label: 0,
                }
            }
        })
        .collect()
}

/// Group records by sentence, keeping first-appearance order.
pub fn group_records(records: &[VariantRecord]) -> Vec<(&str, Vec<&VariantRecord>)> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut groups: Vec<(&str, Vec<&VariantRecord>)> = Vec::new();
    for r in records {
        let i = *index.entry(r.sent_id.as_str()).or_insert_with(|| {
            groups.push((r.sent_id.as_str(), Vec::new()));
            groups.len() - 1
        });
        groups[i].1.push(r);
    }
    groups
}

/// Pairs for a whole variant table. Each sentence needs exactly one
/// reference record; its variants are paired in table order. The
/// alternation carries on from one sentence to the next, so the whole table
/// is balanced to within one label as well.
pub fn pairs_from_records(records: &[VariantRecord]) -> Result<Vec<PairRecord>> {
    let mut pairs = Vec::new();
    for (sent_id, group) in group_records(records) {
        let mut refs = group.iter().filter(|r| r.is_reference);
        let reference = match (refs.next(), refs.next()) {
            (Some(r), None) => FeatureVector::from(*r),
            _ => {
                return Err(Error::Data(format!(
                    "sentence {sent_id} needs exactly one reference record"
                )))
            }
        };
        let variants: Vec<FeatureVector> = group
            .iter()
            .filter(|r| !r.is_reference)
            .map(|r| FeatureVector::from(*r))
            .collect();
        let variant_first = pairs.len() % 2 == 1;
        pairs.extend(build_pairs(reference, &variants, sent_id, variant_first));
    }
    Ok(pairs)
}

/// Chance-level control: within every sentence, hand the reference flag to
/// a uniformly chosen member.
pub fn shuffle_reference_labels(
    records: &[VariantRecord],
    seeds: &SeedPolicy,
) -> Vec<VariantRecord> {
    let mut out = Vec::with_capacity(records.len());
    for (sent_id, group) in group_records(records) {
        let pick = seeds
            .rng("label-shuffle", sent_id)
            .random_range(0..group.len());
        out.extend(group.iter().enumerate().map(|(i, r)| VariantRecord {
            is_reference: i == pick,
            ..(*r).clone()
        }));
    }
    out
}
