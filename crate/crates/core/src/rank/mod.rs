//! Reference-vs-variant classification: pair construction, logistic
//! regression, grouped cross-validation and significance statistics.

pub mod cv;
pub mod logistic;
pub mod pairs;
pub mod signif;

pub use cv::{assign_folds, cross_validate, standardized_columns, CvReport};
pub use logistic::{fit_logistic, FitOptions, ModelFit, INTERCEPT};
pub use pairs::{
    build_pairs, pairs_from_records, shuffle_reference_labels, Feature, FeatureVector, PairRecord,
};
pub use signif::{discordant_counts, mcnemar_test, vif, McNemar, Vif};
