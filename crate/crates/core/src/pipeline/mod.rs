//! The four pipeline commands. Each one reads its inputs, computes in
//! memory, and writes its tables under the output directory.
//!
//! | command    | reads                              | writes |
//! |------------|------------------------------------|--------|
//! | `variants` | CoNLL-U inputs                     | `variants.tsv`, `layouts.tsv`, `skiplog.tsv`, `manifest.tsv` |
//! | `stats`    | `variants.tsv`, `layouts.tsv`      | `positional_lengths.csv`, `strategy_dl.csv`, `deprel_profile.csv` |
//! | `classify` | `variants.tsv`                     | `coefficients.csv`, `accuracy.csv`, `mcnemar.csv`, `diagnostics.csv` |
//! | `report`   | all of the above                   | `report.txt` |

pub mod config;
pub mod tables;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::conllu::{parse_conllu, Sentence};
use crate::error::{Error, Result};
use crate::filter::{filter_corpus, SkipEntry};
use crate::par;
use crate::rank::cv::fit_standardized;
use crate::rank::{
    cross_validate, discordant_counts, mcnemar_test, pairs_from_records, vif, CvReport, Feature,
    FitOptions, McNemar, ModelFit, PairRecord, Vif,
};
use crate::stats::{
    deprel_position_profile, mean_normalized_dl, pearson, positional_mean_lengths, OrderKind, Slot,
};
use crate::tree::ClauseLayout;
use crate::variants::{
    generate_variants, least_effort_transform, realize, strategy_order, Permutation, SeedPolicy,
    Strategy, VariantRecord,
};

pub use config::{Overrides, PipelineConfig};

pub const VARIANTS_FILE: &str = "variants.tsv";
pub const LAYOUTS_FILE: &str = "layouts.tsv";
pub const SKIPLOG_FILE: &str = "skiplog.tsv";
pub const MANIFEST_FILE: &str = "manifest.tsv";
pub const REPORT_FILE: &str = "report.txt";

/// Stream used for the random base order of the strategy rows.
pub const STRATEGY_STREAM: &str = "strategy";

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Parse every input in order. Also returns the raw bytes for hashing.
pub fn read_inputs(cfg: &PipelineConfig) -> Result<(Vec<Sentence>, Vec<Vec<u8>>)> {
    if cfg.inputs.is_empty() {
        return Err(Error::Config("no input files given".into()));
    }
    let parsed = par::map(
        &cfg.inputs,
        cfg.execution,
        |path| -> Result<(Vec<Sentence>, Vec<u8>)> {
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            let sentences = parse_conllu(bytes.as_slice(), &path.display().to_string())?;
            Ok((sentences, bytes))
        },
    );
    let mut sentences = Vec::new();
    let mut raw = Vec::new();
    for r in parsed {
        let (s, b) = r?;
        sentences.extend(s);
        raw.push(b);
    }
    Ok((sentences, raw))
}

#[derive(Debug, Clone)]
pub struct VariantsOutput {
    /// Sentences in sent_id order, each as its reference record followed by
    /// its variants.
    pub records: Vec<VariantRecord>,
    pub layouts: Vec<ClauseLayout>,
    pub skiplog: Vec<SkipEntry>,
    pub warnings: Vec<String>,
}

/// Filter a corpus and generate variants for every kept sentence.
pub fn build_variants(sentences: Vec<Sentence>, cfg: &PipelineConfig) -> Result<VariantsOutput> {
    let outcome = filter_corpus(sentences, &cfg.filter, cfg.length);
    let mut skiplog = outcome.skiplog;
    let mut layouts: Vec<ClauseLayout> = outcome.kept.into_iter().map(|k| k.layout).collect();
    layouts.sort_by(|a, b| a.sent_id.cmp(&b.sent_id));

    let seeds = SeedPolicy::new(cfg.seed);
    let generated = par::map(&layouts, cfg.execution, |l| {
        generate_variants(l, cfg.cap, &seeds)
    });
    let mut records = Vec::new();
    let mut kept = Vec::with_capacity(layouts.len());
    for (layout, result) in layouts.into_iter().zip(generated) {
        match result {
            Ok(r) => {
                records.extend(r);
                kept.push(layout);
            }
            Err(Error::Domain(msg)) => {
                log::warn!("{}: {msg}", layout.sent_id);
                skiplog.push(SkipEntry {
                    sent_id: layout.sent_id,
                    reason: "too-many-preverbal",
                });
            }
            Err(e) => return Err(e),
        }
    }
    if kept.is_empty() {
        return Err(Error::Data("no-qualifying-sentences".into()));
    }
    Ok(VariantsOutput {
        records,
        layouts: kept,
        skiplog,
        warnings: outcome.warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantsSummary {
    pub references: usize,
    pub variants: usize,
    pub skipped: usize,
    pub config_hash: String,
}

impl fmt::Display for VariantsSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Type\tSentences")?;
        writeln!(f, "Reference\t{}", self.references)?;
        writeln!(f, "Variant\t{}", self.variants)?;
        writeln!(f, "Skipped\t{}", self.skipped)?;
        write!(f, "config_hash\t{}", self.config_hash)
    }
}

pub fn cmd_variants(cfg: &PipelineConfig) -> Result<VariantsSummary> {
    let (sentences, raw) = read_inputs(cfg)?;
    let out = build_variants(sentences, cfg)?;
    let summary = VariantsSummary {
        references: out.layouts.len(),
        variants: out.records.len() - out.layouts.len(),
        skipped: out.skiplog.len(),
        config_hash: cfg.content_hash(&raw),
    };

    ensure_dir(&cfg.out_dir)?;
    let dir = &cfg.out_dir;
    tables::write_file(
        &dir.join(VARIANTS_FILE),
        &tables::variants_tsv(&out.records),
    )?;
    let layout_refs: Vec<&ClauseLayout> = out.layouts.iter().collect();
    tables::write_file(&dir.join(LAYOUTS_FILE), &tables::layouts_tsv(&layout_refs))?;
    tables::write_file(&dir.join(SKIPLOG_FILE), &tables::skiplog_tsv(&out.skiplog))?;

    let mut manifest = format!("key\tvalue\nconfig_hash\t{}\n", summary.config_hash);
    for line in cfg.canonical().lines() {
        let (k, v) = line.split_once('=').expect("canonical lines are key=value");
        manifest.push_str(&format!("{k}\t{v}\n"));
    }
    for input in &cfg.inputs {
        manifest.push_str(&format!("input\t{}\n", input.display()));
    }
    manifest.push_str(&format!(
        "references\t{}\nvariants\t{}\nskipped\t{}\n",
        summary.references, summary.variants, summary.skipped
    ));
    for w in &out.warnings {
        manifest.push_str(&format!("warning\t{w}\n"));
    }
    tables::write_file(&dir.join(MANIFEST_FILE), manifest.as_bytes())?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionRow {
    pub n: usize,
    pub slot: usize,
    pub mean_length: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyRow {
    pub n: usize,
    pub strategy: &'static str,
    pub mean_normalized_dl: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeprelRow {
    pub slot: &'static str,
    pub deprel: String,
    pub count: usize,
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsOutput {
    pub positional: Vec<PositionRow>,
    pub strategies: Vec<StrategyRow>,
    pub deprel: Vec<DeprelRow>,
}

/// Reference order plus the four strategy orders for one layout. The random
/// and least-effort rows share one seeded random base order.
pub fn strategy_records(
    layout: &ClauseLayout,
    seeds: &SeedPolicy,
) -> Result<Vec<(OrderKind, VariantRecord)>> {
    let n = layout.n_constituents();
    let mut rng = seeds.rng(STRATEGY_STREAM, &layout.sent_id);
    let base = strategy_order(layout, Strategy::Random, &mut rng);
    let orders = [
        (OrderKind::Reference, Permutation::identity(n)),
        (OrderKind::Strategy(Strategy::Random), base.clone()),
        (
            OrderKind::Strategy(Strategy::Ascending),
            strategy_order(layout, Strategy::Ascending, &mut rng),
        ),
        (
            OrderKind::Strategy(Strategy::Descending),
            strategy_order(layout, Strategy::Descending, &mut rng),
        ),
        (
            OrderKind::Strategy(Strategy::LeastEffort),
            least_effort_transform(&base, layout),
        ),
    ];
    orders
        .into_iter()
        .map(|(k, o)| Ok((k, realize(layout, &o)?)))
        .collect()
}

pub fn corpus_stats(
    layouts: &[ClauseLayout],
    records: &[VariantRecord],
    cfg: &PipelineConfig,
) -> Result<StatsOutput> {
    // The persisted reference records must agree with the layouts.
    let references: Vec<&VariantRecord> = records.iter().filter(|r| r.is_reference).collect();
    if references.len() != layouts.len() {
        return Err(Error::Data(format!(
            "{} reference records for {} layouts",
            references.len(),
            layouts.len()
        )));
    }
    let mut by_id: Vec<&ClauseLayout> = layouts.iter().collect();
    by_id.sort_by(|a, b| a.sent_id.cmp(&b.sent_id));
    for r in &references {
        let l = by_id
            .binary_search_by(|l| l.sent_id.as_str().cmp(&r.sent_id))
            .map(|i| by_id[i])
            .map_err(|_| Error::Data(format!("no layout for sentence {}", r.sent_id)))?;
        let expected = realize(l, &Permutation::identity(l.n_constituents()))?;
        if expected.total_dl != r.total_dl || expected.n_words != r.n_words {
            return Err(Error::Data(format!(
                "sentence {}: reference record disagrees with its layout",
                r.sent_id
            )));
        }
    }

    let mut positional = Vec::new();
    for n in 2..=cfg.max_n {
        let p = positional_mean_lengths(layouts, n)?;
        for (slot, &mean_length) in p.mean_lengths.iter().enumerate() {
            positional.push(PositionRow {
                n,
                slot: slot + 1,
                mean_length,
                count: p.counts,
            });
        }
    }

    let seeds = SeedPolicy::new(cfg.seed);
    let tagged: Vec<(OrderKind, VariantRecord)> =
        par::map(layouts, cfg.execution, |l| strategy_records(l, &seeds))
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
    let mut strategies = Vec::new();
    for n in 2..=cfg.max_n {
        let count = layouts.iter().filter(|l| l.n_constituents() == n).count();
        for kind in OrderKind::ALL {
            if let Some(mean) = mean_normalized_dl(&tagged, kind, n) {
                strategies.push(StrategyRow {
                    n,
                    strategy: kind.as_str(),
                    mean_normalized_dl: mean,
                    count,
                });
            }
        }
    }

    let mut deprel = Vec::new();
    for slot in [Slot::First, Slot::Last] {
        for (rel, (count, proportion)) in deprel_position_profile(layouts, slot) {
            deprel.push(DeprelRow {
                slot: slot.as_str(),
                deprel: rel,
                count,
                proportion,
            });
        }
    }
    Ok(StatsOutput {
        positional,
        strategies,
        deprel,
    })
}

pub fn cmd_stats(cfg: &PipelineConfig, variants_path: &Path) -> Result<StatsOutput> {
    let records = tables::read_variants(variants_path)?;
    let layouts = tables::read_layouts(&variants_path.with_file_name(LAYOUTS_FILE))?;
    let out = corpus_stats(&layouts, &records, cfg)?;
    ensure_dir(&cfg.out_dir)?;
    tables::write_file(
        &cfg.out_dir.join("positional_lengths.csv"),
        &tables::to_bytes(&out.positional, b','),
    )?;
    tables::write_file(
        &cfg.out_dir.join("strategy_dl.csv"),
        &tables::to_bytes(&out.strategies, b','),
    )?;
    tables::write_file(
        &cfg.out_dir.join("deprel_profile.csv"),
        &tables::to_bytes(&out.deprel, b','),
    )?;
    Ok(out)
}

/// The models compared by `classify`, by name and predictor set.
pub const MODELS: [(&str, &[Feature]); 3] = [
    ("cl_last", &[Feature::ClLast]),
    ("total_dl", &[Feature::TotalDl]),
    ("total_dl+cl_last", &[Feature::TotalDl, Feature::ClLast]),
];

#[derive(Debug, Clone)]
pub struct ModelResult {
    pub name: &'static str,
    pub features: &'static [Feature],
    /// Fit on all pairs with z-scored predictors.
    pub fit: ModelFit,
    pub cv: CvReport,
}

#[derive(Debug, Clone)]
pub struct ClassifyOutput {
    pub n_pairs: usize,
    pub models: Vec<ModelResult>,
    pub mcnemar: Vec<(&'static str, &'static str, McNemar)>,
    /// Correlation of the two delta columns; `None` when undefined.
    pub pearson: Option<f64>,
    pub vif: Option<Vec<(Feature, Vif)>>,
}

impl ClassifyOutput {
    pub fn model(&self, name: &str) -> Option<&ModelResult> {
        self.models.iter().find(|m| m.name == name)
    }
}

pub fn classify_pairs(pairs: &[PairRecord], cfg: &PipelineConfig) -> Result<ClassifyOutput> {
    let opts = FitOptions::default();
    let all: Vec<&PairRecord> = pairs.iter().collect();
    let mut models = Vec::with_capacity(MODELS.len());
    for (name, features) in MODELS {
        let (_, fit) = fit_standardized(&all, features, opts)?;
        let cv = cross_validate(pairs, features, cfg.folds, cfg.seed, opts, cfg.execution)?;
        models.push(ModelResult {
            name,
            features,
            fit,
            cv,
        });
    }
    let mut mcnemar = Vec::new();
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        let (ma, mb) = (&models[a], &models[b]);
        let (x, y) = discordant_counts(&ma.cv.correct, &mb.cv.correct)?;
        mcnemar.push((ma.name, mb.name, mcnemar_test(x, y)));
    }

    let cl: Vec<f64> = pairs.iter().map(|p| p.delta.cl_last).collect();
    let dl: Vec<f64> = pairs.iter().map(|p| p.delta.total_dl).collect();
    let pearson = match pearson(&cl, &dl) {
        Ok(r) => Some(r),
        Err(e) => {
            log::warn!("correlation of predictors: {e}");
            None
        }
    };
    let vif = match vif(&[&dl, &cl]) {
        Ok(v) => Some(vec![(Feature::TotalDl, v[0]), (Feature::ClLast, v[1])]),
        Err(e) => {
            log::warn!("variance inflation: {e}");
            None
        }
    };
    Ok(ClassifyOutput {
        n_pairs: pairs.len(),
        models,
        mcnemar,
        pearson,
        vif,
    })
}

pub fn classify_records(records: &[VariantRecord], cfg: &PipelineConfig) -> Result<ClassifyOutput> {
    let pairs = pairs_from_records(records)?;
    if pairs.is_empty() {
        return Err(Error::Data("no reference-variant pairs".into()));
    }
    classify_pairs(&pairs, cfg)
}

#[derive(Serialize)]
struct CoefRow<'a> {
    model: &'a str,
    feature: &'a str,
    coef: f64,
    se: f64,
    z: f64,
    p: f64,
}

#[derive(Serialize)]
struct AccuracyRow<'a> {
    model: &'a str,
    fold: String,
    accuracy: f64,
}

#[derive(Serialize)]
struct McNemarRow<'a> {
    model_a: &'a str,
    model_b: &'a str,
    b: u64,
    c: u64,
    statistic: Option<f64>,
    p: f64,
    method: &'static str,
}

#[derive(Serialize)]
struct DiagnosticRow {
    metric: String,
    value: String,
}

pub fn write_classify(out: &ClassifyOutput, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    let mut coef = Vec::new();
    let mut acc = Vec::new();
    for m in &out.models {
        for (i, name) in m.fit.names.iter().enumerate() {
            coef.push(CoefRow {
                model: m.name,
                feature: name,
                coef: m.fit.coefficients[i],
                se: m.fit.std_errors[i],
                z: m.fit.z_scores[i],
                p: m.fit.p_values[i],
            });
        }
        for (f, a) in m.cv.fold_accuracies.iter().enumerate() {
            acc.push(AccuracyRow {
                model: m.name,
                fold: (f + 1).to_string(),
                accuracy: *a,
            });
        }
        acc.push(AccuracyRow {
            model: m.name,
            fold: "mean".into(),
            accuracy: m.cv.mean_accuracy,
        });
    }
    let mcn: Vec<McNemarRow> = out
        .mcnemar
        .iter()
        .map(|(a, b, t)| McNemarRow {
            model_a: a,
            model_b: b,
            b: t.b,
            c: t.c,
            statistic: t.statistic,
            p: t.p_value,
            method: if t.undefined {
                "undefined"
            } else if t.exact {
                "exact"
            } else {
                "chi-square"
            },
        })
        .collect();

    let d = |metric: String, value: String| DiagnosticRow { metric, value };
    let mut diag = vec![d("pairs".into(), out.n_pairs.to_string())];
    diag.push(d(
        "pearson_r".into(),
        out.pearson.map_or("undefined".into(), |r| r.to_string()),
    ));
    match &out.vif {
        Some(v) => diag.extend(
            v.iter()
                .map(|(f, x)| d(format!("vif:{f}"), x.value.to_string())),
        ),
        None => diag.push(d("vif".into(), "undefined".into())),
    }
    for m in &out.models {
        diag.push(d(
            format!("converged:{}", m.name),
            m.fit.converged.to_string(),
        ));
        diag.push(d(
            format!("norm_guard:{}", m.name),
            m.fit.norm_guard_triggered.to_string(),
        ));
    }

    tables::write_file(&dir.join("coefficients.csv"), &tables::to_bytes(coef, b','))?;
    tables::write_file(&dir.join("accuracy.csv"), &tables::to_bytes(acc, b','))?;
    tables::write_file(&dir.join("mcnemar.csv"), &tables::to_bytes(mcn, b','))?;
    tables::write_file(&dir.join("diagnostics.csv"), &tables::to_bytes(diag, b','))?;
    Ok(())
}

pub fn cmd_classify(cfg: &PipelineConfig, variants_path: &Path) -> Result<ClassifyOutput> {
    let records = tables::read_variants(variants_path)?;
    let out = classify_records(&records, cfg)?;
    write_classify(&out, &cfg.out_dir)?;
    Ok(out)
}

/// Files collected by `report`, in order.
pub const REPORT_SECTIONS: [&str; 8] = [
    MANIFEST_FILE,
    "positional_lengths.csv",
    "strategy_dl.csv",
    "deprel_profile.csv",
    "coefficients.csv",
    "accuracy.csv",
    "mcnemar.csv",
    "diagnostics.csv",
];

pub fn cmd_report(cfg: &PipelineConfig) -> Result<String> {
    let mut text = String::new();
    let mut found = 0;
    for name in REPORT_SECTIONS {
        let path: PathBuf = cfg.out_dir.join(name);
        text.push_str(&format!("== {name}\n"));
        match std::fs::read_to_string(&path) {
            Ok(body) => {
                found += 1;
                text.push_str(&body);
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => text.push_str("(missing)\n"),
            Err(e) => return Err(Error::io(path, e)),
        }
        text.push('\n');
    }
    if found == 0 {
        return Err(Error::Data(format!(
            "no results under {}",
            cfg.out_dir.display()
        )));
    }
    tables::write_file(&cfg.out_dir.join(REPORT_FILE), text.as_bytes())?;
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sample_sentence;

    #[test]
    fn sample_sentence_yields_all_orders() {
        let cfg = PipelineConfig::default();
        let out = build_variants(vec![sample_sentence()], &cfg).unwrap();
        assert_eq!(out.layouts.len(), 1);
        assert_eq!(out.records.len(), 24);
        assert!(out.records[0].is_reference);
        assert_eq!(out.records[0].total_dl, 21);
    }

    #[test]
    fn two_constituent_sentences_get_one_variant_each() {
        let corpus: Vec<Sentence> = (0..3)
            .map(|i| crate::synth::build_sentence(&format!("t{i}"), &[2, 1], &[0, 0], &[0, 1], false))
            .collect();
        let cfg = PipelineConfig::default();
        let out = build_variants(corpus, &cfg).unwrap();
        assert_eq!(out.layouts.len(), 3);
        assert_eq!(out.records.len() - out.layouts.len(), 3);
    }

    #[test]
    fn empty_kept_set_is_a_data_error() {
        let mut s = sample_sentence();
        s.tokens.last_mut().unwrap().upos = "NOUN".into();
        match build_variants(vec![s], &PipelineConfig::default()) {
            Err(Error::Data(msg)) => assert_eq!(msg, "no-qualifying-sentences"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn strategy_rows_share_a_base() {
        let layout = ClauseLayout::from_parts("x", &[2, 3, 1, 4], &[1, 1, 0, 1]).unwrap();
        let rows = strategy_records(&layout, &SeedPolicy::new(3)).unwrap();
        let get = |k: OrderKind| {
            rows.iter()
                .find(|(kind, _)| *kind == k)
                .unwrap()
                .1
                .root_arc_dl
        };
        assert_eq!(get(OrderKind::Reference), 20);
        assert_eq!(get(OrderKind::Strategy(Strategy::Ascending)), 23);
        assert_eq!(get(OrderKind::Strategy(Strategy::Descending)), 13);
        assert!(
            get(OrderKind::Strategy(Strategy::LeastEffort))
                <= get(OrderKind::Strategy(Strategy::Random))
        );
    }
}
