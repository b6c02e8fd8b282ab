//! Pipeline configuration: a flat `key = value` file, overridden by
//! command-line flags.
//!
//! Recognized keys (`#` starts a comment line):
//!
//! ```text
//! input = a.conllu, b.conllu     # repeatable
//! out = results
//! seed = 42
//! cap = 120
//! folds = 10
//! max_n = 5
//! count_punct = true
//! min_preverbal = 2
//! require_projective = true
//! root_upos = VERB, AUX
//! min_corpus_sentences = 2000
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::filter::FilterPolicy;
use crate::par::Execution;
use crate::tree::LengthPolicy;
use crate::variants::DEFAULT_CAP;

pub const SEED_ENV: &str = "ORDOLEX_SEED";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub cap: usize,
    pub seed: u64,
    pub filter: FilterPolicy,
    pub length: LengthPolicy,
    pub folds: usize,
    pub max_n: usize,
    pub execution: Execution,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            inputs: Vec::new(),
            out_dir: PathBuf::from("ordolex-out"),
            cap: DEFAULT_CAP,
            seed: DEFAULT_SEED,
            filter: FilterPolicy::default(),
            length: LengthPolicy::default(),
            folds: 10,
            max_n: 5,
            execution: Execution::default(),
        }
    }
}

/// Values given on the command line; `None` leaves the file/default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub inputs: Vec<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub cap: Option<usize>,
    pub folds: Option<usize>,
    pub max_n: Option<usize>,
    pub count_punct: Option<bool>,
    pub min_preverbal: Option<usize>,
    pub root_upos: Option<Vec<String>>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "invalid boolean `{value}` for `{key}`"
        ))),
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl PipelineConfig {
    /// Apply a config file's contents on top of `self`. Returns whether the
    /// file set a seed.
    pub fn apply_file_text(&mut self, text: &str) -> Result<bool> {
        let mut seed_set = false;
        let mut inputs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "input" => inputs.extend(split_list(value).map(PathBuf::from)),
                "out" => self.out_dir = PathBuf::from(value),
                "seed" => {
                    self.seed = parse_value(key, value)?;
                    seed_set = true;
                }
                "cap" => self.cap = parse_value(key, value)?,
                "folds" => self.folds = parse_value(key, value)?,
                "max_n" => self.max_n = parse_value(key, value)?,
                "count_punct" => self.length.count_punct = parse_bool(key, value)?,
                "min_preverbal" => self.filter.min_preverbal = parse_value(key, value)?,
                "require_projective" => self.filter.require_projective = parse_bool(key, value)?,
                "root_upos" => {
                    self.filter.root_upos_allowed = split_list(value).map(str::to_string).collect()
                }
                "min_corpus_sentences" => {
                    self.filter.min_corpus_sentences = parse_value(key, value)?
                }
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key `{other}`",
                        i + 1
                    )))
                }
            }
        }
        if !inputs.is_empty() {
            self.inputs = inputs;
        }
        Ok(seed_set)
    }

    /// Resolve the final configuration. Seed precedence: flag, config file,
    /// `ORDOLEX_SEED`, built-in default.
    pub fn resolve(
        file: Option<&Path>,
        overrides: Overrides,
        env_seed: Option<&str>,
    ) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        let mut seed_set = false;
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            seed_set = cfg.apply_file_text(&text)?;
        }
        if !seed_set {
            if let Some(v) = env_seed {
                cfg.seed = v.trim().parse().map_err(|_| {
                    Error::Config(format!("{SEED_ENV}=`{v}` is not a 64-bit integer"))
                })?;
            }
        }
        if !overrides.inputs.is_empty() {
            cfg.inputs = overrides.inputs;
        }
        if let Some(v) = overrides.out_dir {
            cfg.out_dir = v;
        }
        if let Some(v) = overrides.seed {
            cfg.seed = v;
        }
        if let Some(v) = overrides.cap {
            cfg.cap = v;
        }
        if let Some(v) = overrides.folds {
            cfg.folds = v;
        }
        if let Some(v) = overrides.max_n {
            cfg.max_n = v;
        }
        if let Some(v) = overrides.count_punct {
            cfg.length.count_punct = v;
        }
        if let Some(v) = overrides.min_preverbal {
            cfg.filter.min_preverbal = v;
        }
        if let Some(v) = overrides.root_upos {
            cfg.filter.root_upos_allowed = v
                .iter()
                .flat_map(|s| split_list(s))
                .map(str::to_string)
                .collect();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cap < 1 {
            return Err(Error::Config("cap must be at least 1".into()));
        }
        if self.folds < 2 {
            return Err(Error::Config("folds must be at least 2".into()));
        }
        if self.filter.min_preverbal < 1 {
            return Err(Error::Config("min_preverbal must be at least 1".into()));
        }
        if self.max_n < 2 {
            return Err(Error::Config("max_n must be at least 2".into()));
        }
        if self.filter.root_upos_allowed.is_empty() {
            return Err(Error::Config("root_upos must name at least one tag".into()));
        }
        Ok(())
    }

    /// Canonical text of every setting that affects outputs.
    pub fn canonical(&self) -> String {
        let upos: BTreeSet<&str> = self
            .filter
            .root_upos_allowed
            .iter()
            .map(String::as_str)
            .collect();
        format!(
            "cap={}\nseed={}\nfolds={}\nmax_n={}\ncount_punct={}\nmin_preverbal={}\nrequire_projective={}\nroot_upos={}\nmin_corpus_sentences={}\n",
            self.cap,
            self.seed,
            self.folds,
            self.max_n,
            self.length.count_punct,
            self.filter.min_preverbal,
            self.filter.require_projective,
            upos.into_iter().collect::<Vec<_>>().join(","),
            self.filter.min_corpus_sentences,
        )
    }

    /// Hash of the canonical settings and the bytes of every input, in order.
    pub fn content_hash(&self, input_bytes: &[Vec<u8>]) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical().as_bytes());
        for bytes in input_bytes {
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(bytes);
        }
        h.finalize()
            .iter()
            .take(16)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_overrides() {
        let mut cfg = PipelineConfig::default();
        let seeded = cfg
            .apply_file_text("# comment\ninput = a.conllu, b.conllu\ncap = 30\ncount_punct = off\nroot_upos = VERB, AUX\n")
            .unwrap();
        assert!(!seeded);
        assert_eq!(
            cfg.inputs,
            [PathBuf::from("a.conllu"), PathBuf::from("b.conllu")]
        );
        assert_eq!(cfg.cap, 30);
        assert!(!cfg.length.count_punct);
        assert!(cfg.filter.root_upos_allowed.contains("AUX"));
    }

    #[test]
    fn bad_lines_are_config_errors() {
        let mut cfg = PipelineConfig::default();
        assert!(matches!(
            cfg.apply_file_text("colour = blue"),
            Err(Error::Config(_))
        ));
        assert!(matches!(cfg.apply_file_text("cap"), Err(Error::Config(_))));
        assert!(matches!(
            cfg.apply_file_text("cap = many"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn seed_precedence() {
        let env = PipelineConfig::resolve(None, Overrides::default(), Some("7")).unwrap();
        assert_eq!(env.seed, 7);
        let flag = PipelineConfig::resolve(
            None,
            Overrides {
                seed: Some(9),
                ..Overrides::default()
            },
            Some("7"),
        )
        .unwrap();
        assert_eq!(flag.seed, 9);
        assert_eq!(
            PipelineConfig::resolve(None, Overrides::default(), None)
                .unwrap()
                .seed,
            DEFAULT_SEED
        );
        assert!(PipelineConfig::resolve(None, Overrides::default(), Some("x")).is_err());
    }

    #[test]
    fn invariants_are_checked() {
        let bad = Overrides {
            folds: Some(1),
            ..Overrides::default()
        };
        assert!(matches!(
            PipelineConfig::resolve(None, bad, None),
            Err(Error::Config(_))
        ));
        let bad = Overrides {
            cap: Some(0),
            ..Overrides::default()
        };
        assert!(PipelineConfig::resolve(None, bad, None).is_err());
    }

    #[test]
    fn hash_tracks_settings_and_inputs() {
        let a = PipelineConfig::default();
        let b = PipelineConfig {
            cap: 60,
            ..PipelineConfig::default()
        };
        let input = vec![b"x".to_vec()];
        assert_eq!(a.content_hash(&input), a.content_hash(&input));
        assert_ne!(a.content_hash(&input), b.content_hash(&input));
        assert_ne!(a.content_hash(&input), a.content_hash(&[b"y".to_vec()]));
    }
}
