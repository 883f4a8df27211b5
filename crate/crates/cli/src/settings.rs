//! Run settings: command-line flags layered over an optional TOML file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use devperf::cv::{BuiltinLearner, DEFAULT_FOLDS};
use devperf::rules::MiningConfig;
use serde::Deserialize;

use crate::failure::Failure;

pub const SEED_ENV: &str = "DEVPERF_SEED";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUT: &str = "devperf-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Svg,
    Json,
    Csv,
    Txt,
}

/// Flags shared by every subcommand. All are optional here so that values
/// from `--config` can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML file with any of the options below (flags take precedence)
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Dataset CSV with a header row
    #[arg(long, value_name = "CSV")]
    pub data: Option<PathBuf>,

    /// Name of the class column
    #[arg(long)]
    pub target: Option<String>,

    /// Built-in learner for cross-validation: nb or majority
    #[arg(long)]
    pub learner: Option<String>,

    /// Number of cross-validation folds
    #[arg(long)]
    pub k: Option<usize>,

    /// Fold assignment seed (falls back to $DEVPERF_SEED)
    #[arg(long)]
    pub seed: Option<u64>,

    /// Import `row_id,true,pred` predictions instead of running cross-validation
    #[arg(long, value_name = "CSV")]
    pub predictions: Option<PathBuf>,

    /// Comma-separated predictors, or "all"
    #[arg(long)]
    pub predictors: Option<String>,

    /// JSON file mapping predictor names to bin boundaries or category lists
    #[arg(long, value_name = "JSON")]
    pub bins: Option<PathBuf>,

    /// Comma-separated columns to read as categorical even if numeric
    #[arg(long)]
    pub categorical: Option<String>,

    #[arg(long)]
    pub minsup: Option<f64>,

    #[arg(long)]
    pub alpha: Option<f64>,

    #[arg(long)]
    pub max_len: Option<usize>,

    /// Pool outcome cells with expected count below this before testing
    #[arg(long)]
    pub pool_min_expected: Option<f64>,

    /// Subgroup to test, e.g. "Bare.nuclei=1 & Normal.nucleoli=1"
    #[arg(long)]
    pub query: Option<String>,

    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output formats to write
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSettings {
    data: Option<PathBuf>,
    target: Option<String>,
    learner: Option<String>,
    k: Option<usize>,
    seed: Option<u64>,
    predictions: Option<PathBuf>,
    predictors: Option<StringOrList>,
    bins: Option<PathBuf>,
    categorical: Option<StringOrList>,
    minsup: Option<f64>,
    alpha: Option<f64>,
    max_len: Option<usize>,
    pool_min_expected: Option<f64>,
    query: Option<String>,
    out: Option<PathBuf>,
    format: Option<Vec<Format>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum StringOrList {
    One(String),
    Many(Vec<String>),
}

impl StringOrList {
    fn into_list(self) -> Vec<String> {
        match self {
            StringOrList::One(s) => split_list(&s),
            StringOrList::Many(v) => v,
        }
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(String::from)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    CrossValidation {
        learner: String,
        k: usize,
        seed: u64,
    },
    Import(PathBuf),
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct Settings {
    pub data: PathBuf,
    pub target: String,
    pub source: Source,
    /// `None` means every predictor.
    pub predictors: Option<Vec<String>>,
    pub bins: Option<PathBuf>,
    pub categorical: Vec<String>,
    pub mining: MiningConfig,
    pub query: Option<String>,
    pub out: PathBuf,
    pub formats: Option<BTreeSet<Format>>,
}

impl Settings {
    /// Whether `format` should be written, given the command's defaults.
    pub fn wants(&self, format: Format, defaults: &[Format]) -> bool {
        match &self.formats {
            Some(f) => f.contains(&format),
            None => defaults.contains(&format),
        }
    }
}

fn read_file(path: &Path) -> Result<FileSettings, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Config(format!("config {}: {e}", path.display())))
}

/// Merges flags over the config file over defaults and validates the result.
pub fn resolve(flags: Flags) -> Result<Settings, Failure> {
    let file = match &flags.config {
        Some(p) => read_file(p)?,
        None => FileSettings::default(),
    };
    // paths in the config file are relative to the file itself
    let base = flags
        .config
        .as_deref()
        .and_then(Path::parent)
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let rel = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };

    let data = flags
        .data
        .or(file.data.map(rel))
        .ok_or_else(|| Failure::Config("--data is required".into()))?;
    if !data.is_file() {
        return Err(Failure::Config(format!(
            "dataset {} does not exist",
            data.display()
        )));
    }
    let target = flags
        .target
        .or(file.target)
        .ok_or_else(|| Failure::Config("--target is required".into()))?;

    let source = match flags.predictions.or(file.predictions.map(rel)) {
        Some(p) => {
            if !p.is_file() {
                return Err(Failure::Config(format!(
                    "predictions file {} does not exist",
                    p.display()
                )));
            }
            Source::Import(p)
        }
        None => {
            let learner = flags
                .learner
                .or(file.learner)
                .unwrap_or_else(|| "nb".into());
            if BuiltinLearner::by_name(&learner).is_none() {
                return Err(Failure::Config(format!(
                    "--learner `{learner}` is not built in; supported: {} (use --predictions to import other models)",
                    BuiltinLearner::NAMES.join(", ")
                )));
            }
            let k = flags.k.or(file.k).unwrap_or(DEFAULT_FOLDS);
            if k < 2 {
                return Err(Failure::Config(format!("--k must be ≥ 2, got {k}")));
            }
            let seed = match flags.seed.or(file.seed) {
                Some(s) => s,
                None => match std::env::var(SEED_ENV) {
                    Ok(v) => v.trim().parse().map_err(|_| {
                        Failure::Config(format!("{SEED_ENV}=`{v}` is not an integer seed"))
                    })?,
                    Err(_) => DEFAULT_SEED,
                },
            };
            Source::CrossValidation { learner, k, seed }
        }
    };

    let predictors = match flags
        .predictors
        .map(|s| split_list(&s))
        .or(file.predictors.map(StringOrList::into_list))
    {
        Some(list) if list.iter().any(|p| p == "all") => None,
        Some(list) if list.is_empty() => None,
        other => other,
    };

    let defaults = MiningConfig::default();
    let mining = MiningConfig {
        minsup: flags.minsup.or(file.minsup).unwrap_or(defaults.minsup),
        alpha: flags.alpha.or(file.alpha).unwrap_or(defaults.alpha),
        max_len: flags.max_len.or(file.max_len).unwrap_or(defaults.max_len),
        pool_min_expected: flags.pool_min_expected.or(file.pool_min_expected),
        ..defaults
    };
    mining
        .validate()
        .map_err(|e| Failure::Config(e.to_string()))?;

    Ok(Settings {
        data,
        target,
        source,
        predictors,
        bins: flags.bins.or(file.bins.map(rel)),
        categorical: flags
            .categorical
            .map(|s| split_list(&s))
            .or(file.categorical.map(StringOrList::into_list))
            .unwrap_or_default(),
        mining,
        query: flags.query.or(file.query),
        out: flags
            .out
            .or(file.out.map(rel))
            .unwrap_or_else(|| DEFAULT_OUT.into()),
        formats: flags
            .format
            .or(file.format)
            .map(|v| v.into_iter().collect()),
    })
}
