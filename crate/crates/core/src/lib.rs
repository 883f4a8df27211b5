//! Model-agnostic error analysis for classifiers.
//!
//! Starting from per-case predictions (from built-in cross-validation or
//! imported from any model) this crate computes error dependence plots, which
//! show the confusion distribution per bin of a predictor next to the global
//! one, and mines distribution rules: subgroups whose confusion distribution
//! differs significantly from the global one.
//!
//! ```no_run
//! use devperf::cv::{cross_val_predict, NaiveBayes};
//! use devperf::edp::compute_edp;
//! use devperf::ingest::{default_schemes, load_csv, CsvOptions};
//! use devperf::rules::{build_mining_table, format_rules, mine_rules, MiningConfig};
//! use devperf::Execution;
//!
//! let data = load_csv("iris.csv", &CsvOptions::new("Species"))?.dataset;
//! let preds = cross_val_predict(&data, &NaiveBayes::default(), 10, 42, Execution::Parallel)?;
//! let edp = compute_edp(&data, &preds, "Petal.Width", None)?;
//! println!("{}", edp.global.cm_string());
//!
//! let schemes = default_schemes(&data)?;
//! let table = build_mining_table(&data, &preds, &schemes)?;
//! print!("{}", format_rules(&mine_rules(&table, &MiningConfig::default())?));
//! # Ok::<(), devperf::Error>(())
//! ```

pub mod cv;
pub mod edp;
mod error;
mod exec;
pub mod ingest;
pub mod rules;
pub mod synthetic;

pub use crate::error::{Error, Result};
pub use crate::exec::Execution;
