//! Tabular input: typed datasets, CSV loading and predictor binning.

mod binning;
mod csv;
mod dataset;

pub use self::binning::{
    categorical_bins, default_scheme, default_schemes, discretize, format_sig, quantile_bins,
    quantile_sorted, Bin, BinHit, BinRange, BinScheme, Discretized, SchemeDoc, DEFAULT_PROBS,
};
pub use self::csv::{load_csv, read_csv, CsvOptions, LoadedCsv, RejectedRow, DEFAULT_MISSING};
pub use self::dataset::{Cell, Column, ColumnKind, Dataset, Value};
