//! Partitioning predictor domains into labeled bins.
//!
//! Numeric schemes are defined by a non-decreasing list of edges
//! `e0 <= e1 < e2 < ... < en`. Bin 0 is `[e0, e1]`, bin `i > 0` is
//! `]e_i, e_{i+1}]`. Only the first pair of edges may coincide, which yields
//! the degenerate single-value bin produced when low quantiles collapse onto
//! the minimum (e.g. `[1]`).

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::dataset::{ColumnKind, Dataset, Value};
use crate::error::{Error, Result};

/// Quantile levels of the default five-band numeric scheme:
/// extremely low, low, central, high, extremely high.
pub const DEFAULT_PROBS: [f64; 4] = [0.10, 0.35, 0.65, 0.90];

const LABEL_DIGITS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BinRange {
    /// Upper bound is always closed.
    Interval {
        lower: f64,
        upper: f64,
        lower_closed: bool,
    },
    Category {
        value: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub label: String,
    pub range: BinRange,
}

impl Bin {
    pub fn contains(&self, v: f64) -> bool {
        match self.range {
            BinRange::Interval {
                lower,
                upper,
                lower_closed,
            } => v <= upper && (v > lower || (lower_closed && v == lower)),
            BinRange::Category { .. } => false,
        }
    }
}

/// Result of locating a value: bin index plus whether an out-of-range numeric
/// value was clamped into a boundary bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinHit {
    pub index: usize,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinScheme {
    predictor: String,
    bins: Vec<Bin>,
    layout: Layout,
}

#[derive(Debug, Clone, PartialEq)]
enum Layout {
    Numeric { edges: Vec<f64> },
    Categorical { index: HashMap<String, usize> },
}

impl BinScheme {
    /// Numeric scheme from explicit edges (the "user-defined ranges" path).
    pub fn from_edges(predictor: impl Into<String>, edges: Vec<f64>) -> Result<Self> {
        let predictor = predictor.into();
        let bad = |reason: &str| Error::InvalidScheme {
            predictor: predictor.clone(),
            reason: reason.to_string(),
        };
        if edges.len() < 2 {
            return Err(bad("need at least two edges"));
        }
        if let Some(&x) = edges.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(x));
        }
        for (i, w) in edges.windows(2).enumerate() {
            let ok = if i == 0 { w[0] <= w[1] } else { w[0] < w[1] };
            if !ok {
                return Err(bad(
                    "edges must be strictly increasing (only the first two may coincide)",
                ));
            }
        }
        let bins = interval_bins(&edges);
        Ok(BinScheme {
            predictor,
            bins,
            layout: Layout::Numeric { edges },
        })
    }

    pub fn from_categories<I, S>(predictor: impl Into<String>, categories: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let predictor = predictor.into();
        let mut bins = Vec::new();
        let mut index = HashMap::new();
        for c in categories {
            let c = c.into();
            if index.contains_key(&c) {
                continue;
            }
            index.insert(c.clone(), bins.len());
            bins.push(Bin {
                label: c.clone(),
                range: BinRange::Category { value: c },
            });
        }
        if bins.is_empty() {
            return Err(Error::InvalidScheme {
                predictor,
                reason: "no categories".into(),
            });
        }
        Ok(BinScheme {
            predictor,
            bins,
            layout: Layout::Categorical { index },
        })
    }

    pub fn predictor(&self) -> &str {
        &self.predictor
    }

    pub fn kind(&self) -> ColumnKind {
        match self.layout {
            Layout::Numeric { .. } => ColumnKind::Numeric,
            Layout::Categorical { .. } => ColumnKind::Categorical,
        }
    }

    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn edges(&self) -> Option<&[f64]> {
        match &self.layout {
            Layout::Numeric { edges } => Some(edges),
            Layout::Categorical { .. } => None,
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.bins.iter().map(|b| b.label.as_str())
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.bins.iter().position(|b| b.label == label)
    }

    /// Locates the bin of a value. Out-of-range numerics clamp to the nearest
    /// boundary bin; unseen categories are an error.
    pub fn find_bin(&self, value: &Value) -> Result<BinHit> {
        match (&self.layout, value) {
            (Layout::Numeric { edges }, Value::Num(v)) => find_numeric(edges, *v),
            (Layout::Categorical { index }, Value::Cat(c)) => index
                .get(c)
                .map(|&i| BinHit {
                    index: i,
                    clamped: false,
                })
                .ok_or_else(|| Error::UnknownCategory {
                    predictor: self.predictor.clone(),
                    value: c.clone(),
                }),
            (_, v) => Err(Error::KindMismatch {
                column: self.predictor.clone(),
                expected: self.kind().as_str(),
                found: v.kind().as_str(),
            }),
        }
    }

    pub fn to_doc(&self) -> SchemeDoc {
        match &self.layout {
            Layout::Numeric { edges } => SchemeDoc {
                predictor: self.predictor.clone(),
                kind: ColumnKind::Numeric,
                boundaries: Some(edges.clone()),
                categories: None,
            },
            Layout::Categorical { .. } => SchemeDoc {
                predictor: self.predictor.clone(),
                kind: ColumnKind::Categorical,
                boundaries: None,
                categories: Some(self.bins.iter().map(|b| b.label.clone()).collect()),
            },
        }
    }

    pub fn from_doc(doc: SchemeDoc) -> Result<Self> {
        match doc.kind {
            ColumnKind::Numeric => {
                let edges = doc.boundaries.ok_or_else(|| Error::InvalidScheme {
                    predictor: doc.predictor.clone(),
                    reason: "numeric scheme without boundaries".into(),
                })?;
                BinScheme::from_edges(doc.predictor, edges)
            }
            ColumnKind::Categorical => {
                let cats = doc.categories.ok_or_else(|| Error::InvalidScheme {
                    predictor: doc.predictor.clone(),
                    reason: "categorical scheme without categories".into(),
                })?;
                BinScheme::from_categories(doc.predictor, cats)
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("scheme serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        BinScheme::from_doc(serde_json::from_str(text)?)
    }
}

/// Portable form of a [`BinScheme`], so schemes can be pinned across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeDoc {
    pub predictor: String,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundaries: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

fn find_numeric(edges: &[f64], v: f64) -> Result<BinHit> {
    if !v.is_finite() {
        return Err(Error::NonFinite(v));
    }
    let last = edges.len() - 2;
    if v < edges[0] {
        return Ok(BinHit {
            index: 0,
            clamped: true,
        });
    }
    if v > edges[edges.len() - 1] {
        return Ok(BinHit {
            index: last,
            clamped: true,
        });
    }
    // first bin whose (closed) upper edge is >= v
    let index = edges[1..].partition_point(|&u| u < v);
    Ok(BinHit {
        index,
        clamped: false,
    })
}

fn interval_bins(edges: &[f64]) -> Vec<Bin> {
    let mut digits = LABEL_DIGITS;
    loop {
        let labels: Vec<String> = (0..edges.len() - 1)
            .map(|i| interval_label(edges[i], edges[i + 1], i == 0, digits))
            .collect();
        let unique = labels
            .iter()
            .enumerate()
            .all(|(i, l)| !labels[..i].contains(l));
        if unique || digits >= 17 {
            return labels
                .into_iter()
                .enumerate()
                .map(|(i, label)| Bin {
                    label,
                    range: BinRange::Interval {
                        lower: edges[i],
                        upper: edges[i + 1],
                        lower_closed: i == 0,
                    },
                })
                .collect();
        }
        digits += 1;
    }
}

fn interval_label(lo: f64, hi: f64, first: bool, digits: usize) -> String {
    let (a, b) = (format_sig(lo, digits), format_sig(hi, digits));
    if first && lo == hi {
        format!("[{a}]")
    } else if first {
        format!("[{a} : {b}]")
    } else {
        format!("]{a} : {b}]")
    }
}

/// Up to `digits` significant digits, never dropping integer digits, with
/// trailing zeros trimmed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i64 + 1;
    let decimals = (digits as i64 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Empirical quantile by linear interpolation between order statistics
/// (R's default, "type 7"). `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Numeric scheme cut at the empirical quantiles `probs`. Coinciding cut
/// points collapse, so heavy ties give fewer (never empty) bins.
pub fn quantile_bins(
    predictor: impl Into<String>,
    values: &[f64],
    probs: &[f64],
) -> Result<BinScheme> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    if let Some(&x) = values.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(x));
    }
    if probs.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::InvalidProbs(
            "each probability must lie in (0, 1)".into(),
        ));
    }
    if probs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidProbs(
            "probabilities must be strictly increasing".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);

    let mut edges = vec![min];
    for &p in probs {
        let q = quantile_sorted(&sorted, p);
        let last = *edges.last().unwrap();
        if q < max && (q > last || (edges.len() == 1 && q == min)) {
            edges.push(q);
        }
    }
    if edges.len() == 1 || max > *edges.last().unwrap() {
        edges.push(max);
    }
    BinScheme::from_edges(predictor, edges)
}

/// One bin per distinct observed category, in first-appearance order.
pub fn categorical_bins(dataset: &Dataset, column: &str) -> Result<BinScheme> {
    let col = dataset
        .column_index(column)
        .ok_or_else(|| Error::MissingColumn(column.to_string()))?;
    if dataset.column(col).kind != ColumnKind::Categorical {
        return Err(Error::KindMismatch {
            column: column.to_string(),
            expected: "categorical",
            found: "numeric",
        });
    }
    let mut cats: Vec<&str> = dataset
        .rows()
        .iter()
        .filter_map(|r| r[col].as_ref().and_then(Value::as_cat))
        .collect();
    cats.sort_by(|a, b| natural_cmp(a, b));
    cats.dedup();
    match BinScheme::from_categories(column, cats) {
        Err(Error::InvalidScheme { .. }) => Err(Error::EmptyValues),
        other => other,
    }
}

/// Numeric-looking labels first, in numeric order, then the rest lexically.
fn natural_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => std::cmp::Ordering::Less,
        (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// Default scheme for one predictor: quantile bins when numeric, categories
/// otherwise.
pub fn default_scheme(dataset: &Dataset, column: &str) -> Result<BinScheme> {
    let col = dataset.predictor_index(column)?;
    match dataset.column(col).kind {
        ColumnKind::Numeric => quantile_bins(column, &dataset.numeric_values(col), &DEFAULT_PROBS),
        ColumnKind::Categorical => categorical_bins(dataset, column),
    }
}

/// Default schemes for every predictor that has at least one value.
pub fn default_schemes(dataset: &Dataset) -> Result<Vec<BinScheme>> {
    let mut out = Vec::new();
    for col in dataset.predictors() {
        match default_scheme(dataset, &dataset.column(col).name) {
            Ok(s) => out.push(s),
            Err(Error::EmptyValues) => {
                log::warn!(
                    "predictor `{}` has no values, skipped",
                    dataset.column(col).name
                )
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Discretized {
    pub dataset: Dataset,
    /// Out-of-range values clamped into a boundary bin, per predictor.
    pub clamped: BTreeMap<String, usize>,
}

/// Replaces every numeric predictor cell by its bin label. Every numeric
/// predictor needs a scheme; categorical predictors are left unchanged (a
/// categorical scheme, when given, only validates the values).
pub fn discretize(dataset: &Dataset, schemes: &[BinScheme]) -> Result<Discretized> {
    let mut by_col: HashMap<usize, &BinScheme> = HashMap::new();
    for s in schemes {
        let col = dataset.predictor_index(s.predictor())?;
        by_col.insert(col, s);
    }
    let mut out = dataset.clone();
    let mut clamped = BTreeMap::new();
    for col in dataset.predictors() {
        let column = dataset.column(col);
        let scheme = by_col.get(&col);
        match (column.kind, scheme) {
            (ColumnKind::Numeric, None) => {
                return Err(Error::InvalidScheme {
                    predictor: column.name.clone(),
                    reason: "numeric predictor has no bin scheme".into(),
                })
            }
            (ColumnKind::Numeric, Some(s)) => {
                let mut n_clamped = 0;
                let mut cells = Vec::with_capacity(dataset.n_rows());
                for row in dataset.rows() {
                    cells.push(match &row[col] {
                        None => None,
                        Some(v) => {
                            let hit = s.find_bin(v)?;
                            n_clamped += usize::from(hit.clamped);
                            Some(Value::Cat(s.bins()[hit.index].label.clone()))
                        }
                    });
                }
                if n_clamped > 0 {
                    log::warn!(
                        "{n_clamped} out-of-range values of `{}` clamped",
                        column.name
                    );
                    clamped.insert(column.name.clone(), n_clamped);
                }
                out = out.with_column_replaced(col, ColumnKind::Categorical, cells);
            }
            (ColumnKind::Categorical, Some(s)) => {
                for v in dataset.rows().iter().filter_map(|r| r[col].as_ref()) {
                    s.find_bin(v)?;
                }
            }
            (ColumnKind::Categorical, None) => {}
        }
    }
    Ok(Discretized {
        dataset: out,
        clamped,
    })
}
