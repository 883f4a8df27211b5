use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cv::PredictionSet;
use crate::edp::{ConfusionDistribution, OutcomeCode};
use crate::error::{Error, Result};
use crate::ingest::{categorical_bins, BinScheme, ColumnKind, Dataset, Value};

/// A `predictor=bin` condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Item {
    #[serde(rename = "pred")]
    pub predictor: String,
    pub bin: String,
}

impl Item {
    pub fn new(predictor: impl Into<String>, bin: impl Into<String>) -> Self {
        Item {
            predictor: predictor.into(),
            bin: bin.into(),
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.predictor, self.bin)
    }
}

pub(crate) type ItemId = u32;

/// The discretized dataset the miner works on: per row, the ids of its items
/// (ascending) and the index of its outcome code.
///
/// Item ids are assigned predictor by predictor, so ascending ids keep items
/// of the same predictor adjacent.
#[derive(Debug, Clone)]
pub struct MiningTable {
    predictors: Vec<String>,
    schemes: Vec<Option<BinScheme>>,
    item_predictor: Vec<usize>,
    item_label: Vec<String>,
    lookup: HashMap<(usize, String), ItemId>,
    records: Vec<Vec<ItemId>>,
    outcomes: Vec<u32>,
    codes: Vec<OutcomeCode>,
    n_classes: usize,
    global: ConfusionDistribution,
}

impl MiningTable {
    /// Builds a table from already-discretized cells. `rows[r][p]` is the bin
    /// label of predictor `p` in row `r`, or `None` when missing. Vocabulary
    /// order per predictor is first appearance.
    pub fn from_records(
        predictors: Vec<String>,
        rows: &[Vec<Option<String>>],
        outcomes: &[OutcomeCode],
        n_classes: usize,
    ) -> Result<Self> {
        let mut vocab: Vec<Vec<String>> = vec![Vec::new(); predictors.len()];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != predictors.len() {
                return Err(Error::Arity {
                    line: r as u64 + 1,
                    expected: predictors.len(),
                    found: row.len(),
                });
            }
            for (p, cell) in row.iter().enumerate() {
                if let Some(l) = cell {
                    if !vocab[p].contains(l) {
                        vocab[p].push(l.clone());
                    }
                }
            }
        }
        let schemes = vec![None; predictors.len()];
        Self::assemble(predictors, schemes, vocab, rows, outcomes, n_classes)
    }

    fn assemble(
        predictors: Vec<String>,
        schemes: Vec<Option<BinScheme>>,
        vocab: Vec<Vec<String>>,
        rows: &[Vec<Option<String>>],
        outcomes: &[OutcomeCode],
        n_classes: usize,
    ) -> Result<Self> {
        if rows.len() != outcomes.len() {
            return Err(Error::Alignment(format!(
                "{} rows but {} outcomes",
                rows.len(),
                outcomes.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = predictors.iter().find(|p| !seen.insert(p.as_str())) {
            return Err(Error::InvalidDataset(format!(
                "duplicate predictor `{dup}`"
            )));
        }
        let mut item_predictor = Vec::new();
        let mut item_label = Vec::new();
        let mut lookup = HashMap::new();
        for (p, labels) in vocab.into_iter().enumerate() {
            for l in labels {
                let id = item_label.len() as ItemId;
                lookup.insert((p, l.clone()), id);
                item_predictor.push(p);
                item_label.push(l);
            }
        }
        let records = rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter_map(|(p, c)| c.as_ref().map(|l| lookup[&(p, l.clone())]))
                    .collect()
            })
            .collect();

        let global = ConfusionDistribution::from_codes(n_classes, outcomes.iter().copied());
        let codes = global.codes();
        let code_index: HashMap<OutcomeCode, u32> = codes
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        let outcomes = outcomes.iter().map(|c| code_index[c]).collect();
        Ok(MiningTable {
            predictors,
            schemes,
            item_predictor,
            item_label,
            lookup,
            records,
            outcomes,
            codes,
            n_classes,
            global,
        })
    }

    pub fn predictors(&self) -> &[String] {
        &self.predictors
    }

    pub fn n_rows(&self) -> usize {
        self.records.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_label.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Distribution of the outcome column over all rows.
    pub fn global(&self) -> &ConfusionDistribution {
        &self.global
    }

    /// Items of row `r`.
    pub fn row_items(&self, r: usize) -> Vec<Item> {
        self.records[r].iter().map(|&id| self.item(id)).collect()
    }

    pub fn row_outcome(&self, r: usize) -> OutcomeCode {
        self.codes[self.outcomes[r] as usize]
    }

    /// All items, grouped by predictor.
    pub fn vocabulary(&self) -> Vec<Item> {
        (0..self.n_items() as ItemId)
            .map(|id| self.item(id))
            .collect()
    }

    pub(crate) fn item(&self, id: ItemId) -> Item {
        Item::new(
            self.predictors[self.item_predictor[id as usize]].clone(),
            self.item_label[id as usize].clone(),
        )
    }

    pub(crate) fn item_predictor(&self, id: ItemId) -> usize {
        self.item_predictor[id as usize]
    }

    pub(crate) fn records(&self) -> &[Vec<ItemId>] {
        &self.records
    }

    pub(crate) fn outcome_index(&self, r: usize) -> usize {
        self.outcomes[r] as usize
    }

    /// Outcome codes present in the table, in display order.
    pub(crate) fn codes(&self) -> &[OutcomeCode] {
        &self.codes
    }

    /// Resolves a `predictor=bin` condition to an item id. The bin text may be
    /// an exact label, a label differing only in whitespace, or (for numeric
    /// predictors) a value that falls in one of the bins.
    pub(crate) fn resolve(&self, predictor: &str, bin: &str) -> Result<ItemId> {
        let unknown = || Error::Query(format!("unknown condition `{predictor}={bin}`"));
        let p = self
            .predictors
            .iter()
            .position(|x| x == predictor)
            .ok_or_else(|| Error::Query(format!("unknown predictor `{predictor}`")))?;
        if let Some(&id) = self.lookup.get(&(p, bin.to_string())) {
            return Ok(id);
        }
        let squash = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        let wanted = squash(bin);
        let by_text = (0..self.n_items())
            .find(|&id| self.item_predictor[id] == p && squash(&self.item_label[id]) == wanted);
        if let Some(id) = by_text {
            return Ok(id as ItemId);
        }
        match (&self.schemes[p], bin.trim().parse::<f64>()) {
            (Some(s), Ok(v)) if s.kind() == ColumnKind::Numeric && v.is_finite() => {
                let hit = s.find_bin(&Value::Num(v))?;
                if hit.clamped {
                    return Err(unknown());
                }
                let label = &s.bins()[hit.index].label;
                self.lookup
                    .get(&(p, label.clone()))
                    .copied()
                    .ok_or_else(unknown)
            }
            _ => Err(unknown()),
        }
    }
}

/// Discretizes every predictor of `dataset` and attaches the outcome code of
/// each row. Numeric predictors need a scheme in `schemes`; categorical ones
/// default to one bin per category. Missing cells yield no item.
pub fn build_mining_table(
    dataset: &Dataset,
    preds: &PredictionSet,
    schemes: &[BinScheme],
) -> Result<MiningTable> {
    preds.check_aligned(dataset)?;
    let cols: Vec<usize> = dataset.predictors().collect();
    let mut predictors = Vec::with_capacity(cols.len());
    let mut used: Vec<Option<BinScheme>> = Vec::with_capacity(cols.len());
    for &c in &cols {
        let col = dataset.column(c);
        let scheme = match schemes.iter().find(|s| s.predictor() == col.name) {
            Some(s) => Some(s.clone()),
            None if col.kind == ColumnKind::Categorical => {
                let empty = dataset.rows().iter().all(|r| r[c].is_none());
                (!empty)
                    .then(|| categorical_bins(dataset, &col.name))
                    .transpose()?
            }
            // an all-missing column contributes no items
            None if dataset.rows().iter().all(|r| r[c].is_none()) => None,
            None => {
                return Err(Error::InvalidScheme {
                    predictor: col.name.clone(),
                    reason: "numeric predictor has no bin scheme".into(),
                })
            }
        };
        predictors.push(col.name.clone());
        used.push(scheme);
    }

    let mut rows = Vec::with_capacity(dataset.n_rows());
    for r in 0..dataset.n_rows() {
        let mut row = Vec::with_capacity(cols.len());
        for (&c, s) in cols.iter().zip(&used) {
            row.push(match (dataset.cell(r, c), s) {
                (Some(v), Some(s)) => Some(s.bins()[s.find_bin(v)?.index].label.clone()),
                _ => None,
            });
        }
        rows.push(row);
    }
    let outcomes: Vec<OutcomeCode> = preds
        .entries()
        .iter()
        .map(|e| OutcomeCode::of(e.truth, e.predicted))
        .collect();
    let vocab = used
        .iter()
        .map(|s| {
            s.iter()
                .flat_map(|s| s.labels().map(String::from))
                .collect()
        })
        .collect();
    MiningTable::assemble(predictors, used, vocab, &rows, &outcomes, preds.n_classes())
}
