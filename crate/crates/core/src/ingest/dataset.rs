use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

impl ColumnKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Numeric => "numeric",
            ColumnKind::Categorical => "categorical",
        }
    }
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(String),
}

impl Value {
    pub fn kind(&self) -> ColumnKind {
        match self {
            Value::Num(_) => ColumnKind::Numeric,
            Value::Cat(_) => ColumnKind::Categorical,
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(*x),
            Value::Cat(_) => None,
        }
    }

    pub fn as_cat(&self) -> Option<&str> {
        match self {
            Value::Cat(s) => Some(s),
            Value::Num(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(x) => write!(f, "{x}"),
            Value::Cat(s) => f.write_str(s),
        }
    }
}

/// A cell is either missing or holds a value of its column's kind.
pub type Cell = Option<Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        Column {
            name: name.into(),
            kind,
        }
    }
}

/// Typed tabular data with a designated categorical target column.
///
/// Rows always carry one cell per column. The target cell is never missing and
/// `class_labels` lists the distinct target values in order of first
/// appearance; class indices used elsewhere refer to that order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
    target: usize,
    class_labels: Vec<String>,
    classes: Vec<usize>,
}

impl Dataset {
    pub fn new(columns: Vec<Column>, rows: Vec<Vec<Cell>>, target: &str) -> Result<Self> {
        let target_idx = columns
            .iter()
            .position(|c| c.name == target)
            .ok_or_else(|| Error::MissingColumn(target.to_string()))?;
        if columns[target_idx].kind != ColumnKind::Categorical {
            return Err(Error::KindMismatch {
                column: target.to_string(),
                expected: "categorical",
                found: "numeric",
            });
        }
        for (i, a) in columns.iter().enumerate() {
            if columns[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate column name `{}`",
                    a.name
                )));
            }
        }

        let mut class_labels: Vec<String> = Vec::new();
        let mut classes = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::InvalidDataset(format!(
                    "row {r} has {} cells, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            for (cell, col) in row.iter().zip(&columns) {
                if let Some(v) = cell {
                    if v.kind() != col.kind {
                        return Err(Error::InvalidDataset(format!(
                            "row {r}: {} value in {} column `{}`",
                            v.kind(),
                            col.kind,
                            col.name
                        )));
                    }
                    if let Value::Num(x) = v {
                        if !x.is_finite() {
                            return Err(Error::NonFinite(*x));
                        }
                    }
                }
            }
            let label = match &row[target_idx] {
                Some(Value::Cat(s)) => s,
                _ => {
                    return Err(Error::InvalidDataset(format!(
                        "row {r}: target `{target}` is missing"
                    )))
                }
            };
            let idx = match class_labels.iter().position(|l| l == label) {
                Some(i) => i,
                None => {
                    class_labels.push(label.clone());
                    class_labels.len() - 1
                }
            };
            classes.push(idx);
        }

        Ok(Dataset {
            columns,
            rows,
            target: target_idx,
            class_labels,
            classes,
        })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, idx: usize) -> &Column {
        &self.columns[idx]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Column index of a predictor, rejecting unknown names and the target.
    pub fn predictor_index(&self, name: &str) -> Result<usize> {
        match self.column_index(name) {
            Some(i) if i == self.target => Err(Error::InvalidDataset(format!(
                "`{name}` is the target, not a predictor"
            ))),
            Some(i) => Ok(i),
            None => Err(Error::MissingColumn(name.to_string())),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&Value> {
        self.rows[row][col].as_ref()
    }

    pub fn target_index(&self) -> usize {
        self.target
    }

    pub fn target_name(&self) -> &str {
        &self.columns[self.target].name
    }

    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    /// Class index (into `class_labels`) of every row.
    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn class_of(&self, row: usize) -> usize {
        self.classes[row]
    }

    /// Indices of every non-target column, in column order.
    pub fn predictors(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.columns.len()).filter(move |&i| i != self.target)
    }

    pub fn predictor_names(&self) -> Vec<&str> {
        self.predictors()
            .map(|i| self.columns[i].name.as_str())
            .collect()
    }

    /// Non-missing numeric values of a column, in row order.
    pub fn numeric_values(&self, col: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r[col].as_ref().and_then(Value::as_num))
            .collect()
    }

    /// SHA-256 over a canonical rendering of the schema and cells.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for c in &self.columns {
            h.update(c.name.as_bytes());
            h.update([0u8]);
            h.update(c.kind.as_str().as_bytes());
            h.update([1u8]);
        }
        h.update(self.target_name().as_bytes());
        for row in &self.rows {
            for cell in row {
                match cell {
                    None => h.update([2u8]),
                    Some(Value::Num(x)) => {
                        h.update([3u8]);
                        h.update(x.to_bits().to_le_bytes());
                    }
                    Some(Value::Cat(s)) => {
                        h.update([4u8]);
                        h.update(s.as_bytes());
                        h.update([0u8]);
                    }
                }
            }
        }
        hex::encode(h.finalize())
    }

    /// Same schema, with `col` replaced by new cells of kind `kind`.
    pub(crate) fn with_column_replaced(
        &self,
        col: usize,
        kind: ColumnKind,
        cells: Vec<Cell>,
    ) -> Dataset {
        let mut out = self.clone();
        out.columns[col].kind = kind;
        for (row, cell) in out.rows.iter_mut().zip(cells) {
            row[col] = cell;
        }
        out
    }
}
