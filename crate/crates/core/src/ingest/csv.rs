use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use log::warn;

use super::dataset::{Cell, Column, ColumnKind, Dataset, Value};
use crate::error::{Error, Result};

pub const DEFAULT_MISSING: [&str; 3] = ["", "NA", "?"];

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub target: String,
    /// Per-column kind overrides; everything else is inferred.
    pub hints: HashMap<String, ColumnKind>,
    /// Cell texts (after trimming) treated as missing.
    pub missing: Vec<String>,
}

impl CsvOptions {
    pub fn new(target: impl Into<String>) -> Self {
        CsvOptions {
            target: target.into(),
            hints: HashMap::new(),
            missing: DEFAULT_MISSING.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn hint(mut self, column: impl Into<String>, kind: ColumnKind) -> Self {
        self.hints.insert(column.into(), kind);
        self
    }

    pub fn missing_markers<I, S>(mut self, markers: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.missing = markers.into_iter().map(Into::into).collect();
        self
    }
}

/// A row dropped at load time because its target cell was missing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    /// 1-based line number in the file (the header is line 1).
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct LoadedCsv {
    pub dataset: Dataset,
    pub rejected: Vec<RejectedRow>,
}

pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<LoadedCsv> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, opts)
}

/// Parses RFC-4180 CSV with a header row. A column is numeric when every
/// non-missing cell parses as a finite number, categorical otherwise; hints
/// win over inference. The target is always categorical.
pub fn read_csv<R: Read>(reader: R, opts: &CsvOptions) -> Result<LoadedCsv> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let target = header
        .iter()
        .position(|h| *h == opts.target)
        .ok_or_else(|| Error::MissingColumn(opts.target.clone()))?;
    for name in opts.hints.keys() {
        if !header.contains(name) {
            return Err(Error::MissingColumn(name.clone()));
        }
    }
    if opts.hints.get(&opts.target) == Some(&ColumnKind::Numeric) {
        return Err(Error::KindMismatch {
            column: opts.target.clone(),
            expected: "categorical",
            found: "numeric",
        });
    }

    let is_missing = |s: &str| opts.missing.iter().any(|m| m == s);
    let mut raw: Vec<Vec<Option<String>>> = Vec::new();
    let mut rejected = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(Error::Arity {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        let cells: Vec<Option<String>> = record
            .iter()
            .map(|c| {
                let c = c.trim();
                (!is_missing(c)).then(|| c.to_string())
            })
            .collect();
        if cells[target].is_none() {
            warn!(
                "line {line}: target `{}` is missing, row skipped",
                opts.target
            );
            rejected.push(RejectedRow {
                line,
                reason: format!("missing target `{}`", opts.target),
            });
            continue;
        }
        raw.push(cells);
    }

    let mut columns = Vec::with_capacity(header.len());
    for (j, name) in header.iter().enumerate() {
        let kind = if j == target {
            ColumnKind::Categorical
        } else if let Some(&k) = opts.hints.get(name) {
            k
        } else {
            let mut any = false;
            let numeric = raw.iter().filter_map(|r| r[j].as_deref()).all(|s| {
                any = true;
                parse_finite(s).is_some()
            });
            if numeric && any {
                ColumnKind::Numeric
            } else {
                ColumnKind::Categorical
            }
        };
        columns.push(Column::new(name.clone(), kind));
    }

    let mut rows = Vec::with_capacity(raw.len());
    for (r, cells) in raw.into_iter().enumerate() {
        let mut row: Vec<Cell> = Vec::with_capacity(cells.len());
        for (j, cell) in cells.into_iter().enumerate() {
            row.push(match (cell, columns[j].kind) {
                (None, _) => None,
                (Some(s), ColumnKind::Categorical) => Some(Value::Cat(s)),
                (Some(s), ColumnKind::Numeric) => match parse_finite(&s) {
                    Some(x) => Some(Value::Num(x)),
                    None => {
                        return Err(Error::InvalidDataset(format!(
                            "row {r}: `{s}` in numeric column `{}` is not a finite number",
                            columns[j].name
                        )))
                    }
                },
            });
        }
        rows.push(row);
    }

    let dataset = Dataset::new(columns, rows, &opts.target)?;
    Ok(LoadedCsv { dataset, rejected })
}

fn parse_finite(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, opts: &CsvOptions) -> Result<LoadedCsv> {
        read_csv(text.as_bytes(), opts)
    }

    #[test]
    fn single_row_infers_kinds() {
        let out = load("a,b,Class\n1,x,yes\n", &CsvOptions::new("Class")).unwrap();
        let ds = out.dataset;
        assert_eq!(ds.n_rows(), 1);
        assert_eq!(ds.column(0).kind, ColumnKind::Numeric);
        assert_eq!(ds.column(1).kind, ColumnKind::Categorical);
        assert_eq!(ds.class_labels(), ["yes"]);
    }

    #[test]
    fn missing_markers_and_hints() {
        let text = "a,b,Class\nNA,1,p\n?,2,q\n3,,p\n";
        let ds = load(
            text,
            &CsvOptions::new("Class").hint("b", ColumnKind::Categorical),
        )
        .unwrap()
        .dataset;
        assert_eq!(ds.column(0).kind, ColumnKind::Numeric);
        assert_eq!(ds.column(1).kind, ColumnKind::Categorical);
        assert_eq!(ds.cell(0, 0), None);
        assert_eq!(ds.cell(1, 0), None);
        assert_eq!(ds.cell(2, 0), Some(&Value::Num(3.0)));
        assert_eq!(ds.cell(0, 1), Some(&Value::Cat("1".into())));
        assert_eq!(ds.cell(2, 1), None);
    }

    #[test]
    fn numeric_target_text_stays_categorical() {
        let ds = load("x,y\n1,2\n2,4\n", &CsvOptions::new("y"))
            .unwrap()
            .dataset;
        assert_eq!(ds.column(1).kind, ColumnKind::Categorical);
        assert_eq!(ds.class_labels(), ["2", "4"]);
    }

    #[test]
    fn missing_target_rows_are_rejected_with_diagnostic() {
        let out = load("x,y\n1,a\n2,NA\n3,b\n", &CsvOptions::new("y")).unwrap();
        assert_eq!(out.dataset.n_rows(), 2);
        assert_eq!(out.rejected.len(), 1);
        assert_eq!(out.rejected[0].line, 3);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            load("x,y\n1,a\n", &CsvOptions::new("z")),
            Err(Error::MissingColumn(_))
        ));
        assert!(matches!(
            load("x,y\n1,a\n1,a,3\n", &CsvOptions::new("y")),
            Err(Error::Arity { line: 3, .. })
        ));
        assert!(load(
            "x,y\nfoo,a\n",
            &CsvOptions::new("y").hint("x", ColumnKind::Numeric)
        )
        .is_err());
        assert!(matches!(
            load_csv("/nonexistent/file.csv", &CsvOptions::new("y")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn quoted_fields() {
        let ds = load("name,y\n\"a, b\",p\n", &CsvOptions::new("y"))
            .unwrap()
            .dataset;
        assert_eq!(ds.cell(0, 0), Some(&Value::Cat("a, b".into())));
    }
}
