use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use super::PredictionSet;
use crate::error::{Error, Result};
use crate::ingest::Dataset;

/// Provenance written next to an exported predictions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSidecar {
    pub k: usize,
    pub seed: Option<u64>,
    pub learner: Option<String>,
    pub dataset_hash: String,
}

impl PredictionSidecar {
    pub fn new(preds: &PredictionSet, dataset: &Dataset) -> Self {
        PredictionSidecar {
            k: preds.k(),
            seed: preds.seed(),
            learner: preds.learner().map(str::to_string),
            dataset_hash: dataset.fingerprint(),
        }
    }
}

pub fn import_predictions(dataset: &Dataset, path: impl AsRef<Path>) -> Result<PredictionSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_predictions(dataset, file)
}

/// Reads a `row_id,true,pred` CSV produced by any model.
///
/// Row ids must cover `0..n` exactly once and every true label must match the
/// dataset's target for that row. Predicted labels the dataset never uses are
/// accepted and appended to the label universe.
pub fn read_predictions<R: Read>(dataset: &Dataset, reader: R) -> Result<PredictionSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let (id_col, true_col, pred_col) = (col("row_id")?, col("true")?, col("pred")?);

    let n = dataset.n_rows();
    let mut labels = dataset.class_labels().to_vec();
    let mut predicted: Vec<Option<usize>> = vec![None; n];
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let row: usize = field(id_col).parse().map_err(|_| {
            Error::Alignment(format!("line {line}: bad row_id `{}`", field(id_col)))
        })?;
        if row >= n {
            return Err(Error::Alignment(format!(
                "line {line}: row_id {row} out of range for {n} rows"
            )));
        }
        if predicted[row].is_some() {
            return Err(Error::Alignment(format!(
                "line {line}: duplicate row_id {row}"
            )));
        }
        let expected = &dataset.class_labels()[dataset.class_of(row)];
        if field(true_col) != expected {
            return Err(Error::Alignment(format!(
                "line {line}: row {row} has true label `{}` but the dataset says `{expected}`",
                field(true_col)
            )));
        }
        let pred = field(pred_col);
        let idx = match labels.iter().position(|l| l == pred) {
            Some(i) => i,
            None => {
                warn!("predicted label `{pred}` is not a dataset class, adding it");
                labels.push(pred.to_string());
                labels.len() - 1
            }
        };
        predicted[row] = Some(idx);
    }
    if let Some(missing) = predicted.iter().position(Option::is_none) {
        return Err(Error::Alignment(format!("row_id {missing} missing")));
    }
    let pairs = predicted
        .into_iter()
        .enumerate()
        .map(|(r, p)| (dataset.class_of(r), p.unwrap()))
        .collect();
    PredictionSet::new(labels, pairs)
}

pub fn write_predictions<W: Write>(preds: &PredictionSet, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["row_id", "true", "pred"])?;
    let labels = preds.labels();
    for e in preds.entries() {
        w.write_record([
            e.row.to_string().as_str(),
            labels[e.truth].as_str(),
            labels[e.predicted].as_str(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<predictions>", e))?;
    Ok(())
}
