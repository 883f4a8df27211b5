use std::collections::HashMap;

use log::warn;

use super::Learner;
use crate::ingest::{ColumnKind, Dataset, Value};

/// Naive Bayes without Laplace smoothing.
///
/// Categorical predictors use empirical per-class frequencies, numeric ones a
/// per-class Gaussian (unbiased variance, floored at `var_floor`). A
/// conditional probability that is exactly zero (an unseen category, or a
/// density that underflows) is replaced by `zero_threshold`, which is how
/// e1071's `naiveBayes` treats zeros. Missing cells contribute nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayes {
    pub zero_threshold: f64,
    pub var_floor: f64,
}

impl Default for NaiveBayes {
    fn default() -> Self {
        NaiveBayes {
            zero_threshold: 0.001,
            var_floor: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NaiveBayesModel {
    class_counts: Vec<usize>,
    log_prior: Vec<f64>,
    features: Vec<(usize, Feature)>,
    majority: usize,
}

#[derive(Debug, Clone)]
enum Feature {
    Categorical {
        counts: Vec<HashMap<String, usize>>,
        totals: Vec<usize>,
    },
    Gaussian {
        mean: Vec<f64>,
        var: Vec<f64>,
        n: Vec<usize>,
    },
}

impl NaiveBayes {
    /// Per-class log scores for one row; `None` for classes absent from
    /// training. Rows with no observed predictor get only the priors.
    pub fn scores(&self, model: &NaiveBayesModel, data: &Dataset, row: usize) -> Vec<Option<f64>> {
        let ln_zero = self.zero_threshold.ln();
        let mut scores: Vec<Option<f64>> = model
            .class_counts
            .iter()
            .zip(&model.log_prior)
            .map(|(&n, &lp)| (n > 0).then_some(lp))
            .collect();
        for (col, feature) in &model.features {
            let Some(value) = data.cell(row, *col) else {
                continue;
            };
            for (c, score) in scores.iter_mut().enumerate() {
                let Some(s) = score else { continue };
                *s += match (feature, value) {
                    (Feature::Categorical { counts, totals }, Value::Cat(v)) => {
                        if totals[c] == 0 {
                            0.0
                        } else {
                            let k = counts[c].get(v).copied().unwrap_or(0);
                            if k == 0 {
                                ln_zero
                            } else {
                                (k as f64 / totals[c] as f64).ln()
                            }
                        }
                    }
                    (Feature::Gaussian { mean, var, n }, Value::Num(x)) => {
                        if n[c] == 0 {
                            0.0
                        } else {
                            let d = x - mean[c];
                            let ld = -0.5 * (2.0 * std::f64::consts::PI * var[c]).ln()
                                - d * d / (2.0 * var[c]);
                            if ld.exp() == 0.0 {
                                ln_zero
                            } else {
                                ld
                            }
                        }
                    }
                    _ => 0.0,
                };
            }
        }
        scores
    }
}

impl Learner for NaiveBayes {
    type Model = NaiveBayesModel;

    fn name(&self) -> &str {
        "nb"
    }

    fn train(&self, data: &Dataset, rows: &[usize]) -> Result<NaiveBayesModel, String> {
        if rows.is_empty() {
            return Err("empty training set".into());
        }
        let n_classes = data.class_labels().len();
        let mut class_counts = vec![0usize; n_classes];
        for &r in rows {
            class_counts[data.class_of(r)] += 1;
        }
        let log_prior = class_counts
            .iter()
            .map(|&c| (c as f64 / rows.len() as f64).ln())
            .collect();
        let majority = argmax_first(class_counts.iter().map(|&c| c as f64));

        let mut features = Vec::new();
        for col in data.predictors() {
            let feature = match data.column(col).kind {
                ColumnKind::Categorical => {
                    let mut counts = vec![HashMap::new(); n_classes];
                    let mut totals = vec![0usize; n_classes];
                    for &r in rows {
                        if let Some(Value::Cat(v)) = data.cell(r, col) {
                            let c = data.class_of(r);
                            *counts[c].entry(v.clone()).or_insert(0) += 1;
                            totals[c] += 1;
                        }
                    }
                    Feature::Categorical { counts, totals }
                }
                ColumnKind::Numeric => {
                    let mut sum = vec![0.0; n_classes];
                    let mut n = vec![0usize; n_classes];
                    for &r in rows {
                        if let Some(Value::Num(x)) = data.cell(r, col) {
                            let c = data.class_of(r);
                            sum[c] += x;
                            n[c] += 1;
                        }
                    }
                    let mean: Vec<f64> = (0..n_classes)
                        .map(|c| if n[c] > 0 { sum[c] / n[c] as f64 } else { 0.0 })
                        .collect();
                    let mut ss = vec![0.0; n_classes];
                    for &r in rows {
                        if let Some(Value::Num(x)) = data.cell(r, col) {
                            let c = data.class_of(r);
                            ss[c] += (x - mean[c]).powi(2);
                        }
                    }
                    let var = (0..n_classes)
                        .map(|c| {
                            let v = if n[c] > 1 {
                                ss[c] / (n[c] - 1) as f64
                            } else {
                                0.0
                            };
                            v.max(self.var_floor)
                        })
                        .collect();
                    Feature::Gaussian { mean, var, n }
                }
            };
            features.push((col, feature));
        }
        Ok(NaiveBayesModel {
            class_counts,
            log_prior,
            features,
            majority,
        })
    }

    fn predict(&self, model: &NaiveBayesModel, data: &Dataset, row: usize) -> usize {
        if model
            .features
            .iter()
            .all(|(col, _)| data.cell(row, *col).is_none())
        {
            warn!("row {row} has no observed predictors, predicting the majority class");
            return model.majority;
        }
        let scores = self.scores(model, data, row);
        argmax_first(scores.iter().map(|s| s.unwrap_or(f64::NEG_INFINITY)))
    }
}

/// Index of the largest value; ties go to the earliest index.
pub(crate) fn argmax_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}
