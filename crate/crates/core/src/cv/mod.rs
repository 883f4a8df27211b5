//! Per-case predictions: k-fold cross-validation around a [`Learner`], or
//! predictions imported from any external model.

mod io;
mod majority;
mod naive_bayes;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::Dataset;

pub use self::io::{import_predictions, read_predictions, write_predictions, PredictionSidecar};
pub use self::majority::{Majority, MajorityModel};
pub use self::naive_bayes::{NaiveBayes, NaiveBayesModel};

/// Default fold count.
pub const DEFAULT_FOLDS: usize = 10;

/// A classifier that can be trained on a subset of a dataset's rows.
///
/// Class indices refer to `Dataset::class_labels`. `predict` must only return
/// classes that occurred in the training rows.
pub trait Learner: Sync {
    type Model: Send + Sync;

    fn name(&self) -> &str;

    fn train(&self, data: &Dataset, rows: &[usize]) -> Result<Self::Model, String>;

    fn predict(&self, model: &Self::Model, data: &Dataset, row: usize) -> usize;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prediction {
    pub row: usize,
    pub truth: usize,
    pub predicted: usize,
}

impl Prediction {
    pub fn is_hit(&self) -> bool {
        self.truth == self.predicted
    }
}

/// One prediction per dataset row, ordered by row index.
///
/// `labels` is the label universe: the dataset's class labels, possibly
/// extended by labels that only an imported model predicted.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    labels: Vec<String>,
    entries: Vec<Prediction>,
    k: usize,
    seed: Option<u64>,
    learner: Option<String>,
}

impl PredictionSet {
    /// Builds a set from `(truth, predicted)` class indices given in row order.
    pub fn new(labels: Vec<String>, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n = labels.len();
        let mut entries = Vec::with_capacity(pairs.len());
        for (row, (truth, predicted)) in pairs.into_iter().enumerate() {
            if truth >= n || predicted >= n {
                return Err(Error::UnknownLabel(format!(
                    "class index {} at row {row}",
                    truth.max(predicted)
                )));
            }
            entries.push(Prediction {
                row,
                truth,
                predicted,
            });
        }
        Ok(PredictionSet {
            labels,
            entries,
            k: 0,
            seed: None,
            learner: None,
        })
    }

    /// Predictions given as label strings, aligned with the dataset rows.
    pub fn from_labels<S: AsRef<str>>(dataset: &Dataset, predicted: &[S]) -> Result<Self> {
        if predicted.len() != dataset.n_rows() {
            return Err(Error::Alignment(format!(
                "{} predictions for {} rows",
                predicted.len(),
                dataset.n_rows()
            )));
        }
        let mut labels = dataset.class_labels().to_vec();
        let mut pairs = Vec::with_capacity(predicted.len());
        for (row, p) in predicted.iter().enumerate() {
            let p = p.as_ref();
            let idx = match labels.iter().position(|l| l == p) {
                Some(i) => i,
                None => {
                    labels.push(p.to_string());
                    labels.len() - 1
                }
            };
            pairs.push((dataset.class_of(row), idx));
        }
        PredictionSet::new(labels, pairs)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn entries(&self) -> &[Prediction] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Fold count used to produce the set; 0 for imported predictions.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn learner(&self) -> Option<&str> {
        self.learner.as_deref()
    }

    pub fn accuracy(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        self.entries.iter().filter(|e| e.is_hit()).count() as f64 / self.entries.len() as f64
    }

    pub fn errors(&self) -> usize {
        self.entries.iter().filter(|e| !e.is_hit()).count()
    }

    /// Checks that the set covers exactly the rows of `dataset` with the same
    /// true labels.
    pub fn check_aligned(&self, dataset: &Dataset) -> Result<()> {
        if self.entries.len() != dataset.n_rows() {
            return Err(Error::Alignment(format!(
                "{} predictions for {} rows",
                self.entries.len(),
                dataset.n_rows()
            )));
        }
        let ds_labels = dataset.class_labels();
        for (i, e) in self.entries.iter().enumerate() {
            let truth = &self.labels[e.truth];
            if e.row != i || *truth != ds_labels[dataset.class_of(i)] {
                return Err(Error::Alignment(format!(
                    "row {i}: true label `{truth}` but dataset has `{}`",
                    ds_labels[dataset.class_of(i)]
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn with_provenance(
        mut self,
        k: usize,
        seed: Option<u64>,
        learner: Option<String>,
    ) -> Self {
        self.k = k;
        self.seed = seed;
        self.learner = learner;
        self
    }
}

/// Assigns each of `n` cases to one of `k` folds.
///
/// The cases are shuffled with Fisher-Yates driven by ChaCha8 seeded from
/// `seed`, then cut into `k` consecutive chunks; the first `n % k` chunks hold
/// one extra case. Deterministic for a fixed `(n, k, seed)`.
pub fn kfold_partition(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 || k > n {
        return Err(Error::InvalidFolds { n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let (base, extra) = (n / k, n % k);
    let mut fold_of = vec![0; n];
    let mut pos = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        for &case in &order[pos..pos + size] {
            fold_of[case] = fold;
        }
        pos += size;
    }
    Ok(fold_of)
}

/// Case indices of each fold, ascending within a fold.
pub fn fold_members(fold_of: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut folds = vec![Vec::new(); k];
    for (case, &f) in fold_of.iter().enumerate() {
        folds[f].push(case);
    }
    folds
}

/// Out-of-fold predictions for every row: for each fold the learner is trained
/// on all other rows and predicts the fold's rows.
pub fn cross_val_predict<L: Learner>(
    dataset: &Dataset,
    learner: &L,
    k: usize,
    seed: u64,
    exec: Execution,
) -> Result<PredictionSet> {
    let n = dataset.n_rows();
    let n_classes = dataset.class_labels().len();
    if n_classes < 2 {
        return Err(Error::InvalidDataset(format!(
            "cross-validation needs at least two classes, found {n_classes}"
        )));
    }
    let fold_of = kfold_partition(n, k, seed)?;
    let folds = fold_members(&fold_of, k);

    let per_fold = exec.map_range(k, |fold| -> Result<Vec<(usize, usize)>> {
        let train: Vec<usize> = (0..n).filter(|&r| fold_of[r] != fold).collect();
        let mut seen = vec![false; n_classes];
        for &r in &train {
            seen[dataset.class_of(r)] = true;
        }
        for (c, _) in seen.iter().enumerate().filter(|(_, s)| !**s) {
            warn!(
                "fold {fold}: class `{}` absent from the training split",
                dataset.class_labels()[c]
            );
        }
        let model = learner
            .train(dataset, &train)
            .map_err(|message| Error::Learner { fold, message })?;
        Ok(folds[fold]
            .iter()
            .map(|&r| (r, learner.predict(&model, dataset, r)))
            .collect())
    });

    let mut predicted = vec![usize::MAX; n];
    for fold in per_fold {
        for (r, p) in fold? {
            predicted[r] = p;
        }
    }
    let pairs = (0..n)
        .map(|r| (dataset.class_of(r), predicted[r]))
        .collect();
    Ok(
        PredictionSet::new(dataset.class_labels().to_vec(), pairs)?.with_provenance(
            k,
            Some(seed),
            Some(learner.name().to_string()),
        ),
    )
}

/// The learners shipped with the crate, selectable by name.
#[derive(Debug, Clone)]
pub enum BuiltinLearner {
    NaiveBayes(NaiveBayes),
    Majority(Majority),
}

pub enum BuiltinModel {
    NaiveBayes(NaiveBayesModel),
    Majority(MajorityModel),
}

impl BuiltinLearner {
    pub const NAMES: [&'static str; 2] = ["nb", "majority"];

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "nb" => Some(BuiltinLearner::NaiveBayes(NaiveBayes::default())),
            "majority" => Some(BuiltinLearner::Majority(Majority)),
            _ => None,
        }
    }
}

impl Learner for BuiltinLearner {
    type Model = BuiltinModel;

    fn name(&self) -> &str {
        match self {
            BuiltinLearner::NaiveBayes(l) => l.name(),
            BuiltinLearner::Majority(l) => l.name(),
        }
    }

    fn train(&self, data: &Dataset, rows: &[usize]) -> Result<BuiltinModel, String> {
        Ok(match self {
            BuiltinLearner::NaiveBayes(l) => BuiltinModel::NaiveBayes(l.train(data, rows)?),
            BuiltinLearner::Majority(l) => BuiltinModel::Majority(l.train(data, rows)?),
        })
    }

    fn predict(&self, model: &BuiltinModel, data: &Dataset, row: usize) -> usize {
        match (self, model) {
            (BuiltinLearner::NaiveBayes(l), BuiltinModel::NaiveBayes(m)) => l.predict(m, data, row),
            (BuiltinLearner::Majority(l), BuiltinModel::Majority(m)) => l.predict(m, data, row),
            _ => unreachable!("model produced by a different learner"),
        }
    }
}
