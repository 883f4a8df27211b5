//! Classification error dependence plots: the model's confusion distribution
//! per bin of one predictor, next to the global distribution.

mod export;
mod outcome;
mod svg;

use crate::cv::PredictionSet;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::{default_scheme, Bin, BinScheme, Dataset};

pub use self::export::{EdpExport, ExportBin, ExportGlobal};
pub use self::outcome::{global_distribution, ConfusionDistribution, OutcomeCode};
pub use self::svg::{render_edp_svg, render_zoom_svg, SvgOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct BinSummary {
    pub bin: Bin,
    pub distribution: ConfusionDistribution,
    /// Fraction of all dataset rows that fall in this bin.
    pub share: f64,
}

impl BinSummary {
    pub fn count(&self) -> u64 {
        self.distribution.total()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdpResult {
    pub predictor: String,
    pub scheme: BinScheme,
    pub bins: Vec<BinSummary>,
    /// Over every row, including rows where the predictor is missing.
    pub global: ConfusionDistribution,
    /// Rows skipped because the predictor cell is missing.
    pub missing: usize,
    /// Out-of-range values clamped into a boundary bin.
    pub clamped: usize,
}

impl EdpResult {
    pub fn n_rows(&self) -> u64 {
        self.global.total()
    }

    /// Element-wise sum of the per-bin distributions.
    pub fn binned_total(&self) -> ConfusionDistribution {
        let mut d = ConfusionDistribution::new(self.global.n_classes());
        for b in &self.bins {
            d.merge(&b.distribution);
        }
        d
    }
}

/// Builds the EDP of `predictor`. Without a scheme, numeric predictors get the
/// default quantile bins and categorical ones a bin per category.
pub fn compute_edp(
    dataset: &Dataset,
    preds: &PredictionSet,
    predictor: &str,
    scheme: Option<&BinScheme>,
) -> Result<EdpResult> {
    preds.check_aligned(dataset)?;
    let col = dataset.predictor_index(predictor)?;
    let n_present = dataset.rows().iter().filter(|r| r[col].is_some()).count();
    if n_present == 0 {
        return Err(Error::InvalidDataset(format!(
            "predictor `{predictor}` has no values"
        )));
    }
    let scheme = match scheme {
        Some(s) => s.clone(),
        None => default_scheme(dataset, predictor)?,
    };

    let n_classes = preds.n_classes();
    let mut dists = vec![ConfusionDistribution::new(n_classes); scheme.len()];
    let mut missing = 0;
    let mut clamped = 0;
    for (row, e) in preds.entries().iter().enumerate() {
        let Some(v) = dataset.cell(row, col) else {
            missing += 1;
            continue;
        };
        let hit = scheme.find_bin(v)?;
        clamped += usize::from(hit.clamped);
        dists[hit.index].add(OutcomeCode::of(e.truth, e.predicted), 1);
    }

    let n = dataset.n_rows() as f64;
    let bins = scheme
        .bins()
        .iter()
        .zip(dists)
        .map(|(bin, distribution)| BinSummary {
            bin: bin.clone(),
            share: distribution.total() as f64 / n,
            distribution,
        })
        .collect();
    Ok(EdpResult {
        predictor: predictor.to_string(),
        scheme,
        bins,
        global: global_distribution(preds),
        missing,
        clamped,
    })
}

/// EDPs for several predictors, computed concurrently when `exec` allows.
pub fn compute_edps(
    dataset: &Dataset,
    preds: &PredictionSet,
    predictors: &[String],
    schemes: &[BinScheme],
    exec: Execution,
) -> Vec<Result<EdpResult>> {
    exec.map(predictors, |p| {
        let scheme = schemes.iter().find(|s| s.predictor() == p);
        compute_edp(dataset, preds, p, scheme)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoomBin {
    pub bin: Bin,
    /// Miss cells only.
    pub errors: ConfusionDistribution,
    /// This bin's errors as a fraction of all binned errors.
    pub error_share: f64,
}

/// EDP with the hits removed: each bar is re-proportioned over errors only.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoomView {
    pub predictor: String,
    pub bins: Vec<ZoomBin>,
    pub global_errors: ConfusionDistribution,
    /// Errors among rows with a value for the predictor.
    pub total_errors: u64,
}

impl ZoomView {
    /// True when there is nothing to zoom into.
    pub fn is_empty(&self) -> bool {
        self.total_errors == 0
    }
}

pub fn error_zoom(edp: &EdpResult) -> ZoomView {
    let total_errors: u64 = edp.bins.iter().map(|b| b.distribution.errors()).sum();
    let bins = edp
        .bins
        .iter()
        .map(|b| {
            let errors = b.distribution.misses();
            let error_share = if total_errors == 0 {
                0.0
            } else {
                errors.total() as f64 / total_errors as f64
            };
            ZoomBin {
                bin: b.bin.clone(),
                errors,
                error_share,
            }
        })
        .collect();
    ZoomView {
        predictor: edp.predictor.clone(),
        bins,
        global_errors: edp.global.misses(),
        total_errors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Column, ColumnKind, Value};

    fn fixture() -> (Dataset, PredictionSet) {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let ys = ["a", "a", "b", "b", "a", "b", "a", "b", "a", "b"];
        let preds = ["a", "b", "b", "a", "a", "b", "a", "a", "a", "b"];
        let mut rows: Vec<_> = xs
            .iter()
            .zip(ys)
            .map(|(&x, y)| vec![Some(Value::Num(x)), Some(Value::Cat(y.into()))])
            .collect();
        rows[4][0] = None;
        let ds = Dataset::new(
            vec![
                Column::new("x", ColumnKind::Numeric),
                Column::new("y", ColumnKind::Categorical),
            ],
            rows,
            "y",
        )
        .unwrap();
        let p = PredictionSet::from_labels(&ds, &preds).unwrap();
        (ds, p)
    }

    #[test]
    fn aggregation_identity() {
        let (ds, p) = fixture();
        let edp = compute_edp(&ds, &p, "x", None).unwrap();
        assert_eq!(edp.missing, 1);
        let per_bin: u64 = edp.bins.iter().map(BinSummary::count).sum();
        assert_eq!(per_bin, 9);
        // global restricted to non-missing rows
        let mut restricted = ConfusionDistribution::new(2);
        for (r, e) in p.entries().iter().enumerate() {
            if ds.cell(r, 0).is_some() {
                restricted.add(OutcomeCode::of(e.truth, e.predicted), 1);
            }
        }
        assert_eq!(edp.binned_total(), restricted);
        assert_eq!(edp.global, global_distribution(&p));
    }

    #[test]
    fn single_bin_equals_global() {
        let (ds, p) = fixture();
        let one = BinScheme::from_edges("x", vec![1.0, 10.0]).unwrap();
        let edp = compute_edp(&ds, &p, "x", Some(&one)).unwrap();
        assert_eq!(edp.bins.len(), 1);
        assert_eq!(edp.bins[0].distribution, edp.binned_total());
    }

    #[test]
    fn empty_bins_are_kept() {
        let (ds, p) = fixture();
        let s = BinScheme::from_edges("x", vec![1.0, 5.0, 20.0, 30.0]).unwrap();
        let edp = compute_edp(&ds, &p, "x", Some(&s)).unwrap();
        assert_eq!(edp.bins.len(), 3);
        assert_eq!(edp.bins[2].count(), 0);
        assert_eq!(edp.bins[2].share, 0.0);
    }

    #[test]
    fn zoom_shares() {
        let (ds, p) = fixture();
        let edp = compute_edp(&ds, &p, "x", None).unwrap();
        let z = error_zoom(&edp);
        assert_eq!(z.total_errors, 3);
        let sum: f64 = z.bins.iter().map(|b| b.error_share).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(z.bins.iter().all(|b| b.errors.hits() == 0));
    }

    #[test]
    fn zoom_of_perfect_model_is_empty() {
        let (ds, _) = fixture();
        let truth: Vec<&str> = ds
            .classes()
            .iter()
            .map(|&c| ds.class_labels()[c].as_str())
            .collect();
        let p = PredictionSet::from_labels(&ds, &truth).unwrap();
        let z = error_zoom(&compute_edp(&ds, &p, "x", None).unwrap());
        assert!(z.is_empty());
    }

    #[test]
    fn one_bin_holding_all_errors() {
        let (ds, p) = fixture();
        // the misses sit at x = 2, 4 and 8, all inside [1 : 8]
        let s = BinScheme::from_edges("x", vec![1.0, 8.0, 10.0]).unwrap();
        let z = error_zoom(&compute_edp(&ds, &p, "x", Some(&s)).unwrap());
        assert_eq!(z.bins[0].error_share, 1.0);
        assert_eq!(z.bins[1].error_share, 0.0);
    }

    #[test]
    fn errors() {
        let (ds, p) = fixture();
        assert!(compute_edp(&ds, &p, "nope", None).is_err());
        assert!(compute_edp(&ds, &p, "y", None).is_err());
    }
}
