use super::naive_bayes::argmax_first;
use super::Learner;
use crate::ingest::Dataset;

/// Baseline that always predicts the modal training class (ties go to the
/// earliest class label).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Majority;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MajorityModel {
    pub class: usize,
}

impl Learner for Majority {
    type Model = MajorityModel;

    fn name(&self) -> &str {
        "majority"
    }

    fn train(&self, data: &Dataset, rows: &[usize]) -> Result<MajorityModel, String> {
        if rows.is_empty() {
            return Err("empty training set".into());
        }
        let mut counts = vec![0usize; data.class_labels().len()];
        for &r in rows {
            counts[data.class_of(r)] += 1;
        }
        Ok(MajorityModel {
            class: argmax_first(counts.iter().map(|&c| c as f64)),
        })
    }

    fn predict(&self, model: &MajorityModel, _: &Dataset, _: usize) -> usize {
        model.class
    }
}
