use std::collections::BTreeMap;
use std::fmt::Write;

use crate::cv::PredictionSet;
use crate::error::{Error, Result};

/// Prediction outcome as a category: a hit, or an (effective, predicted)
/// pair of class indices for a miss.
///
/// Displayed as `0` for a hit and as the 1-based indices `tp` (e.g. `12`)
/// for a miss; with more than nine classes the indices are separated, `3|11`,
/// so the encoding stays unambiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeCode {
    Hit,
    Miss { truth: usize, predicted: usize },
}

impl OutcomeCode {
    pub fn of(truth: usize, predicted: usize) -> Self {
        if truth == predicted {
            OutcomeCode::Hit
        } else {
            OutcomeCode::Miss { truth, predicted }
        }
    }

    pub fn encode(truth: &str, predicted: &str, labels: &[String]) -> Result<Self> {
        let idx = |l: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))
        };
        Ok(OutcomeCode::of(idx(truth)?, idx(predicted)?))
    }

    pub fn is_hit(self) -> bool {
        self == OutcomeCode::Hit
    }

    pub fn display(self, n_classes: usize) -> String {
        match self {
            OutcomeCode::Hit => "0".into(),
            OutcomeCode::Miss { truth, predicted } if n_classes <= 9 => {
                format!("{}{}", truth + 1, predicted + 1)
            }
            OutcomeCode::Miss { truth, predicted } => format!("{}|{}", truth + 1, predicted + 1),
        }
    }

    pub fn parse(s: &str, n_classes: usize) -> Result<Self> {
        let bad = || Error::UnknownLabel(format!("outcome code `{s}`"));
        if s == "0" {
            return Ok(OutcomeCode::Hit);
        }
        let (t, p) = if n_classes <= 9 {
            let b = s.as_bytes();
            if b.len() != 2 {
                return Err(bad());
            }
            (&s[..1], &s[1..])
        } else {
            s.split_once('|').ok_or_else(bad)?
        };
        let t: usize = t.parse().map_err(|_| bad())?;
        let p: usize = p.parse().map_err(|_| bad())?;
        if t == 0 || p == 0 || t == p || t > n_classes || p > n_classes {
            return Err(bad());
        }
        Ok(OutcomeCode::Miss {
            truth: t - 1,
            predicted: p - 1,
        })
    }

    /// Position among all possible codes of an `n_classes` task (hit first,
    /// then misses row by row); used for stable color assignment.
    pub fn rank(self, n_classes: usize) -> usize {
        match self {
            OutcomeCode::Hit => 0,
            OutcomeCode::Miss { truth, predicted } => {
                1 + truth * (n_classes - 1)
                    + if predicted > truth {
                        predicted - 1
                    } else {
                        predicted
                    }
            }
        }
    }
}

/// Counts of outcome codes over a set of cases, with the whole diagonal of
/// the confusion matrix folded into the single hit cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionDistribution {
    n_classes: usize,
    total: u64,
    counts: BTreeMap<OutcomeCode, u64>,
}

impl ConfusionDistribution {
    pub fn new(n_classes: usize) -> Self {
        ConfusionDistribution {
            n_classes,
            total: 0,
            counts: BTreeMap::new(),
        }
    }

    pub fn from_codes(n_classes: usize, codes: impl IntoIterator<Item = OutcomeCode>) -> Self {
        let mut d = ConfusionDistribution::new(n_classes);
        for c in codes {
            d.add(c, 1);
        }
        d
    }

    pub fn add(&mut self, code: OutcomeCode, n: u64) {
        if n > 0 {
            *self.counts.entry(code).or_insert(0) += n;
            self.total += n;
        }
    }

    pub fn merge(&mut self, other: &ConfusionDistribution) {
        for (&c, &n) in &other.counts {
            self.add(c, n);
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn count(&self, code: OutcomeCode) -> u64 {
        self.counts.get(&code).copied().unwrap_or(0)
    }

    pub fn proportion(&self, code: OutcomeCode) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(code) as f64 / self.total as f64
        }
    }

    pub fn hits(&self) -> u64 {
        self.count(OutcomeCode::Hit)
    }

    pub fn errors(&self) -> u64 {
        self.total - self.hits()
    }

    /// Non-zero cells in display order: hit first, then misses in lexical
    /// order of their code strings.
    pub fn cells(&self) -> Vec<(OutcomeCode, u64)> {
        let mut cells: Vec<(OutcomeCode, u64)> =
            self.counts.iter().map(|(&c, &n)| (c, n)).collect();
        sort_codes_by(&mut cells, self.n_classes, |c| c.0);
        cells
    }

    pub fn codes(&self) -> Vec<OutcomeCode> {
        self.cells().into_iter().map(|(c, _)| c).collect()
    }

    /// Only the miss cells.
    pub fn misses(&self) -> ConfusionDistribution {
        let mut d = ConfusionDistribution::new(self.n_classes);
        for (&c, &n) in self.counts.iter().filter(|(c, _)| !c.is_hit()) {
            d.add(c, n);
        }
        d
    }

    /// `CM={ 0/0.854,12/0.044,21/0.102 }` with three-decimal proportions.
    pub fn cm_string(&self) -> String {
        let mut s = String::from("CM={ ");
        for (i, (code, _)) in self.cells().into_iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(
                s,
                "{}/{:.3}",
                code.display(self.n_classes),
                self.proportion(code)
            );
        }
        s.push_str(" }");
        s
    }
}

pub(crate) fn sort_codes_by<T>(items: &mut [T], n_classes: usize, key: impl Fn(&T) -> OutcomeCode) {
    items.sort_by_cached_key(|t| {
        let c = key(t);
        (!c.is_hit(), c.display(n_classes))
    });
}

pub fn global_distribution(preds: &PredictionSet) -> ConfusionDistribution {
    ConfusionDistribution::from_codes(
        preds.n_classes(),
        preds
            .entries()
            .iter()
            .map(|e| OutcomeCode::of(e.truth, e.predicted)),
    )
}
