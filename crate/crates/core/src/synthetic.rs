//! Seeded synthetic mining tables for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::edp::OutcomeCode;
use crate::error::Result;
use crate::rules::MiningTable;

/// Level counts and the weight of each predictor's most common level, shaped
/// after the census-income table (14 predictors, a few dominant categories).
const ADULT_SHAPE: [(&str, usize, f64); 14] = [
    ("age", 5, 0.25),
    ("workclass", 9, 0.70),
    ("fnlwgt", 5, 0.20),
    ("education", 16, 0.32),
    ("education-num", 5, 0.32),
    ("marital-status", 7, 0.46),
    ("occupation", 15, 0.13),
    ("relationship", 6, 0.41),
    ("race", 5, 0.85),
    ("sex", 2, 0.67),
    ("capital-gain", 3, 0.92),
    ("capital-loss", 3, 0.95),
    ("hours-per-week", 5, 0.47),
    ("native-country", 41, 0.90),
];

pub const ADULT_ROWS: usize = 32_561;

fn draw_level(rng: &mut ChaCha8Rng, levels: usize, top: f64) -> usize {
    if levels == 1 || rng.random::<f64>() < top {
        return 0;
    }
    // geometric-ish tail over the remaining levels
    let mut l = 1;
    while l + 1 < levels && rng.random::<f64>() < 0.6 {
        l += 1;
    }
    l
}

/// A 32,561 x 14 table of skewed categorical predictors with a two-class
/// outcome whose error rate depends on a few of them.
pub fn adult_like(seed: u64) -> Result<MiningTable> {
    adult_like_rows(seed, ADULT_ROWS)
}

pub fn adult_like_rows(seed: u64, n_rows: usize) -> Result<MiningTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let predictors: Vec<String> = ADULT_SHAPE.iter().map(|s| s.0.to_string()).collect();
    let mut rows = Vec::with_capacity(n_rows);
    let mut outcomes = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let levels: Vec<usize> = ADULT_SHAPE
            .iter()
            .map(|&(_, n, top)| draw_level(&mut rng, n, top))
            .collect();
        let mut p_miss = 0.12;
        if levels[3] == 1 {
            p_miss += 0.08;
        }
        if levels[7] == 0 {
            p_miss -= 0.06;
        }
        if levels[0] >= 3 && levels[9] == 1 {
            p_miss += 0.10;
        }
        let code = if rng.random::<f64>() < p_miss {
            if rng.random::<f64>() < 0.3 {
                OutcomeCode::of(0, 1)
            } else {
                OutcomeCode::of(1, 0)
            }
        } else {
            OutcomeCode::Hit
        };
        rows.push(
            levels
                .iter()
                .zip(&ADULT_SHAPE)
                .map(|(&l, s)| Some(format!("{}{}", &s.0[..1], l)))
                .collect(),
        );
        outcomes.push(code);
    }
    MiningTable::from_records(predictors, &rows, &outcomes, 2)
}

/// Small uniform random table: `n_preds` predictors with up to `max_bins`
/// levels each, about `missing` of cells absent, outcomes over `n_classes`.
pub fn random_table(
    rng: &mut impl Rng,
    n_rows: usize,
    n_preds: usize,
    max_bins: usize,
    n_classes: usize,
    missing: f64,
) -> Result<MiningTable> {
    let bins: Vec<usize> = (0..n_preds)
        .map(|_| rng.random_range(1..=max_bins))
        .collect();
    let predictors: Vec<String> = (0..n_preds).map(|p| format!("p{p}")).collect();
    let mut rows = Vec::with_capacity(n_rows);
    let mut outcomes = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        rows.push(
            bins.iter()
                .map(|&b| {
                    (rng.random::<f64>() >= missing).then(|| format!("b{}", rng.random_range(0..b)))
                })
                .collect(),
        );
        let t = rng.random_range(0..n_classes);
        let p = if rng.random::<f64>() < 0.6 {
            t
        } else {
            rng.random_range(0..n_classes)
        };
        outcomes.push(OutcomeCode::of(t, p));
    }
    MiningTable::from_records(predictors, &rows, &outcomes, n_classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adult_shape() {
        let t = adult_like_rows(1, 500).unwrap();
        assert_eq!(t.n_rows(), 500);
        assert_eq!(t.predictors().len(), 14);
        assert!(t.global().errors() > 0);
    }

    #[test]
    fn seeded() {
        let a = adult_like_rows(7, 200).unwrap();
        let b = adult_like_rows(7, 200).unwrap();
        assert_eq!(a.global(), b.global());
        assert_eq!(a.row_items(17), b.row_items(17));
    }
}
