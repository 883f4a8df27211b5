//! Property bodies shared by the property tests and the acceptance run.
#![allow(dead_code)]

use std::collections::HashSet;

use devperf::cv::{cross_val_predict, fold_members, kfold_partition, Learner, PredictionSet};
use devperf::edp::{
    compute_edp, compute_edps, error_zoom, render_edp_svg, render_zoom_svg, ConfusionDistribution,
    EdpExport, OutcomeCode, SvgOptions,
};
use devperf::ingest::{Column, ColumnKind, Dataset, Value};
use devperf::rules::{mine_rules, query_subgroup, MiningConfig};
use devperf::synthetic::random_table;
use devperf::Execution;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type PropResult = Result<(), TestCaseError>;

/// A dataset with a numeric predictor `x` (some missing), a categorical
/// predictor `c` and a target over `n_classes` labels, plus random
/// predictions over the same labels.
pub fn random_case(seed: u64, n: usize, n_classes: usize) -> (Dataset, PredictionSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = (0..n_classes).map(|c| format!("k{c}")).collect();
    let rows: Vec<Vec<Option<Value>>> = (0..n)
        .map(|_| {
            let x = (rng.random::<f64>() >= 0.1)
                .then(|| Value::Num((rng.random::<f64>() * 20.0).round() / 2.0));
            let c = (rng.random::<f64>() >= 0.1)
                .then(|| Value::Cat(format!("v{}", rng.random_range(0..4))));
            let y = Value::Cat(labels[rng.random_range(0..n_classes)].clone());
            vec![x, c, Some(y)]
        })
        .collect();
    let ds = Dataset::new(
        vec![
            Column::new("x", ColumnKind::Numeric),
            Column::new("c", ColumnKind::Categorical),
            Column::new("y", ColumnKind::Categorical),
        ],
        rows,
        "y",
    )
    .expect("valid dataset");
    let pred: Vec<&str> = (0..n)
        .map(|r| {
            if rng.random::<f64>() < 0.6 {
                ds.class_labels()[ds.class_of(r)].as_str()
            } else {
                labels[rng.random_range(0..n_classes)].as_str()
            }
        })
        .collect();
    let p = PredictionSet::from_labels(&ds, &pred).expect("known labels");
    (ds, p)
}

pub fn cv_exact_cover(n: usize, k: usize, seed: u64) -> PropResult {
    let fold_of = kfold_partition(n, k, seed).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(fold_of.len(), n);
    prop_assert!(fold_of.iter().all(|&f| f < k));
    let folds = fold_members(&fold_of, k);
    let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
    let (lo, hi) = (*sizes.iter().min().unwrap(), *sizes.iter().max().unwrap());
    prop_assert!(hi - lo <= 1, "fold sizes {:?}", sizes);
    let mut all: Vec<usize> = folds.concat();
    all.sort_unstable();
    prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    prop_assert_eq!(kfold_partition(n, k, seed).unwrap(), fold_of);
    Ok(())
}

/// Predicts the true class for rows it was not trained on and a wrong class
/// for rows it saw, so any leakage shows up as an error.
pub struct Spy;

impl Learner for Spy {
    type Model = HashSet<usize>;

    fn name(&self) -> &str {
        "spy"
    }

    fn train(&self, _: &Dataset, rows: &[usize]) -> Result<HashSet<usize>, String> {
        Ok(rows.iter().copied().collect())
    }

    fn predict(&self, seen: &HashSet<usize>, data: &Dataset, row: usize) -> usize {
        let truth = data.class_of(row);
        if seen.contains(&row) {
            (truth + 1) % data.class_labels().len()
        } else {
            truth
        }
    }
}

pub fn cv_no_leakage(seed: u64, n: usize, k: usize) -> PropResult {
    let (ds, _) = random_case(seed, n, 3);
    if ds.class_labels().len() < 2 {
        return Ok(());
    }
    for exec in [Execution::Sequential, Execution::Parallel] {
        let p = cross_val_predict(&ds, &Spy, k, seed, exec)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(p.len(), n);
        for (r, e) in p.entries().iter().enumerate() {
            prop_assert_eq!(e.row, r);
            prop_assert_eq!(e.truth, ds.class_of(r));
        }
        prop_assert_eq!(
            p.errors(),
            0,
            "a row was predicted by a model trained on it"
        );
    }
    Ok(())
}

pub fn edp_aggregation(seed: u64, n: usize, n_classes: usize) -> PropResult {
    let (ds, p) = random_case(seed, n, n_classes);
    for pred in ["x", "c"] {
        let col = ds.predictor_index(pred).unwrap();
        if ds.rows().iter().all(|r| r[col].is_none()) {
            continue;
        }
        let edp =
            compute_edp(&ds, &p, pred, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mut restricted = ConfusionDistribution::new(p.n_classes());
        for (r, e) in p.entries().iter().enumerate() {
            if ds.cell(r, col).is_some() {
                restricted.add(OutcomeCode::of(e.truth, e.predicted), 1);
            }
        }
        prop_assert_eq!(edp.binned_total(), restricted);
        let binned: u64 = edp.bins.iter().map(|b| b.count()).sum();
        prop_assert_eq!(binned as usize + edp.missing, n);
        prop_assert_eq!(edp.global.total() as usize, n);
        let shares: f64 = edp.bins.iter().map(|b| b.share).sum();
        prop_assert!((shares - binned as f64 / n as f64).abs() < 1e-9);
        let z = error_zoom(&edp);
        let zoomed: u64 = z.bins.iter().map(|b| b.errors.total()).sum();
        prop_assert_eq!(zoomed, z.total_errors);
    }
    Ok(())
}

pub fn distribution_normalization(codes: &[(usize, usize)], n_classes: usize) -> PropResult {
    let d = ConfusionDistribution::from_codes(
        n_classes,
        codes.iter().map(|&(t, p)| OutcomeCode::of(t, p)),
    );
    prop_assert_eq!(d.total() as usize, codes.len());
    prop_assert_eq!(d.hits() + d.errors(), d.total());
    if codes.is_empty() {
        prop_assert_eq!(d.cm_string(), "CM={  }");
        return Ok(());
    }
    let sum: f64 = d.cells().iter().map(|&(c, _)| d.proportion(c)).sum();
    prop_assert!((sum - 1.0).abs() < 1e-12, "proportions sum to {}", sum);
    let s = d.cm_string();
    let body = s
        .strip_prefix("CM={ ")
        .and_then(|s| s.strip_suffix(" }"))
        .unwrap();
    let parts: Vec<&str> = body.split(',').collect();
    prop_assert_eq!(parts.len(), d.cells().len());
    for (part, (code, _)) in parts.iter().zip(d.cells()) {
        let (c, prop) = part.split_once('/').unwrap();
        prop_assert_eq!(OutcomeCode::parse(c, n_classes).unwrap(), code);
        let shown: f64 = prop.parse().unwrap();
        prop_assert!((shown - d.proportion(code)).abs() <= 0.0005 + 1e-12);
    }
    Ok(())
}

pub fn rendering_determinism(seed: u64, n: usize) -> PropResult {
    let (ds, p) = random_case(seed, n, 3);
    let preds = vec!["x".to_string(), "c".to_string()];
    let a = compute_edps(&ds, &p, &preds, &[], Execution::Parallel);
    let b = compute_edps(&ds, &p, &preds, &[], Execution::Sequential);
    prop_assert_eq!(a.len(), b.len());
    let opts = SvgOptions::default();
    for (x, y) in a.into_iter().zip(b) {
        match (x, y) {
            (Ok(x), Ok(y)) => {
                prop_assert_eq!(render_edp_svg(&x, &opts), render_edp_svg(&y, &opts));
                prop_assert_eq!(
                    render_zoom_svg(&error_zoom(&x), &opts),
                    render_zoom_svg(&error_zoom(&y), &opts)
                );
                let json = x.to_export().to_json();
                prop_assert_eq!(&json, &y.to_export().to_json());
                prop_assert_eq!(EdpExport::from_json(&json).unwrap(), x.to_export());
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "execution modes disagree"),
        }
    }
    Ok(())
}

pub fn mining_determinism(seed: u64) -> PropResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_rows = rng.random_range(1..60);
    let n_preds = rng.random_range(1..5);
    let t = random_table(&mut rng, n_rows, n_preds, 3, 3, 0.1).unwrap();
    let seq = MiningConfig {
        minsup: [0.05, 0.1, 0.3][rng.random_range(0..3)],
        alpha: [0.05, 0.5, 1.0][rng.random_range(0..3)],
        max_len: rng.random_range(1..5),
        improvement: rng.random::<bool>(),
        exec: Execution::Sequential,
        ..Default::default()
    };
    let par = MiningConfig {
        exec: Execution::Parallel,
        ..seq
    };
    let a = mine_rules(&t, &seq).unwrap();
    prop_assert_eq!(&a, &mine_rules(&t, &par).unwrap());
    prop_assert_eq!(&a, &mine_rules(&t, &seq).unwrap());
    // emitted-rule contract, re-checked through the query path
    for r in &a {
        prop_assert!(r.support >= seq.minsup && r.p_value <= seq.alpha);
        let q = query_subgroup(&t, &r.antecedent).unwrap();
        let q = q.found().expect("rule covers rows");
        prop_assert_eq!(q.size, r.size);
        prop_assert_eq!(&q.distribution, &r.distribution);
        prop_assert!((q.test.p_value - r.p_value).abs() <= 1e-15);
        if seq.improvement {
            let len = r.antecedent.len();
            for mask in 1..(1u32 << len) - 1 {
                let sub: Vec<_> = (0..len)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| r.antecedent[i].clone())
                    .collect();
                let s = query_subgroup(&t, &sub).unwrap();
                prop_assert!(r.p_value < s.found().unwrap().test.p_value);
            }
        }
    }
    Ok(())
}

pub fn outcome_pairs(max_classes: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2..=max_classes).prop_flat_map(|k| (Just(k), prop::collection::vec((0..k, 0..k), 0..200)))
}

pub mod oracle;

/// Census-style table where `X = {education=Bachelors, relationship=Not-in-family,
/// occupation=Prof-specialty, workclass=Private}` holds an error-rich core
/// group. Rows matching all of X but the workclass item form the parent's
/// extra coverage; with `parent_wins` those rows are as error-rich as the
/// core, so the 3-item parent gets the lower p-value.
pub fn improvement_fixture(parent_wins: bool) -> devperf::rules::MiningTable {
    use devperf::rules::MiningTable;

    let predictors = ["education", "relationship", "occupation", "workclass"];
    let inside = ["Bachelors", "Not-in-family", "Prof-specialty", "Private"];
    let outside = ["HS-grad", "Husband", "Sales", "Self-emp"];
    let background = |i: usize| match i {
        i if i % 10 == 0 => OutcomeCode::of(1, 0),
        i if i % 25 == 1 => OutcomeCode::of(0, 1),
        _ => OutcomeCode::Hit,
    };
    let error_rich = |i: usize| {
        if i % 5 == 4 {
            OutcomeCode::Hit
        } else {
            OutcomeCode::of(1, 0)
        }
    };

    let mut rows: Vec<Vec<Option<String>>> = Vec::new();
    let mut out = Vec::new();
    let mut push = |mask: [bool; 4], count: usize, f: &dyn Fn(usize) -> OutcomeCode| {
        for i in 0..count {
            rows.push(
                (0..4)
                    .map(|p| Some(if mask[p] { inside[p] } else { outside[p] }.to_string()))
                    .collect(),
            );
            out.push(f(i));
        }
    };
    push([true; 4], 50, &error_rich);
    if parent_wins {
        push([true, true, true, false], 50, &error_rich);
    } else {
        push([true, true, true, false], 50, &background);
    }
    push([false, true, true, true], 400, &background);
    push([true, false, true, true], 400, &background);
    push([true, true, false, true], 400, &background);
    push([false; 4], 2000, &background);
    MiningTable::from_records(
        predictors.iter().map(|s| s.to_string()).collect(),
        &rows,
        &out,
        2,
    )
    .unwrap()
}
