//! Exhaustive rule enumeration, used as the reference for the levelwise miner.

use std::collections::BTreeMap;

use devperf::rules::{Item, MiningConfig, MiningTable};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRule {
    pub antecedent: Vec<Item>,
    pub size: u64,
    pub p_value: f64,
}

fn p_value(table: &MiningTable, rows: &[usize]) -> f64 {
    let global = table.global();
    let n = table.n_rows() as f64;
    let cells = global.cells();
    let size = rows.len() as f64;
    let stat: f64 = cells
        .iter()
        .map(|&(code, k)| {
            let o = rows
                .iter()
                .filter(|&&r| table.row_outcome(r) == code)
                .count() as f64;
            let e = size * (k as f64 / n);
            (o - e) * (o - e) / e
        })
        .sum();
    let df = cells.len() - 1;
    if df == 0 || stat <= 0.0 {
        1.0
    } else {
        ChiSquared::new(df as f64).unwrap().sf(stat)
    }
}

fn covered(table: &MiningTable, ant: &[Item]) -> Vec<usize> {
    (0..table.n_rows())
        .filter(|&r| {
            let items = table.row_items(r);
            ant.iter().all(|i| items.contains(i))
        })
        .collect()
}

/// Every antecedent with at most one item per predictor and at most
/// `max_len` items, filtered exactly as the miner's contract states.
pub fn brute_force(table: &MiningTable, cfg: &MiningConfig) -> Vec<OracleRule> {
    let mut by_pred: BTreeMap<usize, Vec<Item>> = BTreeMap::new();
    for item in table.vocabulary() {
        let p = table
            .predictors()
            .iter()
            .position(|x| *x == item.predictor)
            .unwrap();
        by_pred.entry(p).or_default().push(item);
    }
    let groups: Vec<Vec<Item>> = by_pred.into_values().collect();

    let mut all: Vec<Vec<Item>> = vec![Vec::new()];
    for g in &groups {
        let mut next = Vec::new();
        for a in &all {
            next.push(a.clone());
            for it in g {
                let mut b = a.clone();
                b.push(it.clone());
                next.push(b);
            }
        }
        all = next;
    }

    let n = table.n_rows() as f64;
    let mut stats: BTreeMap<Vec<Item>, (u64, f64)> = BTreeMap::new();
    for ant in all
        .into_iter()
        .filter(|a| !a.is_empty() && a.len() <= cfg.max_len)
    {
        let rows = covered(table, &ant);
        if rows.is_empty() || (rows.len() as f64 / n) < cfg.minsup {
            continue;
        }
        let p = p_value(table, &rows);
        stats.insert(ant, (rows.len() as u64, p));
    }

    let mut out = Vec::new();
    for (ant, &(size, p)) in &stats {
        if p > cfg.alpha {
            continue;
        }
        if cfg.improvement {
            let len = ant.len();
            let improves = (1u32..(1 << len) - 1).all(|mask| {
                let sub: Vec<Item> = (0..len)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| ant[i].clone())
                    .collect();
                p < stats[&sub].1
            });
            if !improves {
                continue;
            }
        }
        out.push(OracleRule {
            antecedent: ant.clone(),
            size,
            p_value: p,
        });
    }
    out
}
