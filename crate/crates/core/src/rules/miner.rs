//! Levelwise distribution-rule mining.
//!
//! Candidates of size k+1 are joined from frequent k-itemsets sharing a
//! (k-1)-prefix, kept only when every k-subset is frequent, and counted by
//! intersecting row-id lists. Each frequent itemset's confusion distribution
//! is tested against the table's global distribution.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::chi2::{chi2_gof, Chi2Result};
use super::table::{Item, ItemId, MiningTable};
use crate::edp::ConfusionDistribution;
use crate::error::{Error, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiningConfig {
    /// Minimum fraction of rows an antecedent must cover.
    pub minsup: f64,
    pub alpha: f64,
    pub max_len: usize,
    /// Pool cells with expected count below this before the chi-squared test.
    pub pool_min_expected: Option<f64>,
    /// Emit a rule only when its p-value is strictly below that of every
    /// proper sub-antecedent.
    pub improvement: bool,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            minsup: 0.01,
            alpha: 0.05,
            max_len: 4,
            pool_min_expected: None,
            improvement: true,
            exec: Execution::default(),
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.minsup > 0.0 && self.minsup <= 1.0) {
            return bad(format!("minsup must be in (0, 1], got {}", self.minsup));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must be in (0, 1], got {}", self.alpha));
        }
        if self.max_len == 0 {
            return bad("max_len must be at least 1".into());
        }
        if let Some(t) = self.pool_min_expected {
            if !(t.is_finite() && t >= 0.0) {
                return bad(format!("pool_min_expected must be >= 0, got {t}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionRule {
    pub antecedent: Vec<Item>,
    /// `size` over all table rows.
    pub support: f64,
    pub size: u64,
    pub distribution: ConfusionDistribution,
    pub p_value: f64,
    pub chi2: f64,
    pub df: usize,
}

/// An itemset whose support was counted during mining.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluatedItemset {
    pub antecedent: Vec<Item>,
    pub size: u64,
    pub frequent: bool,
}

#[derive(Debug, Clone)]
pub struct MiningRun {
    pub rules: Vec<DistributionRule>,
    /// Every counted candidate, level by level.
    pub evaluated: Vec<EvaluatedItemset>,
}

struct Node {
    items: Vec<ItemId>,
    tids: Vec<u32>,
}

struct Stats {
    items: Vec<ItemId>,
    size: u64,
    counts: Vec<u64>,
    test: Chi2Result,
}

struct Ctx<'a> {
    table: &'a MiningTable,
    config: &'a MiningConfig,
    reference: Vec<f64>,
    n: usize,
}

impl Ctx<'_> {
    fn frequent(&self, size: usize) -> bool {
        size > 0 && size as f64 / self.n as f64 >= self.config.minsup
    }

    fn evaluate(&self, node: &Node) -> Result<Stats> {
        let mut counts = vec![0u64; self.reference.len()];
        for &t in &node.tids {
            counts[self.table.outcome_index(t as usize)] += 1;
        }
        let test = chi2_gof(&counts, &self.reference, self.config.pool_min_expected)?;
        Ok(Stats {
            items: node.items.clone(),
            size: node.tids.len() as u64,
            counts,
            test,
        })
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Result of counting one candidate: the node (kept only if frequent), its
/// stats, and its size for the trace.
type Counted = (Vec<ItemId>, usize, Option<(Node, Stats)>);

pub fn mine_rules(table: &MiningTable, config: &MiningConfig) -> Result<Vec<DistributionRule>> {
    run(table, config, false).map(|r| r.rules)
}

/// Like [`mine_rules`], also returning every candidate whose support was
/// counted.
pub fn mine_rules_traced(table: &MiningTable, config: &MiningConfig) -> Result<MiningRun> {
    run(table, config, true)
}

fn run(table: &MiningTable, config: &MiningConfig, trace: bool) -> Result<MiningRun> {
    config.validate()?;
    let n = table.n_rows();
    if n == 0 {
        return Err(Error::InvalidDataset("mining table has no rows".into()));
    }
    let global = table.global();
    let reference: Vec<f64> = table
        .codes()
        .iter()
        .map(|&c| global.count(c) as f64 / n as f64)
        .collect();
    let ctx = Ctx {
        table,
        config,
        reference,
        n,
    };

    let mut tids: Vec<Vec<u32>> = vec![Vec::new(); table.n_items()];
    for (r, rec) in table.records().iter().enumerate() {
        for &id in rec {
            tids[id as usize].push(r as u32);
        }
    }
    let singles: Vec<Node> = tids
        .into_iter()
        .enumerate()
        .map(|(id, t)| Node {
            items: vec![id as ItemId],
            tids: t,
        })
        .collect();
    let counted: Vec<Result<Counted>> = config.exec.map_range(singles.len(), |i| {
        let node = &singles[i];
        let size = node.tids.len();
        if !ctx.frequent(size) {
            return Ok((node.items.clone(), size, None));
        }
        let stats = ctx.evaluate(node)?;
        let node = Node {
            items: node.items.clone(),
            tids: node.tids.clone(),
        };
        Ok((stats.items.clone(), size, Some((node, stats))))
    });
    drop(singles);

    let mut evaluated = Vec::new();
    let mut all_stats: Vec<Stats> = Vec::new();
    let mut level = collect_level(counted, trace, &mut evaluated, &mut all_stats, table)?;

    let mut k = 1;
    while k < config.max_len && level.len() > 1 {
        let frequent_set: HashSet<&[ItemId]> = level.iter().map(|n| n.items.as_slice()).collect();
        let groups = prefix_groups(&level, k);
        let per_group: Vec<Vec<Result<Counted>>> = config.exec.map(&groups, |&(lo, hi)| {
            let mut out = Vec::new();
            for i in lo..hi {
                for j in i + 1..hi {
                    let (a, b) = (&level[i], &level[j]);
                    let (la, lb) = (a.items[k - 1], b.items[k - 1]);
                    if table.item_predictor(la) == table.item_predictor(lb) {
                        continue;
                    }
                    let mut items = a.items.clone();
                    items.push(lb);
                    if !all_subsets_frequent(&items, &frequent_set) {
                        continue;
                    }
                    let tids = intersect(&a.tids, &b.tids);
                    let size = tids.len();
                    if !ctx.frequent(size) {
                        out.push(Ok((items, size, None)));
                        continue;
                    }
                    let node = Node { items, tids };
                    out.push(
                        ctx.evaluate(&node)
                            .map(|s| (s.items.clone(), size, Some((node, s)))),
                    );
                }
            }
            out
        });
        drop(frequent_set);
        let counted: Vec<Result<Counted>> = per_group.into_iter().flatten().collect();
        level = collect_level(counted, trace, &mut evaluated, &mut all_stats, table)?;
        k += 1;
    }
    drop(level);

    let rules = select_rules(table, config, &all_stats);
    Ok(MiningRun { rules, evaluated })
}

fn collect_level(
    counted: Vec<Result<Counted>>,
    trace: bool,
    evaluated: &mut Vec<EvaluatedItemset>,
    all_stats: &mut Vec<Stats>,
    table: &MiningTable,
) -> Result<Vec<Node>> {
    let mut next = Vec::new();
    for c in counted {
        let (items, size, kept) = c?;
        if trace {
            evaluated.push(EvaluatedItemset {
                antecedent: items.iter().map(|&id| table.item(id)).collect(),
                size: size as u64,
                frequent: kept.is_some(),
            });
        }
        if let Some((node, stats)) = kept {
            next.push(node);
            all_stats.push(stats);
        }
    }
    Ok(next)
}

/// Half-open index ranges of consecutive nodes sharing their first `k - 1`
/// items. Nodes are in lexicographic order, so each range is contiguous.
fn prefix_groups(level: &[Node], k: usize) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut lo = 0;
    for i in 1..=level.len() {
        if i == level.len() || level[i].items[..k - 1] != level[lo].items[..k - 1] {
            if i - lo > 1 {
                groups.push((lo, i));
            }
            lo = i;
        }
    }
    groups
}

/// The two subsets dropping one of the last two items are the join parents;
/// the remaining ones are checked here.
fn all_subsets_frequent(items: &[ItemId], frequent: &HashSet<&[ItemId]>) -> bool {
    let len = items.len();
    let mut sub = Vec::with_capacity(len - 1);
    (0..len.saturating_sub(2)).all(|skip| {
        sub.clear();
        sub.extend(
            items
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &x)| x),
        );
        frequent.contains(sub.as_slice())
    })
}

fn select_rules(
    table: &MiningTable,
    config: &MiningConfig,
    stats: &[Stats],
) -> Vec<DistributionRule> {
    let p_of: HashMap<&[ItemId], f64> = stats
        .iter()
        .map(|s| (s.items.as_slice(), s.test.p_value))
        .collect();
    let improves = |s: &Stats| {
        let len = s.items.len();
        let full = (1u32 << len) - 1;
        let mut sub = Vec::with_capacity(len);
        (1..full).all(|mask| {
            sub.clear();
            sub.extend(
                (0..len)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| s.items[i]),
            );
            // every subset of a frequent itemset was itself evaluated
            p_of.get(sub.as_slice())
                .is_some_and(|&p| s.test.p_value < p)
        })
    };
    let n = table.n_rows() as f64;
    let mut rules: Vec<DistributionRule> = stats
        .iter()
        .filter(|s| s.test.p_value <= config.alpha)
        .filter(|s| !config.improvement || improves(s))
        .map(|s| {
            let mut distribution = ConfusionDistribution::new(table.n_classes());
            for (&c, &k) in table.codes().iter().zip(&s.counts) {
                distribution.add(c, k);
            }
            DistributionRule {
                antecedent: s.items.iter().map(|&id| table.item(id)).collect(),
                support: s.size as f64 / n,
                size: s.size,
                distribution,
                p_value: s.test.p_value,
                chi2: s.test.statistic,
                df: s.test.df,
            }
        })
        .collect();
    sort_rules(&mut rules);
    rules
}

/// Ascending p-value, then antecedent length, then the antecedent's text.
pub fn sort_rules(rules: &mut [DistributionRule]) {
    rules.sort_by_cached_key(|r| {
        (
            OrdF64(r.p_value),
            r.antecedent.len(),
            r.antecedent.iter().map(Item::to_string).collect::<Vec<_>>(),
        )
    });
}

#[derive(PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
