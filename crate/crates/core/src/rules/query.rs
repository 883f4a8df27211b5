use super::chi2::{chi2_gof, Chi2Result};
use super::table::{Item, ItemId, MiningTable};
use crate::edp::ConfusionDistribution;
use crate::error::{Error, Result};

/// A named subgroup's coverage and its test against the global distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgroup {
    pub antecedent: Vec<Item>,
    pub size: u64,
    pub support: f64,
    pub distribution: ConfusionDistribution,
    pub test: Chi2Result,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubgroupResult {
    /// No row satisfies every condition.
    Empty {
        antecedent: Vec<Item>,
    },
    Found(Subgroup),
}

impl SubgroupResult {
    pub fn found(&self) -> Option<&Subgroup> {
        match self {
            SubgroupResult::Found(s) => Some(s),
            SubgroupResult::Empty { .. } => None,
        }
    }
}

/// Splits `a=1 & b = x` into `(name, bin)` pairs. Whitespace around names,
/// values and `&` is ignored; an empty string is the empty antecedent.
pub fn parse_query(text: &str) -> Result<Vec<(String, String)>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split('&')
        .map(|cond| {
            let (name, bin) = cond
                .split_once('=')
                .ok_or_else(|| Error::Query(format!("condition `{}` lacks `=`", cond.trim())))?;
            let (name, bin) = (name.trim(), bin.trim());
            if name.is_empty() || bin.is_empty() {
                return Err(Error::Query(format!(
                    "incomplete condition `{}`",
                    cond.trim()
                )));
            }
            Ok((name.to_string(), bin.to_string()))
        })
        .collect()
}

/// Coverage, distribution and chi-squared test of exactly this antecedent,
/// independent of any support or significance threshold.
pub fn query_subgroup(table: &MiningTable, antecedent: &[Item]) -> Result<SubgroupResult> {
    let mut ids: Vec<ItemId> = antecedent
        .iter()
        .map(|i| table.resolve(&i.predictor, &i.bin))
        .collect::<Result<_>>()?;
    ids.sort_unstable();
    ids.dedup();
    let resolved: Vec<Item> = ids.iter().map(|&id| table.item(id)).collect();

    let mut counts = vec![0u64; table.codes().len()];
    for (r, rec) in table.records().iter().enumerate() {
        if ids.iter().all(|id| rec.binary_search(id).is_ok()) {
            counts[table.outcome_index(r)] += 1;
        }
    }
    let size: u64 = counts.iter().sum();
    if size == 0 {
        return Ok(SubgroupResult::Empty {
            antecedent: resolved,
        });
    }
    let n = table.n_rows() as f64;
    let global = table.global();
    let reference: Vec<f64> = table
        .codes()
        .iter()
        .map(|&c| global.count(c) as f64 / n)
        .collect();
    let test = chi2_gof(&counts, &reference, None)?;
    let mut distribution = ConfusionDistribution::new(table.n_classes());
    for (&c, &k) in table.codes().iter().zip(&counts) {
        distribution.add(c, k);
    }
    Ok(SubgroupResult::Found(Subgroup {
        antecedent: resolved,
        size,
        support: size as f64 / n,
        distribution,
        test,
    }))
}

/// [`parse_query`] followed by [`query_subgroup`].
pub fn query_text(table: &MiningTable, text: &str) -> Result<SubgroupResult> {
    let items: Vec<Item> = parse_query(text)?
        .into_iter()
        .map(|(p, b)| Item::new(p, b))
        .collect();
    query_subgroup(table, &items)
}
