use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::miner::DistributionRule;
use super::table::Item;

/// Two-line text form of a rule:
///
/// ```text
/// Ant sup = 0.01078  pvalue = 0.0010000156478771152000
/// CM={ 0/0.880,12/0.006,21/0.114 }  <--  education=Bachelors & workclass=Private
/// ```
pub fn format_rule(rule: &DistributionRule) -> String {
    let conds: Vec<String> = rule.antecedent.iter().map(Item::to_string).collect();
    format!(
        "Ant sup = {:.5}  pvalue = {:.22}\n{}  <--  {}",
        rule.support,
        rule.p_value,
        rule.distribution.cm_string(),
        conds.join(" & ")
    )
}

/// All rules, separated by blank lines.
pub fn format_rules(rules: &[DistributionRule]) -> String {
    let mut out = String::new();
    for (i, r) in rules.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "{}", format_rule(r));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub antecedent: Vec<Item>,
    pub support: f64,
    pub size: u64,
    pub pvalue: f64,
    pub chi2: f64,
    pub df: usize,
    /// Proportion per outcome code string.
    pub cm: BTreeMap<String, f64>,
}

impl From<&DistributionRule> for RuleRecord {
    fn from(r: &DistributionRule) -> Self {
        let d = &r.distribution;
        RuleRecord {
            antecedent: r.antecedent.clone(),
            support: r.support,
            size: r.size,
            pvalue: r.p_value,
            chi2: r.chi2,
            df: r.df,
            cm: d
                .cells()
                .into_iter()
                .map(|(c, _)| (c.display(d.n_classes()), d.proportion(c)))
                .collect(),
        }
    }
}

pub fn rules_to_json(rules: &[DistributionRule]) -> String {
    let records: Vec<RuleRecord> = rules.iter().map(RuleRecord::from).collect();
    serde_json::to_string_pretty(&records).expect("rules serialize")
}
