//! Distribution rules: subgroups of the discretized data whose confusion
//! distribution departs from the global one under a chi-squared goodness of
//! fit test.

mod chi2;
mod format;
mod miner;
mod query;
mod table;

pub use self::chi2::{chi2_gof, chi2_sf, chi2_vs, gamma_q, ln_gamma, Chi2Result};
pub use self::format::{format_rule, format_rules, rules_to_json, RuleRecord};
pub use self::miner::{
    mine_rules, mine_rules_traced, sort_rules, DistributionRule, EvaluatedItemset, MiningConfig,
    MiningRun,
};
pub use self::query::{parse_query, query_subgroup, query_text, Subgroup, SubgroupResult};
pub use self::table::{build_mining_table, Item, MiningTable};
