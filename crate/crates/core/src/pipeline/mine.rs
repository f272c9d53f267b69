use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arm::{apriori, generate_rules, rank_rules, ArmError, Rule, Threshold, Thresholds};
use crate::encode::TransactionSet;

#[derive(Debug, Error, PartialEq)]
pub enum MineError {
    #[error("cluster {cluster}: every item is below the sparse floor {floor}")]
    Degenerate { cluster: usize, floor: f64 },
    #[error("cluster {cluster}: {source}")]
    Arm {
        cluster: usize,
        #[source]
        source: ArmError,
    },
}

/// Transactions restricted to items that reach the floor, with the
/// original id of every kept item.
#[derive(Debug, Clone)]
pub struct SparseFiltered {
    pub transactions: TransactionSet,
    pub kept: Vec<usize>,
}

/// Drops items whose support within `transactions` is below `floor`.
///
/// Returns `None` when nothing survives.
pub fn filter_sparse(transactions: &TransactionSet, floor: f64) -> Option<SparseFiltered> {
    let cut = Threshold::new(floor.max(0.0)).ok()?;
    let n = transactions.n_rows() as u128;
    let kept: Vec<usize> = (0..transactions.n_items())
        .filter(|&i| cut.admits(transactions.item_count(i) as u128, n))
        .collect();
    if kept.is_empty() {
        return None;
    }
    Some(SparseFiltered {
        transactions: transactions.select_items(&kept),
        kept,
    })
}

/// A mined rule with item names resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleRecord {
    pub cluster: usize,
    /// Antecedent item names joined by `" + "`.
    pub antecedent: String,
    pub consequent: String,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
    #[serde(skip)]
    pub antecedent_items: Vec<String>,
    #[serde(skip)]
    pub consequent_items: Vec<String>,
}

impl RuleRecord {
    pub fn new(cluster: usize, rule: &Rule<f64>, names: &[String]) -> Self {
        let a: Vec<String> = rule.antecedent_names(names).into_iter().map(str::to_string).collect();
        let c: Vec<String> = rule.consequent_names(names).into_iter().map(str::to_string).collect();
        RuleRecord {
            cluster,
            antecedent: a.join(" + "),
            consequent: c.join(" + "),
            support: rule.support,
            confidence: rule.confidence,
            lift: rule.lift,
            antecedent_items: a,
            consequent_items: c,
        }
    }
}

pub const RULE_CSV_HEADER: [&str; 6] = ["cluster", "antecedent", "consequent", "support", "confidence", "lift"];

pub fn write_rules_csv<W: std::io::Write>(rules: &[RuleRecord], writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RULE_CSV_HEADER)?;
    for r in rules {
        w.write_record([
            r.cluster.to_string(),
            r.antecedent.clone(),
            r.consequent.clone(),
            r.support.to_string(),
            r.confidence.to_string(),
            r.lift.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterMining {
    pub cluster: usize,
    pub size: usize,
    pub thresholds: Thresholds,
    pub sparse_floor: f64,
    pub items: usize,
    pub items_kept: usize,
    pub frequent_itemsets: usize,
    /// All rules, strongest first.
    #[serde(skip)]
    pub rules: Vec<RuleRecord>,
}

/// Sparse filter, Apriori, rule generation and ranking on one cluster's
/// transactions.
pub fn mine_cluster(
    cluster: usize,
    transactions: &TransactionSet,
    thresholds: &Thresholds,
    floor: f64,
) -> Result<ClusterMining, MineError> {
    let arm = |source| MineError::Arm { cluster, source };
    if transactions.n_rows() == 0 {
        return Err(arm(ArmError::NoTransactions));
    }
    let filtered = filter_sparse(transactions, floor).ok_or(MineError::Degenerate { cluster, floor })?;
    let ts = &filtered.transactions;
    let frequent = apriori(ts, thresholds.min_support, thresholds.max_len).map_err(arm)?;
    let rules: Vec<Rule<f64>> = generate_rules(&frequent, ts, thresholds).map_err(arm)?;
    let ranked = rank_rules(rules, ts.items(), usize::MAX);
    Ok(ClusterMining {
        cluster,
        size: transactions.n_rows(),
        thresholds: *thresholds,
        sparse_floor: floor,
        items: transactions.n_items(),
        items_kept: ts.n_items(),
        frequent_itemsets: frequent.len(),
        rules: ranked.iter().map(|r| RuleRecord::new(cluster, r, ts.items())).collect(),
    })
}

/// Mines every cluster, possibly in parallel; output is in cluster order.
pub fn mine_clusters(
    transactions: &TransactionSet,
    members: &[Vec<usize>],
    thresholds: impl Fn(usize) -> (Thresholds, f64) + Sync,
) -> Result<Vec<ClusterMining>, MineError> {
    members
        .par_iter()
        .enumerate()
        .map(|(c, rows)| {
            let (t, floor) = thresholds(c);
            mine_cluster(c, &transactions.select_rows(rows), &t, floor)
        })
        .collect()
}
