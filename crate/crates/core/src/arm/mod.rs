//! Apriori frequent-itemset mining and association rules scored by
//! support, confidence and lift.

mod apriori;
mod rules;
mod threshold;

use thiserror::Error;

pub use apriori::{apriori, support, Itemset};
pub use rules::{compare_rules, generate_rules, rank_rules, Rule, RuleCounts};
pub use threshold::{Threshold, Thresholds};

#[derive(Debug, Error, PartialEq)]
pub enum ArmError {
    #[error("transaction set is empty")]
    NoTransactions,
    #[error("item id {0} is out of range")]
    UnknownItem(usize),
    #[error("{0}")]
    Threshold(String),
}
