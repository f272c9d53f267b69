use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use super::apriori::Itemset;
use super::threshold::Thresholds;
use super::ArmError;
use crate::encode::TransactionSet;
use crate::scalar::Measure;

/// Raw counts a rule's metrics are derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RuleCounts {
    pub transactions: u64,
    /// Rows holding antecedent and consequent together.
    pub both: u64,
    pub antecedent: u64,
    pub consequent: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rule<M> {
    pub antecedent: Vec<usize>,
    pub consequent: Vec<usize>,
    pub counts: RuleCounts,
    pub support: M,
    pub confidence: M,
    pub lift: M,
}

impl<M: Measure> Rule<M> {
    /// Support `S(A ∪ B)`, confidence `S(A ∪ B) / S(A)` and lift
    /// `confidence / S(B)` evaluated in `M`.
    pub fn from_counts(antecedent: Vec<usize>, consequent: Vec<usize>, counts: RuleCounts) -> Self {
        let n = counts.transactions;
        let support = M::from_counts(counts.both, n);
        let confidence = support.div(&M::from_counts(counts.antecedent, n));
        let lift = confidence.div(&M::from_counts(counts.consequent, n));
        Rule {
            antecedent,
            consequent,
            counts,
            support,
            confidence,
            lift,
        }
    }

    pub fn len(&self) -> usize {
        self.antecedent.len() + self.consequent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every item the rule mentions, sorted.
    pub fn items(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.antecedent.iter().chain(&self.consequent).copied().collect();
        all.sort_unstable();
        all
    }

    pub fn antecedent_names<'a>(&self, names: &'a [String]) -> Vec<&'a str> {
        self.antecedent.iter().map(|&i| names[i].as_str()).collect()
    }

    pub fn consequent_names<'a>(&self, names: &'a [String]) -> Vec<&'a str> {
        self.consequent.iter().map(|&i| names[i].as_str()).collect()
    }

    /// Same rule with metrics re-expressed in another measure.
    pub fn convert<N: Measure>(&self) -> Rule<N> {
        Rule::from_counts(self.antecedent.clone(), self.consequent.clone(), self.counts)
    }
}

/// Emits `A → F \ A` for every frequent itemset `F` with
/// `2 <= |F| <= max_len` and every non-empty proper subset `A`, keeping
/// rules whose support, confidence and lift reach the thresholds.
///
/// Thresholds are checked on integer counts. Subset counts come from
/// `frequent`, falling back to `transactions` for subsets it lacks.
pub fn generate_rules<M: Measure>(
    frequent: &[Itemset],
    transactions: &TransactionSet,
    thresholds: &Thresholds,
) -> Result<Vec<Rule<M>>, ArmError> {
    let cut = thresholds.cutoffs()?;
    let n = transactions.n_rows();
    if n == 0 {
        return Err(ArmError::NoTransactions);
    }
    let counts: HashMap<&[usize], usize> = frequent.iter().map(|f| (f.items.as_slice(), f.count)).collect();
    let count_of = |items: &[usize]| counts.get(items).copied().unwrap_or_else(|| transactions.count(items));

    let mut rules = Vec::new();
    for f in frequent
        .iter()
        .filter(|f| f.len() >= 2 && f.len() <= thresholds.max_len)
    {
        if !cut.support.admits(f.count as u128, n as u128) {
            continue;
        }
        let m = f.len();
        for mask in 1..(1u32 << m) - 1 {
            let (ante, cons): (Vec<usize>, Vec<usize>) = {
                let mut a = Vec::new();
                let mut c = Vec::new();
                for (bit, &item) in f.items.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        a.push(item);
                    } else {
                        c.push(item);
                    }
                }
                (a, c)
            };
            let n_a = count_of(&ante);
            let n_c = count_of(&cons);
            let both = f.count as u128;
            if !cut.confidence.admits(both, n_a as u128) {
                continue;
            }
            if !cut.lift.admits(both * n as u128, n_a as u128 * n_c as u128) {
                continue;
            }
            let rc = RuleCounts {
                transactions: n as u64,
                both: f.count as u64,
                antecedent: n_a as u64,
                consequent: n_c as u64,
            };
            rules.push(Rule::from_counts(ante, cons, rc));
        }
    }
    Ok(rules)
}

/// Strongest-first order: lift, then confidence, then support (all
/// descending), then antecedent and consequent item names.
pub fn compare_rules<M: Measure>(a: &Rule<M>, b: &Rule<M>, names: &[String]) -> Ordering {
    let desc = |x: &M, y: &M| y.partial_cmp(x).unwrap_or(Ordering::Equal);
    desc(&a.lift, &b.lift)
        .then_with(|| desc(&a.confidence, &b.confidence))
        .then_with(|| desc(&a.support, &b.support))
        .then_with(|| a.antecedent_names(names).cmp(&b.antecedent_names(names)))
        .then_with(|| a.consequent_names(names).cmp(&b.consequent_names(names)))
}

/// Sorts by [`compare_rules`] and keeps the first `top_n`.
pub fn rank_rules<M: Measure>(mut rules: Vec<Rule<M>>, names: &[String], top_n: usize) -> Vec<Rule<M>> {
    rules.sort_by(|a, b| compare_rules(a, b, names));
    rules.truncate(top_n);
    rules
}
