use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::threshold::Threshold;
use super::ArmError;
use crate::bitset::BitSet;
use crate::encode::TransactionSet;
use crate::scalar::Measure;

/// Item ids (strictly increasing) and the number of rows containing all
/// of them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Itemset {
    pub items: Vec<usize>,
    pub count: usize,
}

impl Itemset {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn support<M: Measure>(&self, n: usize) -> M {
        M::from_counts(self.count as u64, n as u64)
    }
}

/// Fraction of transactions containing every item of `itemset`.
pub fn support<M: Measure>(itemset: &[usize], transactions: &TransactionSet) -> Result<M, ArmError> {
    if transactions.n_rows() == 0 {
        return Err(ArmError::NoTransactions);
    }
    if let Some(&bad) = itemset.iter().find(|&&i| i >= transactions.n_items()) {
        return Err(ArmError::UnknownItem(bad));
    }
    Ok(M::from_counts(
        transactions.count(itemset) as u64,
        transactions.n_rows() as u64,
    ))
}

/// Level-wise Apriori: every itemset of at most `max_len` items whose
/// support reaches `min_support`.
///
/// A k-candidate joins two frequent (k-1)-itemsets sharing their first
/// k-2 items and is counted only when all its (k-1)-subsets are frequent.
/// Output is ordered by size, then by item ids.
pub fn apriori(transactions: &TransactionSet, min_support: f64, max_len: usize) -> Result<Vec<Itemset>, ArmError> {
    if transactions.n_rows() == 0 {
        return Err(ArmError::NoTransactions);
    }
    if !(min_support > 0.0 && min_support <= 1.0) {
        return Err(ArmError::Threshold(format!(
            "min_support must be in (0, 1], got {min_support}"
        )));
    }
    if max_len == 0 {
        return Ok(Vec::new());
    }
    let min_count = Threshold::new(min_support)?.min_count(transactions.n_rows());

    let mut level: Vec<(Vec<usize>, BitSet)> = (0..transactions.n_items())
        .filter(|&i| transactions.item_count(i) >= min_count)
        .map(|i| (vec![i], transactions.item_rows(i).clone()))
        .collect();
    let mut out: Vec<Itemset> = level
        .iter()
        .map(|(items, rows)| Itemset {
            items: items.clone(),
            count: rows.count_ones(),
        })
        .collect();

    for _size in 2..=max_len {
        if level.len() < 2 {
            break;
        }
        let known: HashSet<&[usize]> = level.iter().map(|(items, _)| items.as_slice()).collect();
        let next: Vec<(Vec<usize>, BitSet)> = (0..level.len())
            .into_par_iter()
            .flat_map_iter(|a| {
                let (prefix_a, rows_a) = (&level[a].0, &level[a].1);
                let head = &prefix_a[..prefix_a.len() - 1];
                let known = &known;
                level[a + 1..]
                    .iter()
                    .take_while(move |(b, _)| &b[..b.len() - 1] == head)
                    .filter_map(move |(b, _)| {
                        let last = *b.last().expect("non-empty");
                        let mut cand = prefix_a.clone();
                        cand.push(last);
                        // the two subsets dropping either of the last items are the parents
                        let closed = (0..cand.len() - 2).all(|skip| {
                            let sub: Vec<usize> = cand
                                .iter()
                                .enumerate()
                                .filter(|&(i, _)| i != skip)
                                .map(|(_, &v)| v)
                                .collect();
                            known.contains(sub.as_slice())
                        });
                        if !closed {
                            return None;
                        }
                        let rows = rows_a.intersection(transactions.item_rows(last));
                        (rows.count_ones() >= min_count).then_some((cand, rows))
                    })
            })
            .collect();
        out.extend(next.iter().map(|(items, rows)| Itemset {
            items: items.clone(),
            count: rows.count_ones(),
        }));
        level = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(rows: &[&[usize]], n_items: usize) -> TransactionSet {
        TransactionSet::from_rows(
            (0..n_items).map(|i| ((b'A' + i as u8) as char).to_string()).collect(),
            &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn support_counts() {
        let t = ts(&[&[0, 1], &[0], &[1], &[0, 1]], 3);
        assert_eq!(support::<f64>(&[0, 1], &t).unwrap(), 0.5);
        assert_eq!(support::<f64>(&[2], &t).unwrap(), 0.0);
        let all = ts(&[&[0], &[0]], 1);
        assert_eq!(support::<f64>(&[0], &all).unwrap(), 1.0);
        assert_eq!(support::<f64>(&[5], &t), Err(ArmError::UnknownItem(5)));
        let empty = ts(&[], 2);
        assert_eq!(support::<f64>(&[0], &empty), Err(ArmError::NoTransactions));
    }

    #[test]
    fn small_example() {
        let t = ts(&[&[0, 1], &[0, 1], &[0], &[2]], 3);
        let got = apriori(&t, 0.5, 3).unwrap();
        let want = vec![
            Itemset {
                items: vec![0],
                count: 3,
            },
            Itemset {
                items: vec![1],
                count: 2,
            },
            Itemset {
                items: vec![0, 1],
                count: 2,
            },
        ];
        assert_eq!(got, want);
        assert_eq!(got[0].support::<f64>(4), 0.75);
    }

    #[test]
    fn single_transaction_full_support() {
        let t = ts(&[&[0, 1]], 2);
        let got: Vec<Vec<usize>> = apriori(&t, 1.0, 3).unwrap().into_iter().map(|i| i.items).collect();
        assert_eq!(got, vec![vec![0], vec![1], vec![0, 1]]);
    }

    #[test]
    fn threshold_above_every_item() {
        let t = ts(&[&[0, 1], &[0], &[1], &[2]], 3);
        assert!(apriori(&t, 0.51, 3).unwrap().is_empty());
    }

    #[test]
    fn respects_max_len() {
        let t = ts(&[&[0, 1, 2], &[0, 1, 2]], 3);
        assert_eq!(apriori(&t, 0.5, 2).unwrap().len(), 6);
        assert_eq!(apriori(&t, 0.5, 3).unwrap().len(), 7);
    }
}
