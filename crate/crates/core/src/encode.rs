//! Integer label codes for clustering and one-hot transactions for rule
//! mining, both derived from a [`FeatureTable`].

use std::collections::BTreeSet;
use std::io::Write;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::cluster::Points;
use crate::ingest::FeatureTable;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelEncodedMatrix {
    pub columns: Vec<String>,
    /// Row-major, `n_rows × columns.len()`.
    pub codes: Vec<u32>,
    pub n_rows: usize,
    /// Per-column categories in lexicographic order; a code indexes into it.
    pub dictionaries: Vec<Vec<String>>,
}

fn dictionary<'a>(values: impl Iterator<Item = &'a str>) -> Vec<String> {
    values
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_string)
        .collect()
}

pub fn label_encode(table: &FeatureTable) -> LabelEncodedMatrix {
    let dictionaries: Vec<Vec<String>> = (0..table.n_columns()).map(|c| dictionary(table.column(c))).collect();
    let mut codes = Vec::with_capacity(table.n_rows() * table.n_columns());
    for row in &table.rows {
        for (value, dict) in row.iter().zip(&dictionaries) {
            let code = dict.binary_search(value).expect("value present in its own dictionary");
            codes.push(code as u32);
        }
    }
    LabelEncodedMatrix {
        columns: table.columns.clone(),
        codes,
        n_rows: table.n_rows(),
        dictionaries,
    }
}

impl LabelEncodedMatrix {
    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, r: usize) -> &[u32] {
        let d = self.n_columns();
        &self.codes[r * d..(r + 1) * d]
    }

    pub fn decode(&self) -> FeatureTable {
        let rows = (0..self.n_rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(&self.dictionaries)
                    .map(|(&c, d)| d[c as usize].clone())
                    .collect()
            })
            .collect();
        FeatureTable::new(self.columns.clone(), rows).expect("encoded matrix is rectangular")
    }

    /// Codes as coordinates. With `min_max`, each column is rescaled to
    /// `[0, 1]` by its dictionary size; otherwise the raw codes are used.
    pub fn to_points<T: Scalar>(&self, min_max: bool) -> Points<T> {
        let scale: Vec<T> = self
            .dictionaries
            .iter()
            .map(|d| {
                if min_max && d.len() > 1 {
                    T::one() / T::from_count(d.len() - 1)
                } else {
                    T::one()
                }
            })
            .collect();
        let data = self
            .codes
            .chunks(self.n_columns().max(1))
            .flat_map(|row| row.iter().zip(&scale).map(|(&c, &s)| T::from_count(c as usize) * s))
            .collect();
        Points::new(data, self.n_columns()).expect("rectangular codes")
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.columns)?;
        for r in 0..self.n_rows {
            w.write_record(self.row(r).iter().map(|c| c.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// `{column: [category, ...]}` in column order.
    pub fn dictionaries_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .columns
            .iter()
            .zip(&self.dictionaries)
            .map(|(c, d)| (c.clone(), serde_json::json!(d)))
            .collect();
        serde_json::Value::Object(map)
    }
}

/// Boolean item matrix stored column-wise: one row bitset per item.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionSet {
    items: Vec<String>,
    columns: Vec<BitSet>,
    /// Source-column item ranges for one-hot data; empty otherwise.
    groups: Vec<(String, Range<usize>)>,
    n_rows: usize,
}

pub fn item_name(column: &str, value: &str) -> String {
    format!("{column}={value}")
}

pub fn one_hot(table: &FeatureTable) -> TransactionSet {
    let n = table.n_rows();
    let mut items = Vec::new();
    let mut columns = Vec::new();
    let mut groups = Vec::new();
    for (c, name) in table.columns.iter().enumerate() {
        let dict = dictionary(table.column(c));
        let start = items.len();
        let mut bits = vec![BitSet::new(n); dict.len()];
        for (r, v) in table.column(c).enumerate() {
            let i = dict
                .binary_search_by(|d| d.as_str().cmp(v))
                .expect("value in dictionary");
            bits[i].insert(r);
        }
        items.extend(dict.iter().map(|v| item_name(name, v)));
        columns.extend(bits);
        groups.push((name.clone(), start..items.len()));
    }
    TransactionSet {
        items,
        columns,
        groups,
        n_rows: n,
    }
}

impl TransactionSet {
    /// Builds a transaction set from per-row item index lists.
    pub fn from_rows(items: Vec<String>, rows: &[Vec<usize>]) -> Self {
        let n = rows.len();
        let mut columns = vec![BitSet::new(n); items.len()];
        for (r, row) in rows.iter().enumerate() {
            for &i in row {
                columns[i].insert(r);
            }
        }
        TransactionSet {
            items,
            columns,
            groups: Vec::new(),
            n_rows: n,
        }
    }

    pub fn from_columns(items: Vec<String>, columns: Vec<BitSet>, n_rows: usize) -> Self {
        assert_eq!(items.len(), columns.len());
        assert!(columns.iter().all(|c| c.len() == n_rows));
        TransactionSet {
            items,
            columns,
            groups: Vec::new(),
            n_rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn item(&self, i: usize) -> &str {
        &self.items[i]
    }

    pub fn item_rows(&self, i: usize) -> &BitSet {
        &self.columns[i]
    }

    pub fn item_count(&self, i: usize) -> usize {
        self.columns[i].count_ones()
    }

    pub fn groups(&self) -> &[(String, Range<usize>)] {
        &self.groups
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.items.iter().position(|i| i == name)
    }

    pub fn contains(&self, row: usize, item: usize) -> bool {
        self.columns[item].contains(row)
    }

    /// Rows containing every listed item.
    pub fn cover(&self, itemset: &[usize]) -> BitSet {
        let mut it = itemset.iter();
        let Some(&first) = it.next() else {
            return BitSet::full(self.n_rows);
        };
        it.fold(self.columns[first].clone(), |acc, &i| {
            acc.intersection(&self.columns[i])
        })
    }

    pub fn count(&self, itemset: &[usize]) -> usize {
        match itemset {
            [] => self.n_rows,
            [a] => self.columns[*a].count_ones(),
            [a, b] => self.columns[*a].intersection_count(&self.columns[*b]),
            _ => self.cover(itemset).count_ones(),
        }
    }

    /// Keeps the listed rows (in order) and every item.
    pub fn select_rows(&self, rows: &[usize]) -> TransactionSet {
        TransactionSet {
            items: self.items.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            groups: self.groups.clone(),
            n_rows: rows.len(),
        }
    }

    /// Keeps the listed items, renumbered in the given order.
    pub fn select_items(&self, keep: &[usize]) -> TransactionSet {
        TransactionSet {
            items: keep.iter().map(|&i| self.items[i].clone()).collect(),
            columns: keep.iter().map(|&i| self.columns[i].clone()).collect(),
            groups: Vec::new(),
            n_rows: self.n_rows,
        }
    }

    pub fn row_items(&self, row: usize) -> Vec<usize> {
        (0..self.n_items()).filter(|&i| self.contains(row, i)).collect()
    }

    /// 0/1 CSV with the item names as header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.items)?;
        for r in 0..self.n_rows {
            w.write_record(self.columns.iter().map(|c| if c.contains(r) { "1" } else { "0" }))?;
        }
        w.flush()?;
        Ok(())
    }
}
