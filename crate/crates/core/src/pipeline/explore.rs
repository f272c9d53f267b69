use std::collections::BTreeMap;

use serde::Serialize;

use crate::ingest::{month_name, FeatureTable, HOUR, MONTH};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTable {
    pub column: String,
    /// `(value, count)`, most frequent first, ties by value.
    pub counts: Vec<(String, usize)>,
}

impl FrequencyTable {
    pub fn total(&self) -> usize {
        self.counts.iter().map(|c| c.1).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["value", "count"]).unwrap();
        for (v, n) in &self.counts {
            w.write_record([v.as_str(), &n.to_string()]).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// Crash counts by hour (rows) and month (columns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HourMonthMatrix {
    pub hours: Vec<String>,
    pub months: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl HourMonthMatrix {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(std::iter::once("hour").chain(self.months.iter().map(String::as_str)))
            .unwrap();
        for (h, row) in self.hours.iter().zip(&self.counts) {
            w.write_record(std::iter::once(h.clone()).chain(row.iter().map(|c| c.to_string())))
                .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exploratory {
    pub rows: usize,
    pub frequencies: Vec<FrequencyTable>,
    pub hour_month: Option<HourMonthMatrix>,
}

pub fn frequency(table: &FeatureTable, column: usize) -> FrequencyTable {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in table.column(column) {
        *counts.entry(v).or_default() += 1;
    }
    let mut counts: Vec<(String, usize)> = counts.into_iter().map(|(v, n)| (v.to_string(), n)).collect();
    counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    FrequencyTable {
        column: table.columns[column].clone(),
        counts,
    }
}

fn month_rank(label: &str) -> (usize, String) {
    let idx = (1..=12).position(|m| month_name(m) == Some(label)).unwrap_or(12);
    (idx, label.to_string())
}

pub fn summarize_exploratory(table: &FeatureTable) -> Exploratory {
    let frequencies = (0..table.n_columns()).map(|c| frequency(table, c)).collect();
    let hour_month = match (table.column_index(HOUR), table.column_index(MONTH)) {
        (Some(h), Some(m)) => {
            let mut hours: Vec<String> = table.column(h).map(str::to_string).collect();
            hours.sort();
            hours.dedup();
            let mut months: Vec<String> = table.column(m).map(str::to_string).collect();
            months.sort_by_key(|l| month_rank(l));
            months.dedup();
            let mut counts = vec![vec![0; months.len()]; hours.len()];
            for row in &table.rows {
                let hi = hours.binary_search(&row[h]).expect("hour listed");
                let mi = months.iter().position(|x| x == &row[m]).expect("month listed");
                counts[hi][mi] += 1;
            }
            Some(HourMonthMatrix { hours, months, counts })
        }
        _ => None,
    };
    Exploratory {
        rows: table.n_rows(),
        frequencies,
        hour_month,
    }
}
