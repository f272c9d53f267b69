use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::config::ColumnKind;
use super::record::{Cell, RawTable};

pub const UNKNOWN: &str = "Unknown";

/// Keeps the first record for every report id.
pub fn dedupe(table: RawTable) -> RawTable {
    let mut seen = HashSet::new();
    let RawTable { columns, records } = table;
    let records = records
        .into_iter()
        .filter(|r| seen.insert(r.report_id.clone()))
        .collect();
    RawTable { columns, records }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedColumn {
    pub column: String,
    pub missing_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Imputation {
    pub column: String,
    pub cells: usize,
    pub value: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MissingReport {
    pub dropped: Vec<DroppedColumn>,
    pub imputed: Vec<Imputation>,
}

/// Drops columns whose missing fraction exceeds `threshold`, then fills the
/// remaining gaps: numeric cells with the column mode, everything else with
/// [`UNKNOWN`].
pub fn apply_missing_policy(mut table: RawTable, threshold: f64) -> (RawTable, MissingReport) {
    let mut report = MissingReport::default();

    let mut index = 0;
    while index < table.columns.len() {
        let fraction = table.missing_fraction(index);
        if fraction > threshold {
            let col = table.remove_column(index);
            report.dropped.push(DroppedColumn {
                column: col.name,
                missing_fraction: fraction,
            });
        } else {
            index += 1;
        }
    }

    for (c, column) in table.columns.iter().enumerate() {
        let missing = table.records.iter().filter(|r| r.cells[c].is_missing()).count();
        if missing == 0 {
            continue;
        }
        let fill = match column.kind {
            ColumnKind::Numeric => match numeric_mode(table.records.iter().filter_map(|r| r.cells[c].as_number())) {
                Some(mode) => Cell::Number(mode),
                // entirely missing yet under threshold (threshold = 1)
                None => Cell::Text(UNKNOWN.to_string()),
            },
            _ => Cell::Text(UNKNOWN.to_string()),
        };
        let value = match &fill {
            Cell::Number(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => unreachable!(),
        };
        for r in &mut table.records {
            if r.cells[c].is_missing() {
                r.cells[c] = fill.clone();
            }
        }
        report.imputed.push(Imputation {
            column: column.name.clone(),
            cells: missing,
            value,
        });
    }
    (table, report)
}

/// Most frequent value; ties go to the smallest value.
pub fn numeric_mode(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut counts: BTreeMap<OrdF64, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(OrdF64(v)).or_default() += 1;
    }
    // BTreeMap iterates ascending, and max_by_key keeps the last maximum,
    // so walk in reverse to land on the smallest tied value.
    counts.into_iter().rev().max_by_key(|&(_, n)| n).map(|(v, _)| v.0)
}

/// Most frequent label; ties go to the lexicographically smallest.
pub fn text_mode<'a>(values: impl IntoIterator<Item = &'a str>) -> Option<(&'a str, usize)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    counts.into_iter().rev().max_by_key(|&(_, n)| n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::record::{Column, RawRecord};

    fn table(ids: &[&str]) -> RawTable {
        RawTable {
            columns: vec![Column::new("n", ColumnKind::Numeric)],
            records: ids
                .iter()
                .enumerate()
                .map(|(i, id)| RawRecord {
                    report_id: id.to_string(),
                    cells: vec![Cell::Number(i as f64)],
                })
                .collect(),
        }
    }

    fn ids(t: &RawTable) -> Vec<&str> {
        t.records.iter().map(|r| r.report_id.as_str()).collect()
    }

    #[test]
    fn dedupe_first_wins() {
        let t = dedupe(table(&["A", "B", "A", "C"]));
        assert_eq!(ids(&t), ["A", "B", "C"]);
        assert_eq!(t.records[0].cells[0], Cell::Number(0.0));
    }

    #[test]
    fn dedupe_identity_and_collapse() {
        let t = table(&["A", "B", "C"]);
        assert_eq!(dedupe(t.clone()), t);
        assert_eq!(dedupe(table(&["X"; 5])).len(), 1);
    }

    #[test]
    fn numeric_mode_imputation() {
        let mut t = table(&["a", "b", "c", "d"]);
        for (r, v) in t.records.iter_mut().zip([Some(1.0), Some(1.0), Some(2.0), None]) {
            r.cells[0] = v.map(Cell::Number).unwrap_or(Cell::Missing);
        }
        let (t, report) = apply_missing_policy(t, 0.5);
        let got: Vec<_> = t.records.iter().map(|r| r.cells[0].as_number().unwrap()).collect();
        assert_eq!(got, [1.0, 1.0, 2.0, 1.0]);
        assert_eq!(report.imputed[0].cells, 1);
    }

    #[test]
    fn mode_ties_pick_smallest() {
        assert_eq!(numeric_mode([3.0, 2.0, 3.0, 2.0, 7.0]), Some(2.0));
        assert_eq!(text_mode(["b", "a", "b", "a"]), Some(("a", 2)));
        assert_eq!(numeric_mode([]), None);
    }

    #[test]
    fn drops_over_threshold_only() {
        let mut t = RawTable {
            columns: vec![
                Column::new("w", ColumnKind::Categorical),
                Column::new("x", ColumnKind::Categorical),
            ],
            records: Vec::new(),
        };
        // w: 3/5 missing (0.6), x: 1/2 boundary is kept at exactly 0.5 below
        for i in 0..5 {
            let w = if i < 3 {
                Cell::Missing
            } else {
                Cell::Text("Clear".into())
            };
            t.records.push(RawRecord {
                report_id: i.to_string(),
                cells: vec![w, Cell::Text("v".into())],
            });
        }
        let (out, report) = apply_missing_policy(t, 0.5);
        assert_eq!(out.columns.len(), 1);
        assert_eq!(report.dropped[0].column, "w");
        assert!((report.dropped[0].missing_fraction - 0.6).abs() < 1e-12);

        let half = RawTable {
            columns: vec![Column::new("x", ColumnKind::Categorical)],
            records: vec![
                RawRecord {
                    report_id: "1".into(),
                    cells: vec![Cell::Text("Clear".into())],
                },
                RawRecord {
                    report_id: "2".into(),
                    cells: vec![Cell::Missing],
                },
            ],
        };
        let (out, _) = apply_missing_policy(half, 0.5);
        assert_eq!(out.records[1].cells[0], Cell::Text(UNKNOWN.into()));
    }
}
