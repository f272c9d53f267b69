use serde::Serialize;

use crate::ingest::{text_mode, FeatureTable};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnMode {
    pub column: String,
    pub value: String,
    /// Fraction of the cluster's rows holding `value`.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterProfile {
    pub cluster: usize,
    pub size: usize,
    /// Modal value of every column.
    pub modes: Vec<ColumnMode>,
    /// Modes of the configured highlight columns that exist in the table.
    pub highlights: Vec<ColumnMode>,
}

impl ClusterProfile {
    pub fn mode(&self, column: &str) -> Option<&ColumnMode> {
        self.modes.iter().find(|m| m.column == column)
    }
}

/// Per-cluster modal value and share for every column. Mode ties go to
/// the lexicographically smallest label.
pub fn profile_clusters(
    table: &FeatureTable,
    assignments: &[usize],
    k: usize,
    highlights: &[String],
) -> Result<Vec<ClusterProfile>, String> {
    if assignments.len() != table.n_rows() {
        return Err(format!("{} assignments for {} rows", assignments.len(), table.n_rows()));
    }
    if table.n_columns() == 0 {
        return Err("table has no columns".into());
    }
    if let Some(&bad) = assignments.iter().find(|&&a| a >= k) {
        return Err(format!("assignment {bad} outside 0..{k}"));
    }
    let mut members = vec![Vec::new(); k];
    for (r, &a) in assignments.iter().enumerate() {
        members[a].push(r);
    }
    Ok(members
        .iter()
        .enumerate()
        .map(|(cluster, rows)| {
            let modes: Vec<ColumnMode> = table
                .columns
                .iter()
                .enumerate()
                .filter_map(|(c, name)| {
                    let (value, count) = text_mode(rows.iter().map(|&r| table.rows[r][c].as_str()))?;
                    Some(ColumnMode {
                        column: name.clone(),
                        value: value.to_string(),
                        share: count as f64 / rows.len() as f64,
                    })
                })
                .collect();
            let highlights = highlights
                .iter()
                .filter_map(|h| modes.iter().find(|m| &m.column == h).cloned())
                .collect();
            ClusterProfile {
                cluster,
                size: rows.len(),
                modes,
                highlights,
            }
        })
        .collect())
}
