//! Crash-report ingestion: CSV parsing, deduplication, missing-value policy
//! and feature engineering into a categorical [`FeatureTable`].

mod clean;
mod config;
mod features;
mod record;

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use clean::{
    apply_missing_policy, dedupe, numeric_mode, text_mode, DroppedColumn, Imputation, MissingReport, UNKNOWN,
};
pub use config::{
    default_bins, default_keywords, AutomationSpec, BinSpec, ColumnKind, ColumnRole, ColumnSpec, IngestConfig,
    LevelKeyword, SystemFallback, TemporalSpec, UnknownColumns,
};
pub use features::{
    bin_numeric, detect_level, exclude_rows, extract_temporal, level_label, month_name, parse_date, parse_hour,
    tag_automation_level, DateParts, DAY, HOUR, MONTH, YEAR,
};
pub use record::{load_csv, read_csv, Cell, Column, RawRecord, RawTable, Render};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("duplicated header {0:?}")]
    DuplicateHeader(String),
    #[error("column {0:?} has no column spec")]
    UnknownColumn(String),
    #[error("required column {0:?} not found in header")]
    MissingColumn(String),
    #[error("row at line {line} has no report id")]
    MissingReportId { line: u64 },
    #[error("invalid ingest config: {0}")]
    Config(String),
    #[error("no {0} left after cleaning")]
    Empty(&'static str),
    #[error("cleaned table: {0}")]
    Table(String),
}

/// Row and column accounting for one ingest run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub raw_rows: usize,
    pub duplicate_rows: usize,
    pub excluded_rows: usize,
    pub rows: usize,
    /// Categorical and numeric columns read with role `keep`.
    pub kept_columns: usize,
    pub engineered_columns: Vec<String>,
    pub dropped_redundant: Vec<String>,
    /// Narrative and timestamp columns consumed by feature engineering.
    pub consumed_columns: Vec<String>,
    pub missing: MissingReport,
    pub columns: usize,
}

/// Cleaned all-categorical table. Every cell holds a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Report id of each row; 1-based row numbers when unknown.
    #[serde(default)]
    pub ids: Vec<String>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl FeatureTable {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self, IngestError> {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != columns.len()) {
            return Err(IngestError::Table(format!(
                "row {i} has {} cells, expected {}",
                r.len(),
                columns.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = columns.iter().find(|c| !seen.insert(c.as_str())) {
            return Err(IngestError::DuplicateHeader(dup.clone()));
        }
        let provenance = Provenance {
            rows: rows.len(),
            columns: columns.len(),
            ..Provenance::default()
        };
        let ids = (1..=rows.len()).map(|i| i.to_string()).collect();
        Ok(FeatureTable {
            columns,
            rows,
            ids,
            provenance,
        })
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self, IngestError> {
        if ids.len() != self.rows.len() {
            return Err(IngestError::Table(format!(
                "{} ids for {} rows",
                ids.len(),
                self.rows.len()
            )));
        }
        self.ids = ids;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, index: usize) -> impl Iterator<Item = &str> + '_ {
        self.rows.iter().map(move |r| r[index].as_str())
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureTable {
        let ids = rows.iter().map(|&r| self.ids[r].clone()).collect();
        let rows: Vec<_> = rows.iter().map(|&r| self.rows[r].clone()).collect();
        FeatureTable {
            columns: self.columns.clone(),
            ids,
            provenance: Provenance {
                rows: rows.len(),
                columns: self.columns.len(),
                ..Provenance::default()
            },
            rows,
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a cleaned table written by [`FeatureTable::write_csv`].
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, IngestError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let columns: Vec<String> = rdr
            .headers()
            .map_err(|e| IngestError::Csv {
                line: 1,
                message: e.to_string(),
            })?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| IngestError::Csv {
                line: i as u64 + 2,
                message: e.to_string(),
            })?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        FeatureTable::new(columns, rows)
    }
}

/// Loads and cleans a crash-report CSV.
pub fn prepare(path: impl AsRef<Path>, config: &IngestConfig) -> Result<FeatureTable, IngestError> {
    ingest(load_csv(path, config)?, config)
}

/// Runs the cleaning steps in order: dedupe, temporal split, automation
/// level tagging and exclusion, redundant column removal, missing-value
/// policy, binning.
pub fn ingest(table: RawTable, config: &IngestConfig) -> Result<FeatureTable, IngestError> {
    config.validate()?;
    let mut prov = Provenance {
        raw_rows: table.len(),
        ..Provenance::default()
    };
    prov.kept_columns = table
        .columns
        .iter()
        .filter(|c| matches!(c.kind, ColumnKind::Categorical | ColumnKind::Numeric))
        .filter(|c| {
            config
                .spec(&c.name)
                .map(|s| s.role == ColumnRole::Keep)
                .unwrap_or(false)
        })
        .count();

    let mut table = dedupe(table);
    prov.duplicate_rows = prov.raw_rows - table.len();

    // role applies before engineering so redundant sources are never read
    let mut i = 0;
    while i < table.columns.len() {
        let redundant = config
            .spec(&table.columns[i].name)
            .map(|s| s.role == ColumnRole::DropRedundant);
        if redundant == Some(true) {
            prov.dropped_redundant.push(table.remove_column(i).name);
        } else {
            i += 1;
        }
    }

    let before: Vec<String> = table.columns.iter().map(|c| c.name.clone()).collect();
    if let Some(spec) = &config.temporal {
        table = extract_temporal(table, spec);
    }
    if let Some(spec) = &config.automation {
        table = tag_automation_level(table, spec);
        prov.excluded_rows = exclude_rows(&mut table, &spec.output, &config.exclude_levels);
    }
    prov.engineered_columns = table
        .columns
        .iter()
        .filter(|c| !before.contains(&c.name))
        .map(|c| c.name.clone())
        .collect();

    let mut i = 0;
    while i < table.columns.len() {
        if matches!(table.columns[i].kind, ColumnKind::Narrative | ColumnKind::Timestamp) {
            prov.consumed_columns.push(table.remove_column(i).name);
        } else {
            i += 1;
        }
    }
    prov.consumed_columns
        .extend(before.iter().filter(|b| table.column_index(b).is_none()).cloned());
    prov.consumed_columns.retain(|c| !prov.dropped_redundant.contains(c));
    prov.consumed_columns.sort();
    prov.consumed_columns.dedup();

    let (table, missing) = apply_missing_policy(table, config.missing_threshold);
    prov.missing = missing;
    let table = bin_numeric(table, &config.bins)?;

    if table.is_empty() {
        return Err(IngestError::Empty("rows"));
    }
    if table.columns.is_empty() {
        return Err(IngestError::Empty("columns"));
    }
    let mut out = finalize(table)?;
    prov.rows = out.n_rows();
    prov.columns = out.n_columns();
    out.provenance = prov;
    Ok(out)
}

fn finalize(table: RawTable) -> Result<FeatureTable, IngestError> {
    let columns: Vec<String> = table.columns.iter().map(|c| c.name.clone()).collect();
    let mut rows = Vec::with_capacity(table.records.len());
    for rec in &table.records {
        let mut row = Vec::with_capacity(columns.len());
        for (cell, col) in rec.cells.iter().zip(&table.columns) {
            row.push(match cell {
                Cell::Text(s) => s.clone(),
                Cell::Number(v) => render(*v, col.render),
                Cell::Missing => {
                    return Err(IngestError::Table(format!("missing cell survived in {:?}", col.name)));
                }
            });
        }
        rows.push(row);
    }
    FeatureTable::new(columns, rows)?.with_ids(table.records.iter().map(|r| r.report_id.clone()).collect())
}

fn render(v: f64, how: Render) -> String {
    match how {
        Render::MonthName if v.fract() == 0.0 => month_name(v as u32)
            .map(str::to_string)
            .unwrap_or_else(|| v.to_string()),
        Render::Padded if v.fract() == 0.0 && v >= 0.0 => format!("{:02}", v as u64),
        _ if v.fract() == 0.0 => format!("{v:.0}"),
        _ => v.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
Report ID,Reporting Entity,Incident Time,State,ADS/ADAS Version,Make,Narrative,VIN,Weather,Mileage,Incident Date
30270,Waymo,20:35:00,CA,5th Gen,Jaguar,\"On April X, 2024, a\",V1,Clear,45000,2024-04-02
28349,Lucid,03:38:00,CA,Level 2,Lucid,\"May X,\",V2,,,2023-05-10
30270,\"Tesla, Inc.\",02:21:00,TX,0,Tesla,\"On January X, 2022\",V3,Rain,12000,2022-01-05
";

    fn config() -> IngestConfig {
        use ColumnKind::*;
        IngestConfig {
            columns: vec![
                ColumnSpec::new("Report ID", Categorical),
                ColumnSpec::new("Reporting Entity", Categorical),
                ColumnSpec::new("Incident Time", Timestamp),
                ColumnSpec::new("Incident Date", Timestamp),
                ColumnSpec::new("State", Categorical),
                ColumnSpec::new("ADS/ADAS Version", Categorical),
                ColumnSpec::new("Make", Categorical),
                ColumnSpec::new("Narrative", Narrative),
                ColumnSpec::redundant("VIN", Categorical),
                ColumnSpec::new("Weather", Categorical),
                ColumnSpec::new("Mileage", Numeric),
            ],
            bins: default_bins().into_iter().filter(|b| b.column == "Mileage").collect(),
            ..IngestConfig::sgo_default()
        }
    }

    #[test]
    fn table_two_rows_parse() {
        let raw = read_csv(FIXTURE.as_bytes(), &config()).unwrap();
        assert_eq!(raw.len(), 3);
    }

    #[test]
    fn full_ingest() {
        let raw = read_csv(FIXTURE.as_bytes(), &config()).unwrap();
        let t = ingest(raw, &config()).unwrap();
        let p = &t.provenance;
        assert_eq!(p.raw_rows, 3);
        assert_eq!(p.duplicate_rows, 1);
        assert_eq!(t.n_rows(), 2);
        assert_eq!(p.dropped_redundant, ["VIN"]);
        assert!(t.column_index("VIN").is_none());
        assert!(t.column_index("Narrative").is_none());
        let weather = t.column_index("Weather").unwrap();
        assert_eq!(t.rows[1][weather], UNKNOWN);
        let level = t.column_index("Automation Level").unwrap();
        assert_eq!(t.rows[0][level], "Level 4");
        assert_eq!(t.rows[1][level], "Level 2");
        let mileage = t.column_index("Mileage Bin").unwrap();
        assert_eq!(t.rows[0][mileage], "30k–60k");
        // only one non-missing mileage, so the mode is 45000
        assert_eq!(t.rows[1][mileage], "30k–60k");
        let hour = t.column_index(HOUR).unwrap();
        assert_eq!(t.rows[0][hour], "20");
        assert_eq!(t.rows[1][hour], "03");
        let month = t.column_index(MONTH).unwrap();
        assert_eq!(t.rows[0][month], "April");
        assert_eq!(
            p.columns,
            p.kept_columns + p.engineered_columns.len() - p.missing.dropped.len()
        );
    }

    #[test]
    fn feature_table_csv_round_trip() {
        let t = FeatureTable::new(vec!["a".into(), "b".into()], vec![vec!["x, y".into(), "1".into()]]).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = FeatureTable::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.rows, t.rows);
        assert_eq!(back.columns, t.columns);
    }

    #[test]
    fn render_rules() {
        assert_eq!(render(3.0, Render::MonthName), "March");
        assert_eq!(render(7.0, Render::Padded), "07");
        assert_eq!(render(2022.0, Render::Plain), "2022");
        assert_eq!(render(2.5, Render::Plain), "2.5");
    }
}
