use std::collections::BTreeSet;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::config::{ColumnKind, IngestConfig, UnknownColumns};
use super::IngestError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Number(f64),
    Missing,
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }
}

/// How a numeric column renders into a category label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Render {
    Plain,
    /// Two-digit zero padding (hours, days) so labels sort in numeric order.
    Padded,
    MonthName,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub render: Render,
}

impl Column {
    pub fn new(name: &str, kind: ColumnKind) -> Self {
        Column {
            name: name.to_string(),
            kind,
            render: Render::Plain,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub report_id: String,
    pub cells: Vec<Cell>,
}

/// Records sharing one column layout.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawTable {
    pub columns: Vec<Column>,
    pub records: Vec<RawRecord>,
}

impl RawTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn cell(&self, row: usize, column: &str) -> Option<&Cell> {
        self.column_index(column).map(|c| &self.records[row].cells[c])
    }

    pub fn push_column(&mut self, column: Column, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.records.len());
        self.columns.push(column);
        for (r, c) in self.records.iter_mut().zip(cells) {
            r.cells.push(c);
        }
    }

    pub fn remove_column(&mut self, index: usize) -> Column {
        for r in &mut self.records {
            r.cells.remove(index);
        }
        self.columns.remove(index)
    }

    pub fn missing_fraction(&self, index: usize) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let missing = self.records.iter().filter(|r| r.cells[index].is_missing()).count();
        missing as f64 / self.records.len() as f64
    }
}

pub fn load_csv(path: impl AsRef<Path>, config: &IngestConfig) -> Result<RawTable, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file, config)
}

/// Parses a header-first CSV into a [`RawTable`] using the column specs.
///
/// The report id column is lifted out of the cells into
/// [`RawRecord::report_id`].
pub fn read_csv<R: Read>(reader: R, config: &IngestConfig) -> Result<RawTable, IngestError> {
    config.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| IngestError::Csv {
            line: 1,
            message: e.to_string(),
        })?
        .clone();

    let mut seen = BTreeSet::new();
    for h in headers.iter() {
        if !seen.insert(h) {
            return Err(IngestError::DuplicateHeader(h.to_string()));
        }
    }

    let mut id_pos = None;
    // (csv position, column spec index) for every retained header
    let mut layout = Vec::new();
    let mut columns = Vec::new();
    for (pos, h) in headers.iter().enumerate() {
        if h == config.report_id_column {
            id_pos = Some(pos);
            continue;
        }
        match config.spec(h) {
            Some(spec) => {
                layout.push(pos);
                columns.push(Column::new(&spec.name, spec.kind));
            }
            None if config.unknown_columns == UnknownColumns::Drop => {}
            None => return Err(IngestError::UnknownColumn(h.to_string())),
        }
    }
    let id_pos = id_pos.ok_or_else(|| IngestError::MissingColumn(config.report_id_column.clone()))?;

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| IngestError::Csv {
            line: e.position().map(|p| p.line()).unwrap_or(i as u64 + 2),
            message: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(i as u64 + 2);
        let report_id = row.get(id_pos).unwrap_or("").trim();
        if config.is_sentinel(report_id) {
            return Err(IngestError::MissingReportId { line });
        }
        let cells = layout
            .iter()
            .zip(&columns)
            .map(|(&pos, col)| parse_cell(row.get(pos).unwrap_or(""), col.kind, config))
            .collect();
        records.push(RawRecord {
            report_id: report_id.to_string(),
            cells,
        });
    }
    Ok(RawTable { columns, records })
}

fn parse_cell(raw: &str, kind: ColumnKind, config: &IngestConfig) -> Cell {
    if config.is_sentinel(raw) {
        return Cell::Missing;
    }
    let t = raw.trim();
    match kind {
        ColumnKind::Numeric => parse_number(t).map(Cell::Number).unwrap_or(Cell::Missing),
        _ => Cell::Text(t.to_string()),
    }
}

fn parse_number(s: &str) -> Option<f64> {
    let v = match s.parse::<f64>() {
        Ok(v) => v,
        Err(_) => s.replace(',', "").parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}
