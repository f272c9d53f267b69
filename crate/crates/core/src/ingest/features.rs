use chrono::{Datelike, NaiveDate, NaiveTime, Timelike};

use super::clean::UNKNOWN;
use super::config::{AutomationSpec, BinSpec, ColumnKind, TemporalSpec};
use super::record::{Cell, Column, RawTable, Render};
use super::IngestError;

pub const YEAR: &str = "Year";
pub const MONTH: &str = "Month";
pub const DAY: &str = "Day";
pub const HOUR: &str = "Hour";

const MONTHS: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

pub fn month_name(month: u32) -> Option<&'static str> {
    MONTHS.get((month as usize).checked_sub(1)?).copied()
}

/// Calendar parts of a date cell. Month-year forms such as `MAR-2022`
/// carry no day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateParts {
    pub year: i32,
    pub month: u32,
    pub day: Option<u32>,
}

pub fn parse_date(s: &str) -> Option<DateParts> {
    let s = s.trim();
    for fmt in [
        "%Y-%m-%d",
        "%m/%d/%Y",
        "%Y/%m/%d",
        "%d-%b-%Y",
        "%Y-%m-%d %H:%M:%S",
        "%m/%d/%Y %H:%M",
    ] {
        if let Ok(d) = NaiveDate::parse_and_remainder(s, fmt).map(|(d, _)| d) {
            return Some(DateParts {
                year: d.year(),
                month: d.month(),
                day: Some(d.day()),
            });
        }
    }
    // MAR-2022, Mar 2022
    let (m, y) = s.split_once(['-', ' ', '/'])?;
    let month = MONTHS
        .iter()
        .position(|name| m.len() >= 3 && name.len() >= m.len() && name[..m.len()].eq_ignore_ascii_case(m))?
        as u32
        + 1;
    let year = y.trim().parse::<i32>().ok().filter(|y| (1900..=2200).contains(y))?;
    Some(DateParts { year, month, day: None })
}

pub fn parse_hour(s: &str) -> Option<u32> {
    let s = s.trim();
    ["%H:%M:%S", "%H:%M"]
        .iter()
        .find_map(|fmt| NaiveTime::parse_from_str(s, fmt).ok())
        .map(|t| t.hour())
}

/// Splits the incident date and time into Year, Month, Day and Hour columns
/// and removes the source columns. Unparseable values become missing.
pub fn extract_temporal(mut table: RawTable, spec: &TemporalSpec) -> RawTable {
    if let Some(idx) = spec.date_column.as_deref().and_then(|c| table.column_index(c)) {
        let parts: Vec<Option<DateParts>> = table
            .records
            .iter()
            .map(|r| r.cells[idx].as_text().and_then(parse_date))
            .collect();
        let num = |v: Option<u32>| v.map(|v| Cell::Number(v as f64)).unwrap_or(Cell::Missing);
        let years = parts.iter().map(|p| num(p.map(|p| p.year as u32))).collect();
        let months = parts.iter().map(|p| num(p.map(|p| p.month))).collect();
        let days = parts.iter().map(|p| num(p.and_then(|p| p.day))).collect();
        table.remove_column(idx);
        table.push_column(Column::new(YEAR, ColumnKind::Numeric), years);
        table.push_column(
            Column {
                render: Render::MonthName,
                ..Column::new(MONTH, ColumnKind::Numeric)
            },
            months,
        );
        table.push_column(
            Column {
                render: Render::Padded,
                ..Column::new(DAY, ColumnKind::Numeric)
            },
            days,
        );
    }
    if let Some(idx) = spec.time_column.as_deref().and_then(|c| table.column_index(c)) {
        let hours = table
            .records
            .iter()
            .map(|r| {
                r.cells[idx]
                    .as_text()
                    .and_then(parse_hour)
                    .map(|h| Cell::Number(h as f64))
                    .unwrap_or(Cell::Missing)
            })
            .collect();
        table.remove_column(idx);
        table.push_column(
            Column {
                render: Render::Padded,
                ..Column::new(HOUR, ColumnKind::Numeric)
            },
            hours,
        );
    }
    table
}

/// SAE level named by the keyword rules, checking the version text before
/// the narrative and falling back to the automation system.
pub fn detect_level(
    version: Option<&str>,
    narrative: Option<&str>,
    system: Option<&str>,
    spec: &AutomationSpec,
) -> Option<u8> {
    let by_keyword = |text: &str| {
        let lower = text.to_lowercase();
        spec.keywords
            .iter()
            .find(|k| lower.contains(&k.pattern.to_lowercase()))
            .map(|k| k.level)
    };
    version
        .and_then(by_keyword)
        .or_else(|| narrative.and_then(by_keyword))
        .or_else(|| {
            let system = system?.trim();
            spec.system_fallback
                .iter()
                .find(|f| f.system.eq_ignore_ascii_case(system))
                .map(|f| f.level)
        })
}

pub fn level_label(level: Option<u8>) -> String {
    match level {
        Some(l) => format!("Level {l}"),
        None => UNKNOWN.to_string(),
    }
}

pub fn tag_automation_level(mut table: RawTable, spec: &AutomationSpec) -> RawTable {
    let idx = |c: &Option<String>| c.as_deref().and_then(|c| table.column_index(c));
    let (v, n, s) = (
        idx(&spec.version_column),
        idx(&spec.narrative_column),
        idx(&spec.system_column),
    );
    let labels = table
        .records
        .iter()
        .map(|r| {
            let text = |i: Option<usize>| i.and_then(|i| r.cells[i].as_text());
            Cell::Text(level_label(detect_level(text(v), text(n), text(s), spec)))
        })
        .collect();
    table.push_column(Column::new(&spec.output, ColumnKind::Categorical), labels);
    table
}

/// Removes rows whose `column` value is one of `labels`; returns the count.
pub fn exclude_rows(table: &mut RawTable, column: &str, labels: &[String]) -> usize {
    let Some(idx) = table.column_index(column) else {
        return 0;
    };
    let before = table.records.len();
    table
        .records
        .retain(|r| !matches!(&r.cells[idx], Cell::Text(t) if labels.iter().any(|l| l == t)));
    before - table.records.len()
}

/// Replaces each binned numeric column with its category labels.
pub fn bin_numeric(mut table: RawTable, bins: &[BinSpec]) -> Result<RawTable, IngestError> {
    for spec in bins {
        spec.validate()?;
        let Some(idx) = table.column_index(&spec.column) else {
            continue;
        };
        if table.columns[idx].kind != ColumnKind::Numeric {
            return Err(IngestError::Config(format!(
                "cannot bin non-numeric column {:?}",
                spec.column
            )));
        }
        let labels = spec.labels();
        for r in &mut table.records {
            if let Cell::Number(v) = r.cells[idx] {
                r.cells[idx] = Cell::Text(labels[spec.bin_index(v)].clone());
            }
        }
        table.columns[idx] = Column::new(&spec.output_name(), ColumnKind::Categorical);
    }
    Ok(table)
}
