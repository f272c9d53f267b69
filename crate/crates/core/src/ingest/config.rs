use serde::{Deserialize, Serialize};

use super::IngestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Categorical,
    Numeric,
    Timestamp,
    Narrative,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnRole {
    #[default]
    Keep,
    DropRedundant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default)]
    pub role: ColumnRole,
}

impl ColumnSpec {
    pub fn new(name: &str, kind: ColumnKind) -> Self {
        ColumnSpec {
            name: name.to_string(),
            kind,
            role: ColumnRole::Keep,
        }
    }

    pub fn redundant(name: &str, kind: ColumnKind) -> Self {
        ColumnSpec {
            name: name.to_string(),
            kind,
            role: ColumnRole::DropRedundant,
        }
    }
}

/// Numeric-to-label binning for one column.
///
/// `edges` are the inclusive upper bounds of every bin but the last, which
/// is unbounded. Values below the first edge fall in the first bin, so the
/// mapping is total on finite numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinSpec {
    pub column: String,
    /// Name of the binned column; defaults to `"<column> Bin"`.
    #[serde(default)]
    pub output: Option<String>,
    pub edges: Vec<f64>,
    /// One label per bin (`edges.len() + 1`). Generated when absent.
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    /// Lower bound printed in the first generated label.
    #[serde(default)]
    pub lower: f64,
    /// Suffix appended to generated labels, e.g. `" mph"`.
    #[serde(default)]
    pub unit: String,
}

impl BinSpec {
    pub fn output_name(&self) -> String {
        self.output.clone().unwrap_or_else(|| format!("{} Bin", self.column))
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.edges.is_empty() {
            return Err(IngestError::Config(format!(
                "bins for {:?} need at least one edge",
                self.column
            )));
        }
        if self.edges.iter().any(|e| !e.is_finite()) || self.edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(IngestError::Config(format!(
                "bin edges for {:?} must be finite and strictly increasing",
                self.column
            )));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.edges.len() + 1 {
                return Err(IngestError::Config(format!(
                    "bins for {:?} have {} edges but {} labels (want {})",
                    self.column,
                    self.edges.len(),
                    labels.len(),
                    self.edges.len() + 1
                )));
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> Vec<String> {
        if let Some(labels) = &self.labels {
            return labels.clone();
        }
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        let mut lo = self.lower;
        for (i, &hi) in self.edges.iter().enumerate() {
            out.push(format!("{}-{}{}", fmt_edge(lo), fmt_edge(hi), self.unit));
            lo = next_lower(hi);
            if i == self.edges.len() - 1 {
                out.push(format!("{}+{}", fmt_edge(lo), self.unit));
            }
        }
        out
    }

    /// Index of the bin holding `value`.
    pub fn bin_index(&self, value: f64) -> usize {
        self.edges.partition_point(|&e| e < value)
    }
}

fn next_lower(edge: f64) -> f64 {
    if edge.fract() == 0.0 {
        edge + 1.0
    } else {
        edge
    }
}

fn fmt_edge(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemporalSpec {
    #[serde(default)]
    pub date_column: Option<String>,
    #[serde(default)]
    pub time_column: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelKeyword {
    pub pattern: String,
    pub level: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFallback {
    pub system: String,
    pub level: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomationSpec {
    #[serde(default)]
    pub version_column: Option<String>,
    #[serde(default)]
    pub narrative_column: Option<String>,
    #[serde(default)]
    pub system_column: Option<String>,
    #[serde(default = "default_level_output")]
    pub output: String,
    #[serde(default = "default_keywords")]
    pub keywords: Vec<LevelKeyword>,
    #[serde(default = "default_fallbacks")]
    pub system_fallback: Vec<SystemFallback>,
}

impl Default for AutomationSpec {
    fn default() -> Self {
        AutomationSpec {
            version_column: None,
            narrative_column: None,
            system_column: None,
            output: default_level_output(),
            keywords: default_keywords(),
            system_fallback: default_fallbacks(),
        }
    }
}

fn default_level_output() -> String {
    "Automation Level".to_string()
}

pub fn default_keywords() -> Vec<LevelKeyword> {
    [
        ("level 2", 2),
        ("l2", 2),
        ("level 3", 3),
        ("l3", 3),
        ("level 4", 4),
        ("l4", 4),
        ("4th", 4),
        ("5th gen", 4),
    ]
    .into_iter()
    .map(|(p, l)| LevelKeyword {
        pattern: p.to_string(),
        level: l,
    })
    .collect()
}

fn default_fallbacks() -> Vec<SystemFallback> {
    vec![
        SystemFallback {
            system: "ADAS".to_string(),
            level: 2,
        },
        SystemFallback {
            system: "ADS".to_string(),
            level: 4,
        },
    ]
}

/// What to do with CSV headers that have no [`ColumnSpec`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownColumns {
    #[default]
    Error,
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestConfig {
    pub report_id_column: String,
    pub columns: Vec<ColumnSpec>,
    #[serde(default = "default_missing_threshold")]
    pub missing_threshold: f64,
    #[serde(default = "default_sentinels")]
    pub missing_sentinels: Vec<String>,
    #[serde(default)]
    pub temporal: Option<TemporalSpec>,
    #[serde(default)]
    pub automation: Option<AutomationSpec>,
    #[serde(default)]
    pub bins: Vec<BinSpec>,
    #[serde(default = "default_excluded_levels")]
    pub exclude_levels: Vec<String>,
    #[serde(default)]
    pub unknown_columns: UnknownColumns,
}

fn default_missing_threshold() -> f64 {
    0.5
}

fn default_sentinels() -> Vec<String> {
    ["", "NA", "N/A", "NULL", "NaN"].iter().map(|s| s.to_string()).collect()
}

fn default_excluded_levels() -> Vec<String> {
    vec!["Level 3".to_string()]
}

impl IngestConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        if !(self.missing_threshold > 0.0 && self.missing_threshold <= 1.0) {
            return Err(IngestError::Config(format!(
                "missing_threshold must be in (0, 1], got {}",
                self.missing_threshold
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.columns {
            if !seen.insert(c.name.as_str()) {
                return Err(IngestError::Config(format!("column {:?} specified twice", c.name)));
            }
        }
        if !seen.contains(self.report_id_column.as_str()) {
            return Err(IngestError::Config(format!(
                "report id column {:?} has no column spec",
                self.report_id_column
            )));
        }
        for b in &self.bins {
            b.validate()?;
            match self.spec(&b.column) {
                Some(s) if s.kind == ColumnKind::Numeric => {}
                _ => {
                    return Err(IngestError::Config(format!(
                        "bin column {:?} is not a numeric column",
                        b.column
                    )))
                }
            }
        }
        if let Some(a) = &self.automation {
            if a.keywords.iter().any(|k| k.pattern.is_empty()) {
                return Err(IngestError::Config("empty automation keyword".to_string()));
            }
        }
        Ok(())
    }

    pub fn spec(&self, name: &str) -> Option<&ColumnSpec> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn is_sentinel(&self, cell: &str) -> bool {
        let t = cell.trim();
        self.missing_sentinels.iter().any(|s| s.trim().eq_ignore_ascii_case(t))
    }

    /// Column layout of the NHTSA SGO-shaped files produced by
    /// [`crate::synth`], with the default binning.
    pub fn sgo_default() -> Self {
        use ColumnKind::*;
        let columns = vec![
            ColumnSpec::new("Report ID", Categorical),
            ColumnSpec::new("Reporting Entity", Categorical),
            ColumnSpec::new("Make", Categorical),
            ColumnSpec::redundant("VIN", Categorical),
            ColumnSpec::redundant("Investigating Officer", Categorical),
            ColumnSpec::redundant("Address", Categorical),
            ColumnSpec::new("ADS/ADAS Version", Categorical),
            ColumnSpec::new("Automation System", Categorical),
            ColumnSpec::new("Incident Date", Timestamp),
            ColumnSpec::new("Incident Time", Timestamp),
            ColumnSpec::new("City", Categorical),
            ColumnSpec::new("State", Categorical),
            ColumnSpec::new("Roadway Type", Categorical),
            ColumnSpec::new("Roadway Surface", Categorical),
            ColumnSpec::new("Roadway Description", Categorical),
            ColumnSpec::new("Weather", Categorical),
            ColumnSpec::new("Lighting", Categorical),
            ColumnSpec::new("Crash With", Categorical),
            ColumnSpec::new("SV Pre-Crash Movement", Categorical),
            ColumnSpec::new("CP Pre-Crash Movement", Categorical),
            ColumnSpec::new("SV Contact Area", Categorical),
            ColumnSpec::new("SV Any Air Bags Deployed?", Categorical),
            ColumnSpec::new("Highest Injury Severity Alleged", Categorical),
            ColumnSpec::new("SV Precrash Speed (mph)", Numeric),
            ColumnSpec::new("Posted Speed Limit (mph)", Numeric),
            ColumnSpec::new("Mileage", Numeric),
            ColumnSpec::new("Narrative", Narrative),
        ];
        IngestConfig {
            report_id_column: "Report ID".to_string(),
            columns,
            missing_threshold: default_missing_threshold(),
            missing_sentinels: default_sentinels(),
            temporal: Some(TemporalSpec {
                date_column: Some("Incident Date".to_string()),
                time_column: Some("Incident Time".to_string()),
            }),
            automation: Some(AutomationSpec {
                version_column: Some("ADS/ADAS Version".to_string()),
                narrative_column: Some("Narrative".to_string()),
                system_column: Some("Automation System".to_string()),
                ..AutomationSpec::default()
            }),
            bins: default_bins(),
            exclude_levels: default_excluded_levels(),
            unknown_columns: UnknownColumns::Error,
        }
    }
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig::sgo_default()
    }
}

pub fn default_bins() -> Vec<BinSpec> {
    vec![
        BinSpec {
            column: "SV Precrash Speed (mph)".to_string(),
            output: Some("Speed Bin".to_string()),
            edges: vec![10.0, 60.0],
            labels: None,
            lower: 0.0,
            unit: " mph".to_string(),
        },
        BinSpec {
            column: "Mileage".to_string(),
            output: Some("Mileage Bin".to_string()),
            edges: vec![10_000.0, 30_000.0, 60_000.0],
            labels: Some(
                ["0–10k", "10k–30k", "30k–60k", "60k+"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            ),
            lower: 0.0,
            unit: String::new(),
        },
        BinSpec {
            column: "Posted Speed Limit (mph)".to_string(),
            output: Some("Speed Limit Bin".to_string()),
            edges: (1..=7).map(|t| t as f64 * 10.0).collect(),
            labels: None,
            lower: 0.0,
            unit: " mph".to_string(),
        },
    ]
}
