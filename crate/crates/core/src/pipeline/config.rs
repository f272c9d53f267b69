use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arm::Thresholds;
use crate::ingest::IngestConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusteringConfig {
    #[serde(default = "default_k_min")]
    pub k_min: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// Fixed cluster count; skips the sweep when set.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Rescale label codes to [0, 1] per column before clustering.
    #[serde(default)]
    pub min_max_scale: bool,
}

fn default_k_min() -> usize {
    2
}
fn default_k_max() -> usize {
    10
}
fn default_seed() -> u64 {
    2024
}
fn default_restarts() -> usize {
    10
}
fn default_max_iter() -> usize {
    300
}
fn default_tolerance() -> f64 {
    1e-9
}
fn default_top_n() -> usize {
    10
}
fn default_highlights() -> Vec<String> {
    ["Automation System", "Roadway Type", "Make", "Speed Bin"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig {
            k_min: default_k_min(),
            k_max: default_k_max(),
            k: None,
            seed: default_seed(),
            restarts: default_restarts(),
            max_iter: default_max_iter(),
            tolerance: default_tolerance(),
            min_max_scale: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub ingest: IngestConfig,
    #[serde(default)]
    pub clustering: ClusteringConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Items below this in-cluster support are dropped before mining.
    /// Defaults to each cluster's minimum support.
    #[serde(default)]
    pub sparse_floor: Option<f64>,
    #[serde(default = "default_top_n")]
    pub top_n: usize,
    /// Per-cluster replacements for `thresholds`, keyed by cluster id.
    #[serde(default)]
    pub cluster_thresholds: BTreeMap<usize, Thresholds>,
    /// Columns called out in each cluster profile.
    #[serde(default = "default_highlights")]
    pub profile_highlights: Vec<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig::new(IngestConfig::sgo_default())
    }
}

impl PipelineConfig {
    pub fn new(ingest: IngestConfig) -> Self {
        PipelineConfig {
            schema_version: SCHEMA_VERSION,
            ingest,
            clustering: ClusteringConfig::default(),
            thresholds: Thresholds::default(),
            sparse_floor: None,
            top_n: default_top_n(),
            cluster_thresholds: BTreeMap::new(),
            profile_highlights: default_highlights(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let config: PipelineConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, String> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        self.ingest.validate().map_err(|e| e.to_string())?;
        let c = &self.clustering;
        if c.k_min == 0 || c.k_min > c.k_max {
            return Err(format!(
                "clustering k range {}..={} is empty or starts at 0",
                c.k_min, c.k_max
            ));
        }
        if c.k == Some(0) {
            return Err("clustering.k must be at least 1".into());
        }
        if c.max_iter == 0 || c.restarts == 0 {
            return Err("clustering max_iter and restarts must be at least 1".into());
        }
        if c.tolerance.is_nan() || c.tolerance < 0.0 {
            return Err("clustering tolerance must be non-negative".into());
        }
        if self.top_n == 0 {
            return Err("top_n must be at least 1".into());
        }
        for t in std::iter::once(&self.thresholds).chain(self.cluster_thresholds.values()) {
            t.validate().map_err(|e| e.to_string())?;
            if let Some(floor) = self.sparse_floor {
                if !(0.0..=1.0).contains(&floor) {
                    return Err(format!("sparse_floor must be in [0, 1], got {floor}"));
                }
                if floor > t.min_support {
                    return Err(format!("sparse_floor {floor} exceeds min_support {}", t.min_support));
                }
            }
        }
        Ok(())
    }

    pub fn thresholds_for(&self, cluster: usize) -> Thresholds {
        self.cluster_thresholds
            .get(&cluster)
            .copied()
            .unwrap_or(self.thresholds)
    }

    pub fn sparse_floor_for(&self, cluster: usize) -> f64 {
        self.sparse_floor
            .unwrap_or_else(|| self.thresholds_for(cluster).min_support)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
