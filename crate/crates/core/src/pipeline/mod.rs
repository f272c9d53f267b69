//! Cluster-then-mine orchestration: ingest, label-encode, K-means with
//! elbow selection, then per-cluster sparse filtering, Apriori and ranked
//! rules.

mod config;
mod explore;
mod mine;
pub mod output;
mod profile;

use std::fmt;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

pub use config::{ClusteringConfig, PipelineConfig, SCHEMA_VERSION};
pub use explore::{frequency, summarize_exploratory, Exploratory, FrequencyTable, HourMonthMatrix};
pub use mine::{
    filter_sparse, mine_cluster, mine_clusters, write_rules_csv, ClusterMining, MineError, RuleRecord, SparseFiltered,
    RULE_CSV_HEADER,
};
pub use profile::{profile_clusters, ClusterProfile, ColumnMode};

use crate::arm::Thresholds;
use crate::cluster::{kmeans_fit, wcss_sweep, ClusterModel, ElbowCurve, KMeansParams};
use crate::encode::{label_encode, one_hot};
use crate::ingest::{prepare, FeatureTable, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Ingest,
    Encode,
    Cluster,
    Mine,
    Profile,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Encode => "encode",
            Stage::Cluster => "cluster",
            Stage::Mine => "mine",
            Stage::Profile => "profile",
            Stage::Output => "output",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
#[error("[{stage}] {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

impl PipelineError {
    pub fn new(stage: Stage, source: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> Self {
        PipelineError {
            stage,
            source: source.into(),
        }
    }
}

pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: Into<Box<dyn std::error::Error + Send + Sync>>> StageExt<T> for Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError::new(stage, e))
    }
}

/// Clusters found for a table, with the elbow curve when k was swept.
#[derive(Debug, Clone)]
pub struct Clustering {
    pub elbow: Option<ElbowCurve<f64>>,
    pub model: ClusterModel<f64>,
}

/// Label-encodes the table and runs K-means: a fixed k when configured,
/// otherwise the WCSS sweep over `k_min..=k_max` (capped at the row count)
/// with elbow selection.
pub fn cluster_table(config: &ClusteringConfig, table: &FeatureTable) -> Result<Clustering, PipelineError> {
    let points = label_encode(table).to_points::<f64>(config.min_max_scale);
    let params = KMeansParams {
        k: config.k.unwrap_or(config.k_min),
        seed: config.seed,
        max_iter: config.max_iter,
        restarts: config.restarts,
        tolerance: config.tolerance,
    };
    if config.k.is_some() {
        let model = kmeans_fit(&points, &params).stage(Stage::Cluster)?;
        return Ok(Clustering { elbow: None, model });
    }
    let n = points.len();
    let hi = config.k_max.min(n);
    let lo = config.k_min.min(hi);
    let sweep = wcss_sweep(&points, lo..=hi, &params).stage(Stage::Cluster)?;
    let model = sweep.chosen().clone();
    Ok(Clustering {
        elbow: Some(sweep.curve),
        model,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterSummary {
    pub cluster: usize,
    pub size: usize,
    pub thresholds: Thresholds,
    pub sparse_floor: f64,
    pub items: usize,
    pub items_kept: usize,
    pub frequent_itemsets: usize,
    pub rule_count: usize,
    pub top_rules: Vec<RuleRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config_hash: String,
    pub thresholds: Thresholds,
    pub cluster_thresholds: std::collections::BTreeMap<usize, Thresholds>,
    pub top_n: usize,
    pub seed: u64,
    pub provenance: Provenance,
    pub elbow: Option<ElbowCurve<f64>>,
    pub k: usize,
    pub wcss: f64,
    pub cluster_sizes: Vec<usize>,
    pub profiles: Vec<ClusterProfile>,
    pub clusters: Vec<ClusterSummary>,
    pub total_rules: usize,
}

/// Everything one run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub table: FeatureTable,
    pub clustering: Clustering,
    pub mining: Vec<ClusterMining>,
}

impl RunOutput {
    pub fn rules(&self, cluster: usize) -> &[RuleRecord] {
        &self.mining[cluster].rules
    }

    pub fn all_rules(&self) -> impl Iterator<Item = &RuleRecord> + '_ {
        self.mining.iter().flat_map(|m| m.rules.iter())
    }
}

pub fn run_pipeline(config: &PipelineConfig, input: impl AsRef<Path>) -> Result<RunOutput, PipelineError> {
    config.validate().stage(Stage::Config)?;
    let table = prepare(input, &config.ingest).stage(Stage::Ingest)?;
    run_on_table(config, table)
}

/// Runs every stage after ingest on an already cleaned table.
pub fn run_on_table(config: &PipelineConfig, table: FeatureTable) -> Result<RunOutput, PipelineError> {
    config.validate().stage(Stage::Config)?;
    if table.n_rows() == 0 || table.n_columns() == 0 {
        return Err(PipelineError::new(Stage::Encode, "cleaned table is empty"));
    }
    let clustering = cluster_table(&config.clustering, &table)?;
    let model = &clustering.model;
    let members = model.members();

    let transactions = one_hot(&table);
    let mining = mine_clusters(&transactions, &members, |c| {
        (config.thresholds_for(c), config.sparse_floor_for(c))
    })
    .stage(Stage::Mine)?;

    let profiles =
        profile_clusters(&table, &model.assignments, model.k, &config.profile_highlights).stage(Stage::Profile)?;

    let clusters: Vec<ClusterSummary> = mining
        .iter()
        .map(|m| ClusterSummary {
            cluster: m.cluster,
            size: m.size,
            thresholds: m.thresholds,
            sparse_floor: m.sparse_floor,
            items: m.items,
            items_kept: m.items_kept,
            frequent_itemsets: m.frequent_itemsets,
            rule_count: m.rules.len(),
            top_rules: m.rules.iter().take(config.top_n).cloned().collect(),
        })
        .collect();

    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        config_hash: config.hash(),
        thresholds: config.thresholds,
        cluster_thresholds: config.cluster_thresholds.clone(),
        top_n: config.top_n,
        seed: config.clustering.seed,
        provenance: table.provenance.clone(),
        elbow: clustering.elbow.clone(),
        k: model.k,
        wcss: model.wcss,
        cluster_sizes: model.sizes(),
        profiles,
        total_rules: clusters.iter().map(|c| c.rule_count).sum(),
        clusters,
    };
    Ok(RunOutput {
        report,
        table,
        clustering,
        mining,
    })
}
