//! Run directory layout. Everything a run writes lands under
//! `<out>/run-<config hash prefix>/`, and `manifest.json` lists it.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{ClusterMining, ClusterProfile, Clustering, Exploratory, PipelineConfig, RuleRecord, RunReport};
use crate::ingest::FeatureTable;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Directory name for a config: `run-` plus the first 12 hex digits of its hash.
pub fn run_dir_name(config: &PipelineConfig) -> String {
    format!("run-{}", &config.hash()[..12])
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Lowercase ASCII alphanumerics, everything else collapsed to `_`.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub file_name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'a str,
    pub version: &'a str,
    pub verb: &'a str,
    pub config_hash: String,
    pub config: &'a PipelineConfig,
    pub input: InputDigest,
    pub files: Vec<String>,
}

/// Writes run artifacts and remembers their names for the manifest.
#[derive(Debug)]
pub struct RunWriter {
    dir: PathBuf,
    files: BTreeSet<String>,
}

impl RunWriter {
    pub fn create(out: impl AsRef<Path>, config: &PipelineConfig) -> io::Result<Self> {
        let dir = out.as_ref().join(run_dir_name(config));
        fs::create_dir_all(&dir)?;
        Ok(RunWriter {
            dir,
            files: BTreeSet::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(String::as_str)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> io::Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.files.insert(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_prepared(&mut self, table: &FeatureTable) -> io::Result<()> {
        let mut buf = Vec::new();
        table.write_csv(&mut buf).map_err(io::Error::other)?;
        self.write_bytes("cleaned.csv", &buf)?;
        self.write_json("provenance.json", &table.provenance)
    }

    pub fn write_clustering(&mut self, table: &FeatureTable, clustering: &Clustering) -> io::Result<()> {
        if let Some(curve) = &clustering.elbow {
            self.write_bytes("elbow.csv", curve.to_csv().as_bytes())?;
        }
        self.write_json("model.json", &clustering.model)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["report_id", "cluster"])?;
        for (id, c) in table.ids.iter().zip(&clustering.model.assignments) {
            w.write_record([id.as_str(), &c.to_string()])?;
        }
        let buf = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
        self.write_bytes("assignments.csv", &buf)
    }

    pub fn write_rules(&mut self, mining: &[ClusterMining]) -> io::Result<()> {
        for m in mining {
            let mut buf = Vec::new();
            super::write_rules_csv(&m.rules, &mut buf).map_err(io::Error::other)?;
            self.write_bytes(&format!("rules_cluster_{}.csv", m.cluster), &buf)?;
        }
        let all: Vec<&RuleRecord> = mining.iter().flat_map(|m| &m.rules).collect();
        self.write_json("rules.json", &all)
    }

    pub fn write_profiles(&mut self, profiles: &[ClusterProfile]) -> io::Result<()> {
        self.write_json("profile.json", profiles)
    }

    pub fn write_report(&mut self, report: &RunReport) -> io::Result<()> {
        self.write_json("report.json", report)
    }

    pub fn write_exploratory(&mut self, summary: &Exploratory) -> io::Result<()> {
        let mut used = BTreeSet::new();
        for f in &summary.frequencies {
            let mut name = format!("freq_{}", slug(&f.column));
            // distinct columns can share a slug
            let base = name.clone();
            let mut n = 2;
            while !used.insert(name.clone()) {
                name = format!("{base}_{n}");
                n += 1;
            }
            self.write_bytes(&format!("{name}.csv"), f.to_csv().as_bytes())?;
        }
        if let Some(m) = &summary.hour_month {
            self.write_bytes("hour_month.csv", m.to_csv().as_bytes())?;
        }
        Ok(())
    }

    /// Writes `manifest.json` listing every file written so far.
    pub fn finish(mut self, verb: &str, config: &PipelineConfig, input: &Path) -> io::Result<PathBuf> {
        let meta = fs::metadata(input)?;
        let digest = InputDigest {
            file_name: input
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            bytes: meta.len(),
            sha256: sha256_file(input)?,
        };
        let manifest = Manifest {
            tool: TOOL,
            version: VERSION,
            verb,
            config_hash: config.hash(),
            config,
            input: digest,
            files: self.files.iter().cloned().collect(),
        };
        self.write_json("manifest.json", &manifest)?;
        Ok(self.dir)
    }
}
