//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a stage failed, 2 usage error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::encode::one_hot;
use crate::ingest::prepare;
use crate::pipeline::output::RunWriter;
use crate::pipeline::{
    cluster_table, mine_cluster, profile_clusters, run_on_table, summarize_exploratory, PipelineConfig, PipelineError,
    Stage, StageExt,
};

pub const THREADS_ENV: &str = "CRASH_RULES_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    Prepare,
    Cluster,
    Mine,
    Profile,
    Pipeline,
    Explore,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Prepare => "prepare",
            Verb::Cluster => "cluster",
            Verb::Mine => "mine",
            Verb::Profile => "profile",
            Verb::Pipeline => "pipeline",
            Verb::Explore => "explore",
        }
    }
}

/// Flag values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub min_support: Option<f64>,
    pub min_confidence: Option<f64>,
    pub min_lift: Option<f64>,
    pub max_len: Option<usize>,
    pub top_n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub verb: Verb,
    pub config_path: Option<PathBuf>,
    pub input_path: PathBuf,
    pub output_dir: PathBuf,
    pub overrides: Overrides,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1]"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be finite and non-negative"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "crash-rules",
    version,
    about = "Cluster crash reports and mine association rules per cluster"
)]
struct Cli {
    #[command(subcommand)]
    verb: VerbArgs,
}

#[derive(Debug, Subcommand)]
enum VerbArgs {
    /// Clean the input and write the prepared table with provenance
    Prepare(Args),
    /// Prepare, then cluster (elbow sweep unless --k is given)
    Cluster(Args),
    /// Prepare, then mine rules over the whole table as one cluster
    Mine(Args),
    /// Prepare, cluster, and write per-cluster profiles
    Profile(Args),
    /// Run every stage and write the full report
    Pipeline(Args),
    /// Write frequency tables and the hour by month matrix
    Explore(Args),
}

#[derive(Debug, clap::Args)]
struct Args {
    /// JSON config; defaults are used when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Crash report CSV
    #[arg(long)]
    input: PathBuf,
    /// Parent directory for run directories
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed cluster count; skips the elbow sweep
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: Option<u64>,
    #[arg(long, value_parser = unit_interval)]
    min_support: Option<f64>,
    #[arg(long, value_parser = unit_interval)]
    min_confidence: Option<f64>,
    #[arg(long, value_parser = non_negative)]
    min_lift: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    max_len: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    top_n: Option<u64>,
}

pub fn parse_args<I, T>(argv: I) -> Result<Command, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (verb, a) = match cli.verb {
        VerbArgs::Prepare(a) => (Verb::Prepare, a),
        VerbArgs::Cluster(a) => (Verb::Cluster, a),
        VerbArgs::Mine(a) => (Verb::Mine, a),
        VerbArgs::Profile(a) => (Verb::Profile, a),
        VerbArgs::Pipeline(a) => (Verb::Pipeline, a),
        VerbArgs::Explore(a) => (Verb::Explore, a),
    };
    Ok(Command {
        verb,
        config_path: a.config,
        input_path: a.input,
        output_dir: a.out,
        overrides: Overrides {
            seed: a.seed,
            k: a.k.map(|v| v as usize),
            min_support: a.min_support,
            min_confidence: a.min_confidence,
            min_lift: a.min_lift,
            max_len: a.max_len.map(|v| v as usize),
            top_n: a.top_n.map(|v| v as usize),
        },
    })
}

impl Command {
    /// Config file (or defaults) with flag overrides applied.
    pub fn config(&self) -> Result<PipelineConfig, PipelineError> {
        let mut c = match &self.config_path {
            Some(p) => PipelineConfig::from_file(p).stage(Stage::Config)?,
            None => PipelineConfig::default(),
        };
        let o = &self.overrides;
        if let Some(seed) = o.seed {
            c.clustering.seed = seed;
        }
        if o.k.is_some() {
            c.clustering.k = o.k;
        }
        // flag thresholds apply to every cluster, overriding per-cluster entries
        for t in std::iter::once(&mut c.thresholds).chain(c.cluster_thresholds.values_mut()) {
            if let Some(v) = o.min_support {
                t.min_support = v;
            }
            if let Some(v) = o.min_confidence {
                t.min_confidence = v;
            }
            if let Some(v) = o.min_lift {
                t.min_lift = v;
            }
            if let Some(v) = o.max_len {
                t.max_len = v;
            }
        }
        // an explicit floor may not exceed a lowered support threshold
        if let (Some(floor), Some(s)) = (c.sparse_floor, o.min_support) {
            c.sparse_floor = Some(floor.min(s));
        }
        if let Some(n) = o.top_n {
            c.top_n = n;
        }
        c.validate().stage(Stage::Config)?;
        Ok(c)
    }
}

/// Runs a command and returns the run directory.
pub fn run(command: &Command) -> Result<PathBuf, PipelineError> {
    let config = command.config()?;
    let input = command.input_path.as_path();
    let table = prepare(input, &config.ingest).stage(Stage::Ingest)?;
    let mut w = RunWriter::create(&command.output_dir, &config).stage(Stage::Output)?;
    w.write_prepared(&table).stage(Stage::Output)?;
    match command.verb {
        Verb::Prepare => {}
        Verb::Explore => {
            w.write_exploratory(&summarize_exploratory(&table))
                .stage(Stage::Output)?;
        }
        Verb::Cluster => {
            let clustering = cluster_table(&config.clustering, &table)?;
            w.write_clustering(&table, &clustering).stage(Stage::Output)?;
        }
        Verb::Profile => {
            let clustering = cluster_table(&config.clustering, &table)?;
            let model = &clustering.model;
            let profiles = profile_clusters(&table, &model.assignments, model.k, &config.profile_highlights)
                .stage(Stage::Profile)?;
            w.write_clustering(&table, &clustering).stage(Stage::Output)?;
            w.write_profiles(&profiles).stage(Stage::Output)?;
        }
        Verb::Mine => {
            let mining = mine_cluster(
                0,
                &one_hot(&table),
                &config.thresholds_for(0),
                config.sparse_floor_for(0),
            )
            .stage(Stage::Mine)?;
            w.write_rules(std::slice::from_ref(&mining)).stage(Stage::Output)?;
        }
        Verb::Pipeline => {
            let out = run_on_table(&config, table)?;
            w.write_clustering(&out.table, &out.clustering).stage(Stage::Output)?;
            w.write_profiles(&out.report.profiles).stage(Stage::Output)?;
            w.write_rules(&out.mining).stage(Stage::Output)?;
            w.write_exploratory(&summarize_exploratory(&out.table))
                .stage(Stage::Output)?;
            w.write_report(&out.report).stage(Stage::Output)?;
        }
    }
    w.finish(command.verb.name(), &config, input).stage(Stage::Output)
}

pub fn execute(command: &Command) -> i32 {
    match run(command) {
        Ok(dir) => {
            println!("{}", dir.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

/// Reads the thread cap from the environment (0 or unset means automatic).
pub fn thread_cap() -> Result<usize, String> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(format!("{THREADS_ENV}: {e}")),
    }
}

/// Full entry point: thread setup, argument parsing, execution.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let threads = match thread_cap() {
        Ok(n) => n,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    // a pool may already exist when called more than once in-process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    match parse_args(argv) {
        Ok(command) => execute(&command),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn happy_path() {
        let c = parse_args([
            "crash-rules",
            "pipeline",
            "--config",
            "c.json",
            "--input",
            "d.csv",
            "--out",
            "runs/",
        ])
        .unwrap();
        assert_eq!(c.verb, Verb::Pipeline);
        assert_eq!(c.config_path.as_deref(), Some(Path::new("c.json")));
        assert_eq!(c.output_dir, Path::new("runs/"));
    }

    #[test]
    fn support_above_one_is_usage_error() {
        let e = parse_args(["crash-rules", "mine", "--input", "d.csv", "--min-support", "1.5"]).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
        assert!(e.to_string().contains("--min-support"));
    }

    #[test]
    fn fixed_k_override() {
        let c = parse_args(["crash-rules", "cluster", "--input", "d.csv", "--k", "4", "--seed", "7"]).unwrap();
        let cfg = c.config().unwrap();
        assert_eq!(cfg.clustering.k, Some(4));
        assert_eq!(cfg.clustering.seed, 7);
    }

    #[test]
    fn missing_input_and_unknown_flag() {
        assert_eq!(
            parse_args(["crash-rules", "pipeline"]).unwrap_err().exit_code(),
            EXIT_USAGE
        );
        let e = parse_args(["crash-rules", "pipeline", "--input", "x", "--bogus"]).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
        assert!(e.to_string().contains("--bogus"));
    }

    #[test]
    fn threshold_flags_override_every_cluster() {
        let c = parse_args([
            "crash-rules",
            "pipeline",
            "--input",
            "d.csv",
            "--min-lift",
            "2",
            "--max-len",
            "4",
        ])
        .unwrap();
        let cfg = c.config().unwrap();
        assert_eq!(cfg.thresholds.min_lift, 2.0);
        assert_eq!(cfg.thresholds.max_len, 4);
    }
}
