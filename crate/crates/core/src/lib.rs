//! Cluster-then-mine association rules over tabular crash reports.
//!
//! Reports are cleaned and binned ([`ingest`]), label encoded for K-means
//! with elbow selection ([`cluster`]), and one-hot encoded for Apriori rule
//! mining inside each cluster ([`arm`]). [`pipeline`] wires the stages
//! together and [`cli`] exposes them as a command-line tool.
//!
//! Clustering and rule metrics are generic over the scalar type; the
//! aliases below fix the common choices.

pub mod arm;
pub mod bitset;
pub mod cli;
pub mod cluster;
pub mod encode;
pub mod ingest;
pub mod pipeline;
pub mod scalar;
pub mod synth;

pub use scalar::{Measure, Rational, Scalar};

pub type Points64 = cluster::Points<f64>;
pub type Points32 = cluster::Points<f32>;
pub type Model = cluster::ClusterModel<f64>;
pub type Model32 = cluster::ClusterModel<f32>;
pub type Rule64 = arm::Rule<f64>;
pub type Rule32 = arm::Rule<f32>;
/// Rule with exact rational support, confidence and lift.
pub type ExactRule = arm::Rule<Rational>;
