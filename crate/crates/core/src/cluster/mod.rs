//! K-means clustering (Lloyd iterations over k-means++ seeds), the WCSS
//! sweep and elbow selection.

mod elbow;
mod lloyd;
mod points;

use thiserror::Error;

pub use elbow::{chord_distances, select_elbow, wcss_sweep, ElbowCurve, Sweep};
pub use lloyd::{
    fit_from_centroids, kmeans_fit, kmeans_plus_plus, lloyd_step, nearest, objective, ClusterModel, KMeansParams,
    LloydStep,
};
pub use points::{squared_distance, Points};

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("no points to cluster")]
    Empty,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k = {k} exceeds the {rows} available rows")]
    TooManyClusters { k: usize, rows: usize },
    #[error("max_iter must be at least 1")]
    ZeroIterations,
    #[error("no centroids given")]
    NoCentroids,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("k range {start}..={end} is not within 1..={rows}")]
    Range { start: usize, end: usize, rows: usize },
    #[error("elbow selection needs at least 3 curve points, got {0}")]
    ShortCurve(usize),
}
