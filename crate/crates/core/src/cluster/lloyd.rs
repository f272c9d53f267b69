use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::points::{squared_distance, Points};
use super::ClusterError;
use crate::scalar::Scalar;

/// Outcome of one assignment + update pass.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydStep<T> {
    pub assignments: Vec<usize>,
    pub centroids: Points<T>,
    /// Objective of `assignments` against the updated `centroids`.
    pub wcss: T,
    /// Clusters that came up empty and were reseeded.
    pub reseeded: Vec<usize>,
}

/// Index of the nearest centroid; ties go to the lowest index.
pub fn nearest<T: Scalar>(point: &[T], centroids: &Points<T>) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (j, c) in centroids.rows().enumerate() {
        let d = squared_distance(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Assigns every point to its nearest centroid and moves each centroid to
/// the mean of its points.
///
/// A cluster left empty takes over the point farthest from its own
/// centroid, chosen among clusters that keep at least one other point, so
/// the result never has an empty cluster when `points.len() >= k`.
pub fn lloyd_step<T: Scalar>(points: &Points<T>, centroids: &Points<T>) -> Result<LloydStep<T>, ClusterError> {
    let k = centroids.len();
    if k == 0 {
        return Err(ClusterError::NoCentroids);
    }
    if centroids.dim() != points.dim() {
        return Err(ClusterError::Dimension {
            expected: points.dim(),
            got: centroids.dim(),
        });
    }
    let mut assignments: Vec<usize> = points.rows().map(|p| nearest(p, centroids).0).collect();
    let mut new = recompute(points, &assignments, centroids);

    let mut reseeded = Vec::new();
    loop {
        let sizes = cluster_sizes(&assignments, k);
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            break;
        };
        let mut far: Option<(usize, T)> = None;
        for (i, p) in points.rows().enumerate() {
            if sizes[assignments[i]] < 2 {
                continue;
            }
            let d = squared_distance(p, new.row(assignments[i]));
            if far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        let Some((donor, _)) = far else { break };
        assignments[donor] = empty;
        reseeded.push(empty);
        new = recompute(points, &assignments, &new);
    }

    let wcss = objective(points, &assignments, &new);
    Ok(LloydStep {
        assignments,
        centroids: new,
        wcss,
        reseeded,
    })
}

fn cluster_sizes(assignments: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &a in assignments {
        sizes[a] += 1;
    }
    sizes
}

/// Cluster means; clusters without points keep their previous centroid.
fn recompute<T: Scalar>(points: &Points<T>, assignments: &[usize], previous: &Points<T>) -> Points<T> {
    let k = previous.len();
    let d = points.dim();
    let mut sums = vec![T::zero(); k * d];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.rows().zip(assignments) {
        counts[a] += 1;
        for (s, &x) in sums[a * d..(a + 1) * d].iter_mut().zip(p) {
            *s = *s + x;
        }
    }
    let mut out = previous.clone();
    for j in 0..k {
        if counts[j] > 0 {
            let n = T::from_count(counts[j]);
            for (c, &s) in out.row_mut(j).iter_mut().zip(&sums[j * d..(j + 1) * d]) {
                *c = s / n;
            }
        }
    }
    out
}

/// Sum of squared distances from each point to its assigned centroid.
pub fn objective<T: Scalar>(points: &Points<T>, assignments: &[usize], centroids: &Points<T>) -> T {
    points
        .rows()
        .zip(assignments)
        .map(|(p, &a)| squared_distance(p, centroids.row(a)))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KMeansParams {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub restarts: usize,
    /// Convergence threshold on the max-norm centroid shift.
    pub tolerance: f64,
}

impl KMeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeansParams {
            k,
            seed,
            max_iter: 300,
            restarts: 10,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterModel<T> {
    pub k: usize,
    pub centroids: Points<T>,
    pub assignments: Vec<usize>,
    pub wcss: T,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
    /// Restart that produced this model.
    pub restart: usize,
    /// Objective after every Lloyd pass.
    #[serde(skip)]
    pub trace: Vec<T>,
}

impl<T: Scalar> ClusterModel<T> {
    pub fn sizes(&self) -> Vec<usize> {
        cluster_sizes(&self.assignments, self.k)
    }

    /// Row indices of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &a) in self.assignments.iter().enumerate() {
            out[a].push(i);
        }
        out
    }

    pub fn predict(&self, point: &[T]) -> usize {
        nearest(point, &self.centroids).0
    }
}

fn check(points: &Points<impl Scalar>, k: usize, max_iter: usize) -> Result<(), ClusterError> {
    if points.is_empty() {
        return Err(ClusterError::Empty);
    }
    if k == 0 {
        return Err(ClusterError::ZeroK);
    }
    if k > points.len() {
        return Err(ClusterError::TooManyClusters { k, rows: points.len() });
    }
    if max_iter == 0 {
        return Err(ClusterError::ZeroIterations);
    }
    Ok(())
}

/// Runs Lloyd iterations from explicit starting centroids.
pub fn fit_from_centroids<T: Scalar>(
    points: &Points<T>,
    init: Points<T>,
    max_iter: usize,
    tolerance: f64,
) -> Result<ClusterModel<T>, ClusterError> {
    check(points, init.len(), max_iter)?;
    let tol = T::from_f64(tolerance).unwrap_or_else(T::zero);
    let mut centroids = init;
    let mut trace = Vec::new();
    let mut last = None;
    let mut converged = false;
    for _ in 0..max_iter {
        let step = lloyd_step(points, &centroids)?;
        trace.push(step.wcss);
        let shift = centroids
            .as_slice()
            .iter()
            .zip(step.centroids.as_slice())
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max);
        centroids = step.centroids.clone();
        last = Some(step);
        if shift < tol || shift == T::zero() {
            converged = true;
            break;
        }
    }
    let step = last.expect("max_iter >= 1");
    Ok(ClusterModel {
        k: centroids.len(),
        centroids,
        assignments: step.assignments,
        wcss: step.wcss,
        iterations: trace.len(),
        converged,
        seed: 0,
        restart: 0,
        trace,
    })
}

/// k-means++ seeding: the first centre uniformly, each next one with
/// probability proportional to squared distance from the nearest chosen
/// centre.
pub fn kmeans_plus_plus<T: Scalar>(points: &Points<T>, k: usize, rng: &mut impl Rng) -> Points<T> {
    let n = points.len();
    let mut chosen = vec![rng.gen_range(0..n)];
    let mut dist: Vec<f64> = points
        .rows()
        .map(|p| squared_distance(p, points.row(chosen[0])).to_f64_lossy())
        .collect();
    while chosen.len() < k {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            dist.iter()
                .position(|&d| {
                    if target < d {
                        true
                    } else {
                        target -= d;
                        false
                    }
                })
                .unwrap_or_else(|| dist.iter().rposition(|&d| d > 0.0).expect("positive total"))
        } else {
            rng.gen_range(0..n)
        };
        chosen.push(next);
        for (i, p) in points.rows().enumerate() {
            let d = squared_distance(p, points.row(next)).to_f64_lossy();
            if d < dist[i] {
                dist[i] = d;
            }
        }
    }
    points.select(&chosen)
}

/// Best-of-restarts K-means with k-means++ seeding.
///
/// Restart `r` draws from stream `r` of a ChaCha8 generator seeded with
/// `params.seed`; the lowest WCSS wins and ties go to the lower restart, so
/// the result does not depend on how restarts are scheduled.
pub fn kmeans_fit<T: Scalar>(points: &Points<T>, params: &KMeansParams) -> Result<ClusterModel<T>, ClusterError> {
    check(points, params.k, params.max_iter)?;
    let restarts = params.restarts.max(1);
    let runs: Vec<ClusterModel<T>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(r as u64);
            let init = kmeans_plus_plus(points, params.k, &mut rng);
            fit_from_centroids(points, init, params.max_iter, params.tolerance).map(|mut m| {
                m.restart = r;
                m.seed = params.seed;
                m
            })
        })
        .collect::<Result<_, _>>()?;
    let best = runs
        .into_iter()
        .reduce(|best, m| if m.wcss < best.wcss { m } else { best })
        .expect("at least one restart");
    Ok(best)
}
