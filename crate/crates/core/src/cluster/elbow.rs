use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use super::lloyd::{kmeans_fit, ClusterModel, KMeansParams};
use super::points::Points;
use super::ClusterError;
use crate::scalar::Scalar;

/// Knee distances closer than this are treated as ties.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElbowCurve<T> {
    pub points: Vec<(usize, T)>,
    pub chosen_k: usize,
}

impl<T: Scalar> ElbowCurve<T> {
    /// `k,wcss` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,wcss\n");
        for (k, w) in &self.points {
            out.push_str(&format!("{k},{w}\n"));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Sweep<T> {
    pub curve: ElbowCurve<T>,
    /// One fitted model per k, in curve order.
    pub models: Vec<ClusterModel<T>>,
}

impl<T: Scalar> Sweep<T> {
    pub fn model(&self, k: usize) -> Option<&ClusterModel<T>> {
        self.models.iter().find(|m| m.k == k)
    }

    pub fn chosen(&self) -> &ClusterModel<T> {
        self.model(self.curve.chosen_k).expect("chosen k was fitted")
    }
}

/// Fits every k in `ks` and picks the elbow. With fewer than three
/// k values the smallest k is chosen.
pub fn wcss_sweep<T: Scalar>(
    points: &Points<T>,
    ks: RangeInclusive<usize>,
    params: &KMeansParams,
) -> Result<Sweep<T>, ClusterError> {
    if ks.is_empty() || *ks.start() == 0 || *ks.end() > points.len() {
        return Err(ClusterError::Range {
            start: *ks.start(),
            end: *ks.end(),
            rows: points.len(),
        });
    }
    let models: Vec<ClusterModel<T>> = ks
        .clone()
        .into_par_iter()
        .map(|k| kmeans_fit(points, &KMeansParams { k, ..*params }))
        .collect::<Result<_, _>>()?;
    let curve_points: Vec<(usize, T)> = models.iter().map(|m| (m.k, m.wcss)).collect();
    let chosen_k = if curve_points.len() >= 3 {
        select_elbow(&curve_points)?
    } else {
        *ks.start()
    };
    Ok(Sweep {
        curve: ElbowCurve {
            points: curve_points,
            chosen_k,
        },
        models,
    })
}

/// Knee of a WCSS curve by maximum distance to the chord.
///
/// Both axes are normalised to `[0, 1]` (k by rank, WCSS by min-max) and
/// the point farthest from the line joining the first and last points
/// wins. Ties, including a perfectly straight or flat curve, go to the
/// smallest k.
pub fn select_elbow<T: Scalar>(curve: &[(usize, T)]) -> Result<usize, ClusterError> {
    if curve.len() < 3 {
        return Err(ClusterError::ShortCurve(curve.len()));
    }
    let distances = chord_distances(curve);
    let mut best = 0;
    for (i, &d) in distances.iter().enumerate() {
        if d > distances[best] + TIE_EPS {
            best = i;
        }
    }
    Ok(curve[best].0)
}

/// Normalised perpendicular distance of every curve point to the chord.
pub fn chord_distances<T: Scalar>(curve: &[(usize, T)]) -> Vec<f64> {
    let m = curve.len();
    let ys: Vec<f64> = curve.iter().map(|p| p.1.to_f64_lossy()).collect();
    let (lo, hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
        (lo.min(y), hi.max(y))
    });
    let span = hi - lo;
    if m < 2 || span.is_nan() || span <= 0.0 {
        return vec![0.0; m];
    }
    let norm: Vec<(f64, f64)> = ys
        .iter()
        .enumerate()
        .map(|(i, &y)| (i as f64 / (m - 1) as f64, (y - lo) / span))
        .collect();
    let (x0, y0) = norm[0];
    let (x1, y1) = norm[m - 1];
    let (dx, dy) = (x1 - x0, y1 - y0);
    let len = (dx * dx + dy * dy).sqrt();
    norm.iter()
        .map(|&(x, y)| (dx * (y0 - y) - (x0 - x) * dy).abs() / len)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_curve() {
        let c = [(2, 100.0), (3, 40.0), (4, 15.0), (5, 12.0), (6, 11.0)];
        assert_eq!(select_elbow(&c).unwrap(), 4);
        let c = [(2, 10.0), (3, 1.0), (4, 0.9), (5, 0.8)];
        assert_eq!(select_elbow(&c).unwrap(), 3);
    }

    #[test]
    fn linear_and_flat_pick_smallest() {
        let c: Vec<(usize, f64)> = (2..=10).map(|k| (k, 100.0 - 7.0 * k as f64)).collect();
        assert_eq!(select_elbow(&c).unwrap(), 2);
        let c: Vec<(usize, f64)> = (2..=10).map(|k| (k, 0.0)).collect();
        assert_eq!(select_elbow(&c).unwrap(), 2);
    }

    #[test]
    fn needs_three_points() {
        assert!(matches!(
            select_elbow(&[(2, 1.0), (3, 0.5)]),
            Err(ClusterError::ShortCurve(2))
        ));
    }

    #[test]
    fn identical_points_sweep() {
        let p = Points::new(vec![3.0f64; 20], 2).unwrap();
        let s = wcss_sweep(&p, 2..=6, &KMeansParams::new(2, 5)).unwrap();
        assert!(s.curve.points.iter().all(|&(_, w)| w == 0.0));
        assert_eq!(s.curve.chosen_k, 2);
    }

    #[test]
    fn csv_export() {
        let c = ElbowCurve {
            points: vec![(2, 4.5f64), (3, 1.0)],
            chosen_k: 2,
        };
        assert_eq!(c.to_csv(), "k,wcss\n2,4.5\n3,1\n");
    }
}
