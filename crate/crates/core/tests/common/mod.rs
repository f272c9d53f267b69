//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code under test except to build inputs.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use crash_rules::cluster::{fit_from_centroids, Points};
use crash_rules::encode::TransactionSet;
use crash_rules::ingest::IngestConfig;

/// Every itemset of size `1..=max_len` whose support is at least
/// `num / den`, found by counting each subset of the item universe.
pub fn brute_force_frequent(
    rows: &[Vec<usize>],
    n_items: usize,
    (num, den): (usize, usize),
    max_len: usize,
) -> BTreeSet<(Vec<usize>, usize)> {
    assert!(n_items <= 16);
    let n = rows.len();
    let masks: Vec<u32> = rows.iter().map(|r| r.iter().fold(0u32, |m, &i| m | 1 << i)).collect();
    let mut out = BTreeSet::new();
    for set in 1u32..(1 << n_items) {
        let size = set.count_ones() as usize;
        if size > max_len {
            continue;
        }
        let count = masks.iter().filter(|&&m| m & set == set).count();
        if count * den >= num * n {
            let items: Vec<usize> = (0..n_items).filter(|i| set >> i & 1 == 1).collect();
            out.insert((items, count));
        }
    }
    out
}

pub fn transactions(rows: &[Vec<usize>], n_items: usize) -> TransactionSet {
    let names = (0..n_items).map(|i| format!("f{i:02}=x")).collect();
    TransactionSet::from_rows(names, rows)
}

pub fn count_rows(rows: &[Vec<usize>], items: &[usize]) -> usize {
    rows.iter().filter(|r| items.iter().all(|i| r.contains(i))).count()
}

pub fn wcss_of(points: &[Vec<f64>], assign: &[usize], k: usize) -> f64 {
    let d = points[0].len();
    let mut total = 0.0;
    for c in 0..k {
        let members: Vec<&Vec<f64>> = points
            .iter()
            .zip(assign)
            .filter(|(_, &a)| a == c)
            .map(|(p, _)| p)
            .collect();
        if members.is_empty() {
            continue;
        }
        for j in 0..d {
            let mu = members.iter().map(|p| p[j]).sum::<f64>() / members.len() as f64;
            total += members.iter().map(|p| (p[j] - mu).powi(2)).sum::<f64>();
        }
    }
    total
}

/// Global optimum WCSS over all partitions into two non-empty clusters.
pub fn brute_force_two_means(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    assert!((2..=16).contains(&n));
    let mut best = f64::INFINITY;
    // point 0 always in cluster 0 to skip mirrored partitions
    for mask in (1u32..(1 << n) - 1).filter(|m| m & 1 == 0) {
        let assign: Vec<usize> = (0..n).map(|i| (mask >> i & 1) as usize).collect();
        best = best.min(wcss_of(points, &assign, 2));
    }
    best
}

/// Best Lloyd result over every pair of distinct data points as seeds.
pub fn best_of_pairs(points: &Points<f64>) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let m = fit_from_centroids(points, points.select(&[i, j]), 300, 0.0).unwrap();
            best = best.min(m.wcss);
        }
    }
    best
}

/// Best Lloyd result over every initialisation Lloyd can be in for k = 2:
/// each pair of points as seeds, and the centroids of each 2-partition.
pub fn best_of_exhaustive(points: &Points<f64>) -> f64 {
    let n = points.len();
    let rows = points.to_vecs();
    let d = points.dim();
    let mut best = best_of_pairs(points);
    for mask in (1u32..(1 << n) - 1).filter(|m| m & 1 == 0) {
        let mut init = Vec::with_capacity(2 * d);
        for c in 0..2u32 {
            let members: Vec<&Vec<f64>> = (0..n).filter(|&i| (mask >> i & 1) == c).map(|i| &rows[i]).collect();
            for j in 0..d {
                init.push(members.iter().map(|p| p[j]).sum::<f64>() / members.len() as f64);
            }
        }
        let m = fit_from_centroids(points, Points::new(init, d).unwrap(), 300, 0.0).unwrap();
        best = best.min(m.wcss);
    }
    best
}

/// Elbow choice by the textbook construction: the curve point farthest
/// from the straight line through its end points, after scaling k and
/// WCSS to [0, 1].
pub fn farthest_from_chord(curve: &[(usize, f64)]) -> usize {
    let (k0, w0) = (curve[0].0 as f64, curve[0].1);
    let (k1, w1) = (curve[curve.len() - 1].0 as f64, curve[curve.len() - 1].1);
    let (wmin, wmax) = curve
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let span = if wmax > wmin { wmax - wmin } else { 1.0 };
    let norm = |k: f64, w: f64| ((k - k0) / (k1 - k0), (w - wmin) / span);
    let (ax, ay) = norm(k0, w0);
    let (bx, by) = norm(k1, w1);
    let len = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
    let mut best = (curve[0].0, -1.0);
    for &(k, w) in curve {
        let (x, y) = norm(k as f64, w);
        let dist = ((by - ay) * x - (bx - ax) * y + bx * ay - by * ax).abs() / len;
        if dist > best.1 + 1e-12 {
            best = (k, dist);
        }
    }
    best.0
}

/// Writes `contents` into a fresh temporary directory.
pub fn temp_csv(contents: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("input.csv");
    std::fs::write(&path, contents).unwrap();
    (dir, path)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// All rules `A -> B` over the frequent itemsets of size `2..=max_len`
/// passing confidence and lift, each threshold a `(num, den)` fraction.
pub fn brute_force_rules(
    rows: &[Vec<usize>],
    n_items: usize,
    support: (usize, usize),
    confidence: (usize, usize),
    lift: (usize, usize),
    max_len: usize,
) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    let n = rows.len();
    let mut out = BTreeSet::new();
    for (items, both) in brute_force_frequent(rows, n_items, support, max_len) {
        if items.len() < 2 {
            continue;
        }
        for mask in 1u32..(1 << items.len()) - 1 {
            let a: Vec<usize> = items
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &i)| i)
                .collect();
            let c: Vec<usize> = items
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 0)
                .map(|(_, &i)| i)
                .collect();
            let (na, nc) = (count_rows(rows, &a), count_rows(rows, &c));
            // both / na >= conf ; (both * n) / (na * nc) >= lift
            let conf_ok = both * confidence.1 >= confidence.0 * na;
            let lift_ok = both * n * lift.1 >= lift.0 * na * nc;
            if conf_ok && lift_ok {
                out.insert((a, c));
            }
        }
    }
    out
}

/// Five distinct reports plus one duplicate id; Lighting is 60% missing.
pub const POLICY_CSV: &str = "\
Report ID,Weather,Lighting,Mileage,SV Precrash Speed (mph),Incident Date,Incident Time
R1,Clear,Daylight,45000,5,2022-03-15,20:35
R2,,,45000,10,2022-03-16,00:00
R3,Rain,,12000,11,2022-04-01,
R1,Snow,Dark,99999,70,2023-01-01,01:00
R4,Clear,,,61,2022-03-15,08:10
R5,Cloudy,Dark - Lighted,\"70,000\",,2022-03-15,08:10
";

pub fn policy_config() -> IngestConfig {
    use crash_rules::ingest::{default_bins, ColumnKind::*, ColumnSpec};
    IngestConfig {
        columns: vec![
            ColumnSpec::new("Report ID", Categorical),
            ColumnSpec::new("Weather", Categorical),
            ColumnSpec::new("Lighting", Categorical),
            ColumnSpec::new("Mileage", Numeric),
            ColumnSpec::new("SV Precrash Speed (mph)", Numeric),
            ColumnSpec::new("Incident Date", Timestamp),
            ColumnSpec::new("Incident Time", Timestamp),
        ],
        automation: None,
        bins: default_bins()
            .into_iter()
            .filter(|b| b.column != "Posted Speed Limit (mph)")
            .collect(),
        ..IngestConfig::sgo_default()
    }
}
