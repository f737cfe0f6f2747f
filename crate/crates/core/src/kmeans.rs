//! Country clustering: feature standardization plus Lloyd's algorithm with
//! k-means++ seeding.
//!
//! Fitting runs a fixed number of seeded restarts and keeps the best by
//! inertia (ties to the earlier restart), so a given `(input, seed)` pair
//! always produces a bit-identical model. Cluster indices are canonicalized
//! by descending centroid mean of the first feature, which keeps "cluster 0"
//! stable across runs when the first feature is the dominant one.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

const RESTARTS: usize = 10;
const MAX_ITERS: usize = 300;

#[derive(Debug, Error, PartialEq)]
pub enum KMeansError {
    #[error("k = {k} exceeds the {rows} available rows")]
    KTooLarge { k: usize, rows: usize },
    #[error("point has {found} features, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no rows to cluster")]
    EmptyInput,
}

impl KMeansError {
    pub fn code(&self) -> &'static str {
        match self {
            KMeansError::KTooLarge { .. } => "KTooLarge",
            KMeansError::DimensionMismatch { .. } => "DimensionMismatch",
            KMeansError::EmptyInput => "EmptyInput",
        }
    }
}

/// Per-feature standardization statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScale {
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub stddev: f64,
    /// True when the column was constant (stddev 0) and mapped to zeros.
    pub constant: bool,
}

/// Centers each column to mean 0 and scales to stddev 1. Constant columns
/// map to all-zeros and are flagged.
pub fn standardize(rows: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<FeatureScale>) {
    let n = rows.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let dims = rows[0].len();
    let mut scales = Vec::with_capacity(dims);
    for d in 0..dims {
        let mean = rows.iter().map(|r| r[d]).sum::<f64>() / n as f64;
        let stddev = if n > 1 {
            (rows.iter().map(|r| (r[d] - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        scales.push(FeatureScale {
            mean,
            stddev,
            constant: stddev == 0.0,
        });
    }
    let scaled = rows
        .iter()
        .map(|r| {
            r.iter()
                .zip(&scales)
                .map(|(&v, s)| if s.constant { 0.0 } else { (v - s.mean) / s.stddev })
                .collect()
        })
        .collect();
    (scaled, scales)
}

/// Fitted clustering in standardized feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub k: usize,
    /// Centroids in standardized space, canonical order.
    pub centroids: Vec<Vec<f64>>,
    pub feature_names: Vec<String>,
    pub standardization: Vec<FeatureScale>,
    /// Total within-cluster sum of squared distances.
    pub inertia: f64,
    pub seed: u64,
}

impl ClusterModel {
    /// Applies the stored scaling to raw-space rows.
    pub fn standardize_rows(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .zip(&self.standardization)
                    .map(|(&v, s)| if s.constant { 0.0 } else { (v - s.mean) / s.stddev })
                    .collect()
            })
            .collect()
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid, ties to the lowest index.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = sq_dist(point, &centroids[0]);
    for (c, centroid) in centroids.iter().enumerate().skip(1) {
        let d = sq_dist(point, centroid);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    (best, best_d)
}

fn kmeanspp_seed(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(rows[rng.gen_range(0..rows.len())].clone());
    while centroids.len() < k {
        let d2: Vec<f64> = rows.iter().map(|r| nearest(r, &centroids).1).collect();
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = rows.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // All remaining mass at distance zero (duplicate points).
            rng.gen_range(0..rows.len())
        };
        centroids.push(rows[next].clone());
    }
    centroids
}

struct LloydFit {
    centroids: Vec<Vec<f64>>,
    inertia: f64,
}

fn lloyd(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> LloydFit {
    let dims = rows[0].len();
    let mut centroids = kmeanspp_seed(rows, k, rng);
    let mut assignments = vec![usize::MAX; rows.len()];
    let mut prev_inertia = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        let mut changed = false;
        let mut inertia = 0.0;
        for (i, row) in rows.iter().enumerate() {
            let (c, d) = nearest(row, &centroids);
            inertia += d;
            if assignments[i] != c {
                assignments[i] = c;
                changed = true;
            }
        }
        // Lloyd never increases the objective; tolerate only rounding noise.
        assert!(
            inertia <= prev_inertia * (1.0 + 1e-9) + 1e-12,
            "inertia increased during Lloyd iteration"
        );
        prev_inertia = inertia;
        if !changed {
            break;
        }

        let mut sums = vec![vec![0.0; dims]; k];
        let mut counts = vec![0usize; k];
        for (row, &c) in rows.iter().zip(&assignments) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(row) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for s in sums[c].iter_mut() {
                    *s /= counts[c] as f64;
                }
                centroids[c] = sums[c].clone();
            } else {
                // Re-seed an empty cluster at the point farthest from its
                // assigned centroid; keeps k fixed deterministically.
                let far = (0..rows.len())
                    .max_by(|&a, &b| {
                        let da = sq_dist(&rows[a], &centroids[assignments[a]]);
                        let db = sq_dist(&rows[b], &centroids[assignments[b]]);
                        da.partial_cmp(&db).unwrap().then(b.cmp(&a))
                    })
                    .unwrap();
                centroids[c] = rows[far].clone();
            }
        }
    }
    let mut inertia = 0.0;
    for row in rows {
        inertia += nearest(row, &centroids).1;
    }
    LloydFit { centroids, inertia }
}

/// Fits k-means on standardized rows: `RESTARTS` seeded k-means++ starts,
/// Lloyd iteration to an assignment fixpoint (or `MAX_ITERS`), best restart
/// by inertia. Deterministic for a fixed seed.
pub fn kmeans_fit(
    rows: &[Vec<f64>],
    k: usize,
    seed: u64,
    feature_names: Vec<String>,
    standardization: Vec<FeatureScale>,
) -> Result<ClusterModel, KMeansError> {
    if rows.is_empty() {
        return Err(KMeansError::EmptyInput);
    }
    if k == 0 || k > rows.len() {
        return Err(KMeansError::KTooLarge { k, rows: rows.len() });
    }

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let restart_seeds: Vec<u64> = (0..RESTARTS).map(|_| master.gen()).collect();

    let mut best: Option<LloydFit> = None;
    for restart_seed in restart_seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed);
        let fit = lloyd(rows, k, &mut rng);
        let better = match &best {
            None => true,
            Some(b) => fit.inertia < b.inertia,
        };
        if better {
            best = Some(fit);
        }
    }
    let fit = best.unwrap();

    // Canonical order: descending centroid mean of the first feature.
    let mut order: Vec<usize> = (0..k).collect();
    if !fit.centroids[0].is_empty() {
        order.sort_by(|&a, &b| {
            fit.centroids[b][0]
                .partial_cmp(&fit.centroids[a][0])
                .unwrap()
                .then(a.cmp(&b))
        });
    }
    let centroids: Vec<Vec<f64>> = order.iter().map(|&c| fit.centroids[c].clone()).collect();

    Ok(ClusterModel {
        k,
        centroids,
        feature_names,
        standardization,
        inertia: fit.inertia,
        seed,
    })
}

/// Assigns labeled standardized rows to their nearest centroid.
pub fn assign(
    model: &ClusterModel,
    rows: &[(String, Vec<f64>)],
) -> Result<Vec<(String, usize, f64)>, KMeansError> {
    let dims = model.centroids[0].len();
    rows.iter()
        .map(|(label, point)| {
            if point.len() != dims {
                return Err(KMeansError::DimensionMismatch {
                    expected: dims,
                    found: point.len(),
                });
            }
            let (c, d2) = nearest(point, &model.centroids);
            Ok((label.clone(), c, d2.sqrt()))
        })
        .collect()
}

/// Cluster report CSV: `country,cluster,distance_to_centroid` sorted by
/// cluster then country. Cluster indices are reported 1-based.
pub fn write_cluster_csv<W: Write>(
    mut w: W,
    assignments: &[(String, usize, f64)],
) -> std::io::Result<()> {
    let mut rows: Vec<&(String, usize, f64)> = assignments.iter().collect();
    rows.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    writeln!(w, "country,cluster,distance_to_centroid")?;
    for (country, cluster, dist) in rows {
        writeln!(w, "{},{},{}", country, cluster + 1, dist)?;
    }
    Ok(())
}
