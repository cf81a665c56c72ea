//! K-means clustering of embedded observations.
//!
//! Standard Lloyd iterations from k-means++ seeding, run across several
//! restarts with independent seeds; the labeling with the smallest
//! within-cluster sum of squares wins. Every tie is broken by index so
//! results are bit-for-bit reproducible for a given seed, whether the
//! restarts run serially or in parallel.
//!
//! Labels are `0..k` throughout the library; conversion to the 1-based
//! convention used in output files happens at the I/O boundary.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Tuning knobs for [`kmeans`].
#[derive(Debug, Clone)]
pub struct KmeansConfig {
    /// Independent k-means++ starts; the best inertia wins.
    pub restarts: usize,
    /// Lloyd iteration cap per restart.
    pub max_iter: usize,
    /// Relative inertia-change threshold that stops iterating.
    pub tol: f64,
    /// Base seed; restart r uses `seed + r`.
    pub seed: u64,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iter: 300,
            tol: 1e-6,
            seed: 0,
        }
    }
}

/// Outcome of the winning restart.
#[derive(Debug, Clone)]
pub struct KmeansResult {
    /// Cluster of each observation, values in `0..k`.
    pub labels: Vec<usize>,
    /// k x d centroid matrix.
    pub centroids: Array2<f64>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
    /// Lloyd iterations the winning restart used.
    pub iterations: usize,
    /// Index of the winning restart.
    pub restart: usize,
}

/// Cluster `points` (n x d, rows are observations) into `k` groups.
///
/// Runs `cfg.restarts` independent k-means++ starts and returns the one
/// with minimum inertia, ties going to the smaller restart index. Empty
/// clusters are repaired by reseeding them at the point farthest from its
/// current centroid. Deterministic in `cfg.seed`.
pub fn kmeans(points: &Array2<f64>, k: usize, cfg: &KmeansConfig) -> Result<KmeansResult> {
    let n = points.nrows();
    if k == 0 {
        return Err(Error::Domain("cluster count must be positive".into()));
    }
    if n < k {
        return Err(Error::Degenerate(format!(
            "cannot form {k} clusters from {n} observations"
        )));
    }
    if cfg.restarts == 0 || cfg.max_iter == 0 {
        return Err(Error::Domain("restarts and max_iter must be positive".into()));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::Domain("tol must be positive".into()));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("points must be finite".into()));
    }

    let mut best: Option<KmeansResult> = None;
    for restart in 0..cfg.restarts {
        let run = lloyd_once(points, k, cfg, restart);
        let better = match &best {
            None => true,
            // Strict inequality keeps the smallest restart index on ties.
            Some(b) => run.inertia < b.inertia,
        };
        if better {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn dist2(points: &Array2<f64>, i: usize, centroid: &[f64]) -> f64 {
    points
        .row(i)
        .iter()
        .zip(centroid)
        .map(|(&x, &c)| (x - c) * (x - c))
        .sum()
}

/// k-means++ seeding: first centroid uniform, each next one sampled with
/// probability proportional to squared distance from the chosen set. When
/// every remaining distance is zero (duplicate points), the lowest
/// unchosen index is taken.
fn seed_centroids(points: &Array2<f64>, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.nrows();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    chosen.push(first);
    let mut d2: Vec<f64> = (0..n)
        .map(|i| dist2(points, i, points.row(first).to_slice().unwrap()))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            (0..n).find(|i| !chosen.contains(i)).expect("n >= k")
        };
        chosen.push(next);
        let c = points.row(next).to_owned();
        for i in 0..n {
            let d = dist2(points, i, c.as_slice().unwrap());
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    chosen
        .iter()
        .map(|&i| points.row(i).to_vec())
        .collect()
}

fn lloyd_once(points: &Array2<f64>, k: usize, cfg: &KmeansConfig, restart: usize) -> KmeansResult {
    let n = points.nrows();
    let d = points.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
    let mut centroids = seed_centroids(points, k, &mut rng);

    let mut labels = vec![0usize; n];
    let mut prev_inertia = f64::INFINITY;
    let mut iterations = 0usize;
    for iter in 0..cfg.max_iter {
        iterations = iter + 1;
        // Assign to the nearest centroid, ties to the lowest index.
        for i in 0..n {
            let mut best_c = 0usize;
            let mut best_d = dist2(points, i, &centroids[0]);
            for (c, centroid) in centroids.iter().enumerate().skip(1) {
                let dd = dist2(points, i, centroid);
                if dd < best_d {
                    best_d = dd;
                    best_c = c;
                }
            }
            labels[i] = best_c;
        }

        // Repair empty clusters: move the point farthest from its current
        // centroid, restricted to clusters that can spare a member.
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        for c in 0..k {
            while sizes[c] == 0 {
                let mut far_i = usize::MAX;
                let mut far_d = -1.0;
                for i in 0..n {
                    if sizes[labels[i]] < 2 {
                        continue;
                    }
                    let dd = dist2(points, i, &centroids[labels[i]]);
                    if dd > far_d {
                        far_d = dd;
                        far_i = i;
                    }
                }
                let i = far_i;
                sizes[labels[i]] -= 1;
                labels[i] = c;
                sizes[c] += 1;
                centroids[c] = points.row(i).to_vec();
            }
        }

        // Recompute centroids as cluster means.
        for centroid in centroids.iter_mut() {
            centroid.iter_mut().for_each(|v| *v = 0.0);
        }
        for (i, &l) in labels.iter().enumerate() {
            for j in 0..d {
                centroids[l][j] += points[[i, j]];
            }
        }
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let size = sizes[c] as f64;
            centroid.iter_mut().for_each(|v| *v /= size);
        }

        let inertia: f64 = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| dist2(points, i, &centroids[l]))
            .sum();
        debug_assert!(
            inertia <= prev_inertia * (1.0 + 1e-12) + 1e-12,
            "inertia increased: {prev_inertia} -> {inertia}"
        );
        if prev_inertia.is_finite() && prev_inertia - inertia <= cfg.tol * prev_inertia.max(f64::MIN_POSITIVE) {
            prev_inertia = inertia;
            break;
        }
        prev_inertia = inertia;
    }

    let mut out = Array2::zeros((k, d));
    for (c, centroid) in centroids.iter().enumerate() {
        for j in 0..d {
            out[[c, j]] = centroid[j];
        }
    }
    KmeansResult {
        labels,
        centroids: out,
        inertia: prev_inertia,
        iterations,
        restart,
    }
}
