//! Exhaustive clustering optimum, feasible for tiny instances.

use ndarray::Array2;

/// Global minimum within-cluster sum of squares by enumerating every
/// assignment of n points to k clusters (skipping assignments with empty
/// clusters, which never beat their non-empty refinements).
pub fn exhaustive_best_inertia(points: &Array2<f64>, k: usize) -> f64 {
    let n = points.nrows();
    let d = points.ncols();
    let mut assign = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let mut sizes = vec![0usize; k];
        for &a in &assign {
            sizes[a] += 1;
        }
        if sizes.iter().all(|&s| s > 0) {
            let mut means = vec![vec![0.0; d]; k];
            for (i, &a) in assign.iter().enumerate() {
                for j in 0..d {
                    means[a][j] += points[[i, j]];
                }
            }
            for (c, m) in means.iter_mut().enumerate() {
                m.iter_mut().for_each(|v| *v /= sizes[c] as f64);
            }
            let inertia: f64 = assign
                .iter()
                .enumerate()
                .map(|(i, &a)| {
                    (0..d)
                        .map(|j| {
                            let diff = points[[i, j]] - means[a][j];
                            diff * diff
                        })
                        .sum::<f64>()
                })
                .sum();
            if inertia < best {
                best = inertia;
            }
        }
        // Next assignment in base-k counting order.
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            assign[pos] += 1;
            if assign[pos] < k {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
    }
}
