//! Evaluation of clusterings and feature selections against truth.
//!
//! Cluster labels are only defined up to renaming, so accuracy maximizes
//! agreement over all label matchings (solved exactly as an assignment
//! problem) and the adjusted Rand index compares co-membership of pairs.
//! Feature selection quality is summarized by the usual confusion rates;
//! rates whose denominator is empty are reported as missing rather than
//! coerced to 0.

use ndarray::Array2;
use pathfinding::matrix::Matrix;
use pathfinding::prelude::kuhn_munkres;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Counts of observations by (predicted cluster, true cluster).
#[derive(Debug, Clone)]
pub struct ConfusionMatrix {
    /// k_pred x k_true counts; entries sum to n.
    pub counts: Array2<u64>,
}

/// Build the confusion matrix of two labelings over the same items.
pub fn confusion_matrix(pred: &[usize], truth: &[usize]) -> Result<ConfusionMatrix> {
    if pred.len() != truth.len() {
        return Err(Error::Label(format!(
            "label lengths differ: {} vs {}",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::Label("empty labelings".into()));
    }
    let k_pred = pred.iter().max().unwrap() + 1;
    let k_true = truth.iter().max().unwrap() + 1;
    let mut counts = Array2::zeros((k_pred, k_true));
    for (&a, &b) in pred.iter().zip(truth) {
        counts[[a, b]] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// Fraction of items whose predicted label agrees with the truth under
/// the best one-to-one matching of cluster names (exact assignment).
/// Differing cluster counts are handled by zero-padding to square.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let cm = confusion_matrix(pred, truth)?;
    let (kp, kt) = cm.counts.dim();
    let k = kp.max(kt);
    let rows: Vec<Vec<i64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if i < kp && j < kt {
                        cm.counts[[i, j]] as i64
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let weights = Matrix::from_rows(rows).expect("rectangular by construction");
    let (agreement, _) = kuhn_munkres(&weights);
    Ok(agreement as f64 / pred.len() as f64)
}

fn choose2(x: u64) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index: pair-counting agreement corrected for chance.
/// 1 means the partitions are identical up to renaming; independent
/// labelings score near 0; values can be negative.
pub fn ari(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let cm = confusion_matrix(pred, truth)?;
    let n: u64 = pred.len() as u64;
    if n < 2 {
        return Err(Error::Label("adjusted Rand index needs n >= 2".into()));
    }
    let sum_cells: f64 = cm.counts.iter().map(|&c| choose2(c)).sum();
    let sum_rows: f64 = cm
        .counts
        .rows()
        .into_iter()
        .map(|r| choose2(r.sum()))
        .sum();
    let sum_cols: f64 = cm
        .counts
        .columns()
        .into_iter()
        .map(|c| choose2(c.sum()))
        .sum();
    let total = choose2(n);
    let expected = sum_rows * sum_cols / total;
    let max_index = 0.5 * (sum_rows + sum_cols);
    let denom = max_index - expected;
    if denom == 0.0 {
        // Both partitions are trivial the same way (all-singletons or a
        // single cluster): pair structures coincide exactly.
        return Ok(1.0);
    }
    Ok((sum_cells - expected) / denom)
}

/// Confusion rates of a selected feature set against the true set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelectionReport {
    /// |selected ∩ true| / |true|; missing when the true set is empty.
    pub tpr: Option<f64>,
    /// |selected \ true| / (p − |true|); missing when every feature is
    /// truly influential.
    pub fpr: Option<f64>,
    /// |selected \ true| / |selected|; 0 for an empty selection.
    pub fdr: f64,
    /// 1 − fdr.
    pub tdr: f64,
    pub n_selected: usize,
    pub n_true: usize,
}

/// Compute selection rates over a universe of `p` features. Both index
/// lists are 0-based, deduplicated internally, and must lie in [0, p).
pub fn feature_metrics(
    selected: &[usize],
    true_features: &[usize],
    p: usize,
) -> Result<FeatureSelectionReport> {
    let mut sel = selected.to_vec();
    sel.sort_unstable();
    sel.dedup();
    let mut truth = true_features.to_vec();
    truth.sort_unstable();
    truth.dedup();
    for &j in sel.iter().chain(truth.iter()) {
        if j >= p {
            return Err(Error::Shape(format!("feature index {j} out of range p={p}")));
        }
    }
    let hits = sel
        .iter()
        .filter(|j| truth.binary_search(j).is_ok())
        .count();
    let false_pos = sel.len() - hits;
    let tpr = (!truth.is_empty()).then(|| hits as f64 / truth.len() as f64);
    let nulls = p - truth.len();
    let fpr = (nulls > 0).then(|| false_pos as f64 / nulls as f64);
    let fdr = if sel.is_empty() {
        0.0
    } else {
        false_pos as f64 / sel.len() as f64
    };
    Ok(FeatureSelectionReport {
        tpr,
        fpr,
        fdr,
        tdr: 1.0 - fdr,
        n_selected: sel.len(),
        n_true: truth.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use iif_testkit::label::{accuracy_by_permutations, ari_by_pairs};

    fn is_relabeling(pred: &[usize], truth: &[usize]) -> bool {
        let mut fwd = std::collections::HashMap::new();
        let mut bwd = std::collections::HashMap::new();
        for (&a, &b) in pred.iter().zip(truth) {
            if *fwd.entry(a).or_insert(b) != b {
                return false;
            }
            if *bwd.entry(b).or_insert(a) != a {
                return false;
            }
        }
        true
    }

    #[test]
    fn accuracy_frozen_example() {
        // 1-based in the docs; 0-based here.
        let pred = [0, 0, 1, 1, 2, 2];
        let truth = [0, 1, 1, 2, 2, 2];
        let acc = accuracy(&pred, &truth).unwrap();
        assert!((acc - 4.0 / 6.0).abs() < 1e-15);
        assert_eq!(acc, accuracy_by_permutations(&pred, &truth));
    }

    #[test]
    fn accuracy_identity_and_flip() {
        let truth = [0, 1, 1, 0, 1];
        assert_eq!(accuracy(&truth, &truth).unwrap(), 1.0);
        let flipped: Vec<usize> = truth.iter().map(|&l| 1 - l).collect();
        assert_eq!(accuracy(&flipped, &truth).unwrap(), 1.0);
    }

    #[test]
    fn accuracy_matches_permutation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let n = rng.gen_range(2..=8);
            let k = rng.gen_range(1..=4);
            let pred: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let fast = accuracy(&pred, &truth).unwrap();
            let slow = accuracy_by_permutations(&pred, &truth);
            assert!(
                (fast - slow).abs() < 1e-12,
                "pred {pred:?} truth {truth:?}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn accuracy_handles_unequal_cluster_counts() {
        // Prediction collapsed to 2 clusters, truth has 3.
        let pred = [0, 0, 1, 1, 1, 1];
        let truth = [0, 0, 1, 1, 2, 2];
        let acc = accuracy(&pred, &truth).unwrap();
        assert!((acc - 4.0 / 6.0).abs() < 1e-15);
        assert_eq!(acc, accuracy_by_permutations(&pred, &truth));
        // And the transpose case.
        let acc2 = accuracy(&truth, &pred).unwrap();
        assert!((acc2 - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn accuracy_is_one_iff_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(2..=7);
            let k = rng.gen_range(1..=3);
            let pred: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let acc = accuracy(&pred, &truth).unwrap();
            assert_eq!(acc == 1.0, is_relabeling(&pred, &truth));
        }
    }

    #[test]
    fn ari_frozen_example() {
        let pred = [0, 1, 0, 1];
        let truth = [0, 0, 1, 1];
        let v = ari(&pred, &truth).unwrap();
        assert!((v + 0.5).abs() < 1e-15, "got {v}");
        assert!((ari_by_pairs(&pred, &truth) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn ari_identity_and_permutation_invariance() {
        let truth = [0, 1, 2, 1, 0, 2, 2];
        assert_eq!(ari(&truth, &truth).unwrap(), 1.0);
        let renamed: Vec<usize> = truth.iter().map(|&l| (l + 1) % 3).collect();
        assert!((ari(&renamed, &truth).unwrap() - 1.0).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(3..=9);
            let pred: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let base = ari(&pred, &truth).unwrap();
            let renamed: Vec<usize> = pred.iter().map(|&l| (l + 2) % 3).collect();
            let v = ari(&renamed, &truth).unwrap();
            assert!((base - v).abs() < 1e-12);
        }
    }

    #[test]
    fn ari_matches_pair_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..=10);
            let k = rng.gen_range(1..=4);
            let pred: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let fast = ari(&pred, &truth).unwrap();
            let slow = ari_by_pairs(&pred, &truth);
            assert!(
                (fast - slow).abs() < 1e-12,
                "pred {pred:?} truth {truth:?}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn ari_is_one_iff_relabeling_exhaustive() {
        // All predicted labelings of 6 items into up to 3 clusters,
        // against a fixed truth.
        let truth = [0usize, 0, 1, 1, 2, 2];
        let n = truth.len();
        let mut pred = vec![0usize; n];
        loop {
            let v = ari(&pred, &truth).unwrap();
            assert_eq!(
                (v - 1.0).abs() < 1e-12,
                is_relabeling(&pred, &truth),
                "pred {pred:?}"
            );
            let mut pos = 0;
            loop {
                if pos == n {
                    return;
                }
                pred[pos] += 1;
                if pred[pos] < 3 {
                    break;
                }
                pred[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn feature_metrics_frozen_example() {
        // p=10, true {1,2,3,4}, selected {1,2,5} in 1-based terms.
        let r = feature_metrics(&[0, 1, 4], &[0, 1, 2, 3], 10).unwrap();
        assert_eq!(r.tpr, Some(0.5));
        assert_eq!(r.fpr, Some(1.0 / 6.0));
        assert!((r.fdr - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.tdr - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!((r.n_selected, r.n_true), (3, 4));
    }

    #[test]
    fn feature_metrics_edge_cases() {
        let exact = feature_metrics(&[2, 3], &[2, 3], 10).unwrap();
        assert_eq!(exact.tpr, Some(1.0));
        assert_eq!(exact.fdr, 0.0);
        assert_eq!(exact.tdr, 1.0);

        let disjoint = feature_metrics(&[0, 1], &[2, 3], 10).unwrap();
        assert_eq!(disjoint.tpr, Some(0.0));
        assert_eq!(disjoint.fdr, 1.0);

        let empty_selected = feature_metrics(&[], &[2, 3], 10).unwrap();
        assert_eq!(empty_selected.fdr, 0.0);
        assert_eq!(empty_selected.tpr, Some(0.0));

        let empty_truth = feature_metrics(&[1], &[], 10).unwrap();
        assert_eq!(empty_truth.tpr, None);
        assert_eq!(empty_truth.fpr, Some(0.1));
        assert_eq!(empty_truth.fdr, 1.0);

        let saturated_truth = feature_metrics(&[0], &(0..4).collect::<Vec<_>>(), 4).unwrap();
        assert_eq!(saturated_truth.fpr, None);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(accuracy(&[0, 1], &[0]).is_err());
        assert!(ari(&[0], &[0]).is_err());
        assert!(confusion_matrix(&[], &[]).is_err());
        assert!(feature_metrics(&[10], &[0], 10).is_err());
    }

    #[test]
    fn confusion_counts_sum_to_n() {
        let pred = [0, 1, 1, 2, 0];
        let truth = [1, 1, 0, 0, 1];
        let cm = confusion_matrix(&pred, &truth).unwrap();
        assert_eq!(cm.counts.dim(), (3, 2));
        assert_eq!(cm.counts.iter().sum::<u64>(), 5);
        assert_eq!(cm.counts[[0, 1]], 2);
    }
}
