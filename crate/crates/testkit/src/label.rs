//! Label-agreement metrics by brute force.

/// Best agreement rate over every permutation of predicted cluster names
/// (feasible for small K; independent of assignment-problem solvers).
pub fn accuracy_by_permutations(pred: &[usize], truth: &[usize]) -> f64 {
    let k = pred
        .iter()
        .chain(truth.iter())
        .max()
        .map(|&m| m + 1)
        .unwrap();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0usize;
    // Heap's algorithm over permutations of 0..k.
    fn heaps(perm: &mut Vec<usize>, size: usize, out: &mut Vec<Vec<usize>>) {
        if size == 1 {
            out.push(perm.clone());
            return;
        }
        for i in 0..size {
            heaps(perm, size - 1, out);
            if size % 2 == 0 {
                perm.swap(i, size - 1);
            } else {
                perm.swap(0, size - 1);
            }
        }
    }
    let mut all = Vec::new();
    let len = perm.len();
    heaps(&mut perm, len, &mut all);
    for p in all {
        let agree = pred
            .iter()
            .zip(truth)
            .filter(|&(&a, &b)| p[a] == b)
            .count();
        best = best.max(agree);
    }
    best as f64 / pred.len() as f64
}

/// Adjusted Rand index from direct enumeration of all item pairs.
pub fn ari_by_pairs(pred: &[usize], truth: &[usize]) -> f64 {
    let n = pred.len();
    let mut same_both = 0.0_f64;
    let mut same_pred = 0.0_f64;
    let mut same_truth = 0.0_f64;
    let mut total = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            total += 1.0;
            let sp = pred[i] == pred[j];
            let st = truth[i] == truth[j];
            if sp {
                same_pred += 1.0;
            }
            if st {
                same_truth += 1.0;
            }
            if sp && st {
                same_both += 1.0;
            }
        }
    }
    let expected = same_pred * same_truth / total;
    let max_index = 0.5 * (same_pred + same_truth);
    if max_index - expected == 0.0 {
        return 1.0;
    }
    (same_both - expected) / (max_index - expected)
}
