//! Brute-force scans for the threshold-selection objectives, written as
//! direct transcriptions of their definitions over fully sorted arrays.

/// Argmax of the composite-selection objective by full enumeration.
///
/// Sorts the p-values ascending and scans ranks j from ceil(ln p) to
/// floor(p/2), scoring (j/p - pi_j) / sqrt(pi_j (1 - pi_j)); ties keep the
/// smallest rank. Returns the winning rank (1-based) and its p-value.
pub fn hc_composite_argmax(pvalues: &[f64]) -> (usize, f64) {
    let p = pvalues.len();
    let mut sorted = pvalues.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = (p as f64).ln().ceil() as usize;
    let (mut best_j, mut best) = (0usize, f64::NEG_INFINITY);
    for j in lo..=(p / 2) {
        let pi = sorted[j - 1];
        let obj = (j as f64 / p as f64 - pi) / (pi * (1.0 - pi)).sqrt();
        if obj > best {
            best = obj;
            best_j = j;
        }
    }
    (best_j, sorted[best_j - 1])
}

/// Argmax of the initialization-stage selection objective by full
/// enumeration.
///
/// Orders features by p-value ascending (stable) and scans ranks
/// j = 1..floor(p/2), skipping ranks whose p-value is at or below
/// ln(p)/p, scoring sqrt(p)·gap / (sqrt(max(sqrt(n)·gap, 0)) + j/p) with
/// gap = j/p - pi_j. Returns the winning rank (1-based) and the original
/// index of the feature at that rank, or None when every rank is skipped.
pub fn hc_ifpca_argmax(pvalues: &[f64], n: usize) -> Option<(usize, usize)> {
    let p = pvalues.len();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| pvalues[a].partial_cmp(&pvalues[b]).unwrap());
    let floor = (p as f64).ln() / p as f64;
    let (mut best_j, mut best) = (0usize, f64::NEG_INFINITY);
    for j in 1..=(p / 2) {
        let pi = pvalues[order[j - 1]];
        if pi <= floor {
            continue;
        }
        let gap = j as f64 / p as f64 - pi;
        let obj = (p as f64).sqrt() * gap
            / (((n as f64).sqrt() * gap).max(0.0).sqrt() + j as f64 / p as f64);
        if obj > best {
            best = obj;
            best_j = j;
        }
    }
    if best_j == 0 {
        None
    } else {
        Some((best_j, order[best_j - 1]))
    }
}
