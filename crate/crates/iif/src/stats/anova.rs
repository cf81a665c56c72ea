//! One-way ANOVA F statistics with quantile re-calibration.
//!
//! Tentative cluster labels are noisy, which inflates or deflates the raw
//! F statistics as a family. Before converting them to tail p-values the
//! whole vector is re-anchored: an affine map takes the empirical quartiles
//! of the observed statistics onto the quartiles of the theoretical F law,
//! so the bulk of the distribution is calibrated even when the labels are
//! imperfect.

use crate::stats::dist::f_quantile;
use crate::{Error, Result};

/// Cap applied when the within-class variance vanishes; such features are
/// perfectly separated by the labels and outrank every finite statistic.
pub const F_CAP: f64 = 1e12;

/// One feature's F statistic. `degenerate` marks a vanishing within-class
/// variance (value capped) or a completely constant feature (value 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FScore {
    pub value: f64,
    pub degenerate: bool,
}

/// One-way ANOVA F statistic for a single feature column.
///
/// `labels` must cover every class in `0..k` at least once and `values`
/// must leave at least one residual degree of freedom (n > k).
pub fn anova_f(values: &[f64], labels: &[usize], k: usize) -> Result<FScore> {
    let n = values.len();
    if n != labels.len() {
        return Err(Error::Shape(format!(
            "{} values vs {} labels",
            n,
            labels.len()
        )));
    }
    if k < 2 {
        return Err(Error::Label(format!("need at least 2 classes, got {k}")));
    }
    if n <= k {
        return Err(Error::Degenerate(format!(
            "ANOVA needs n > k, got n={n}, k={k}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in ANOVA input".into()));
    }

    let mut count = vec![0usize; k];
    let mut sum = vec![0.0_f64; k];
    for (&x, &c) in values.iter().zip(labels) {
        if c >= k {
            return Err(Error::Label(format!("label {c} out of range for k={k}")));
        }
        count[c] += 1;
        sum[c] += x;
    }
    if let Some(empty) = count.iter().position(|&c| c == 0) {
        return Err(Error::Label(format!("class {empty} has no observations")));
    }

    let grand = values.iter().sum::<f64>() / n as f64;
    let mean: Vec<f64> = sum.iter().zip(&count).map(|(s, &c)| s / c as f64).collect();

    let between: f64 = mean
        .iter()
        .zip(&count)
        .map(|(&m, &c)| c as f64 * (m - grand) * (m - grand))
        .sum();
    let within: f64 = values
        .iter()
        .zip(labels)
        .map(|(&x, &c)| (x - mean[c]) * (x - mean[c]))
        .sum();

    if within <= 0.0 {
        // Perfect separation, or a constant column when between also vanishes.
        return Ok(FScore {
            value: if between <= 0.0 { 0.0 } else { F_CAP },
            degenerate: true,
        });
    }
    let df1 = (k - 1) as f64;
    let df2 = (n - k) as f64;
    Ok(FScore {
        value: (between / df1) / (within / df2),
        degenerate: false,
    })
}

/// Linear-interpolation sample quantile (the convention where the h-th
/// order statistic sits at h = (n-1)q) of already sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::Degenerate("quantile of empty data".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("quantile level {q} outside [0,1]")));
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    if lo + 1 >= sorted.len() {
        return Ok(sorted[sorted.len() - 1]);
    }
    let frac = h - lo as f64;
    Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
}

/// Affine map taking the empirical quartiles (d1, d2, d3) onto the
/// theoretical quartiles (t1, t2, t3): center on the median, rescale by
/// the interquartile ranges.
pub(crate) fn quartile_map(x: f64, d: (f64, f64, f64), t: (f64, f64, f64)) -> f64 {
    (x - d.1) / (d.2 - d.0) * (t.2 - t.0) + t.1
}

/// Re-anchor raw F statistics so their quartiles match the F(df1, df2) law.
///
/// Errors if the empirical interquartile range is zero; a family of
/// identical statistics cannot be calibrated.
pub fn quantile_normalize_f(raw: &[f64], df1: u64, df2: u64) -> Result<Vec<f64>> {
    if raw.len() < 4 {
        return Err(Error::Degenerate(format!(
            "quantile normalization needs at least 4 statistics, got {}",
            raw.len()
        )));
    }
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite F statistic".into()));
    }
    let mut sorted = raw.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let d = (
        quantile_sorted(&sorted, 0.25)?,
        quantile_sorted(&sorted, 0.5)?,
        quantile_sorted(&sorted, 0.75)?,
    );
    if d.2 - d.0 <= 0.0 {
        return Err(Error::Degenerate(
            "zero interquartile range in F statistics".into(),
        ));
    }
    let t = (
        f_quantile(0.25, df1, df2)?,
        f_quantile(0.5, df1, df2)?,
        f_quantile(0.75, df1, df2)?,
    );
    Ok(raw.iter().map(|&x| quartile_map(x, d, t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::dist::f_quantile;
    use proptest::prelude::*;

    /// Independent oracle: F from the regression identity
    /// F = (R^2 / df1) / ((1 - R^2) / df2), with R^2 obtained by solving
    /// the normal equations of a dummy-coded least squares fit.
    fn f_by_regression(values: &[f64], labels: &[usize], k: usize) -> f64 {
        let n = values.len();
        // Design: intercept plus k-1 dummies; solve X'X beta = X'y by
        // Gaussian elimination.
        let p = k;
        let mut xtx = vec![vec![0.0_f64; p]; p];
        let mut xty = vec![0.0_f64; p];
        for (i, &y) in values.iter().enumerate() {
            let mut row = vec![0.0; p];
            row[0] = 1.0;
            if labels[i] > 0 {
                row[labels[i]] = 1.0;
            }
            for a in 0..p {
                xty[a] += row[a] * y;
                for b in 0..p {
                    xtx[a][b] += row[a] * row[b];
                }
            }
        }
        for col in 0..p {
            let pivot = (col..p)
                .max_by(|&a, &b| xtx[a][col].abs().partial_cmp(&xtx[b][col].abs()).unwrap())
                .unwrap();
            xtx.swap(col, pivot);
            xty.swap(col, pivot);
            let d = xtx[col][col];
            for r in 0..p {
                if r != col && xtx[r][col] != 0.0 {
                    let f = xtx[r][col] / d;
                    for c in 0..p {
                        xtx[r][c] -= f * xtx[col][c];
                    }
                    xty[r] -= f * xty[col];
                }
            }
        }
        let beta: Vec<f64> = (0..p).map(|i| xty[i] / xtx[i][i]).collect();
        let grand = values.iter().sum::<f64>() / n as f64;
        let mut ssr = 0.0;
        let mut sst = 0.0;
        for (i, &y) in values.iter().enumerate() {
            let mut fit = beta[0];
            if labels[i] > 0 {
                fit += beta[labels[i]];
            }
            ssr += (y - fit) * (y - fit);
            sst += (y - grand) * (y - grand);
        }
        let r2 = 1.0 - ssr / sst;
        (r2 / (k - 1) as f64) / ((1.0 - r2) / (n - k) as f64)
    }

    #[test]
    fn anova_two_group_pinned_value() {
        let f = anova_f(&[0.0, 1.0, 2.0, 3.0], &[0, 1, 0, 1], 2).unwrap();
        assert!((f.value - 0.5).abs() < 1e-12);
        assert!(!f.degenerate);
    }

    #[test]
    fn anova_matches_regression_oracle() {
        let values = [1.3, -0.2, 0.7, 2.1, -1.0, 0.4, 1.8, 0.0, -0.6, 2.5];
        let labels = [0, 1, 2, 0, 1, 2, 0, 1, 2, 0];
        let f = anova_f(&values, &labels, 3).unwrap();
        let oracle = f_by_regression(&values, &labels, 3);
        assert!((f.value - oracle).abs() < 1e-9 * oracle.max(1.0));
    }

    #[test]
    fn anova_equal_means_gives_zero() {
        // Both groups centered at zero: no between-class variation.
        let f = anova_f(&[-1.0, 1.0, -1.0, 1.0], &[0, 0, 1, 1], 2).unwrap();
        assert_eq!(f.value, 0.0);
        assert!(!f.degenerate);
    }

    #[test]
    fn anova_perfect_separation_is_capped() {
        let f = anova_f(&[1.0, 1.0, 2.0, 2.0], &[0, 0, 1, 1], 2).unwrap();
        assert_eq!(f.value, F_CAP);
        assert!(f.degenerate);
    }

    #[test]
    fn anova_constant_column_is_zero_and_flagged() {
        let f = anova_f(&[3.0, 3.0, 3.0, 3.0], &[0, 1, 0, 1], 2).unwrap();
        assert_eq!(f.value, 0.0);
        assert!(f.degenerate);
    }

    #[test]
    fn anova_input_validation() {
        assert!(anova_f(&[1.0, 2.0, 3.0], &[0, 0, 0], 2).is_err());
        assert!(anova_f(&[1.0, 2.0], &[0, 1], 2).is_err());
        assert!(anova_f(&[1.0, 2.0, 3.0], &[0, 1], 2).is_err());
        assert!(anova_f(&[1.0, 2.0, 3.0], &[0, 1, 5], 2).is_err());
    }

    #[test]
    fn quartile_map_pinned_values() {
        let d = (2.0, 5.0, 10.0);
        let t = (0.5, 1.0, 2.0);
        assert!((quartile_map(10.0, d, t) - 1.9375).abs() < 1e-12);
        assert!((quartile_map(5.0, d, t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_sorted_interpolates() {
        let s = [2.0, 2.0, 5.0, 10.0, 10.0];
        assert_eq!(quantile_sorted(&s, 0.25).unwrap(), 2.0);
        assert_eq!(quantile_sorted(&s, 0.5).unwrap(), 5.0);
        assert_eq!(quantile_sorted(&s, 0.75).unwrap(), 10.0);
        assert_eq!(quantile_sorted(&[1.0, 2.0], 0.5).unwrap(), 1.5);
    }

    #[test]
    fn quantile_normalize_anchors_median() {
        let raw: Vec<f64> = (0..101).map(|i| 0.3 + i as f64 * 0.07).collect();
        let adj = quantile_normalize_f(&raw, 1, 498).unwrap();
        let mut sorted = adj.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let med = quantile_sorted(&sorted, 0.5).unwrap();
        assert!((med - f_quantile(0.5, 1, 498).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn quantile_normalize_rejects_zero_iqr() {
        assert!(quantile_normalize_f(&[1.0; 10], 1, 10).is_err());
    }

    proptest! {
        #[test]
        fn anova_is_shift_and_scale_invariant(
            vals in prop::collection::vec(-5.0f64..5.0, 9),
            shift in -10.0f64..10.0,
            scale in 0.1f64..10.0,
        ) {
            let labels = [0, 1, 2, 0, 1, 2, 0, 1, 2];
            let base = anova_f(&vals, &labels, 3).unwrap();
            let moved: Vec<f64> = vals.iter().map(|v| v * scale + shift).collect();
            let trans = anova_f(&moved, &labels, 3).unwrap();
            if !base.degenerate && !trans.degenerate {
                prop_assert!((base.value - trans.value).abs() < 1e-6 * base.value.max(1.0));
            }
        }

        #[test]
        fn quantile_normalize_is_monotone(
            mut raw in prop::collection::vec(0.0f64..50.0, 8..60),
        ) {
            raw.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assume!(raw[raw.len() - 1] - raw[0] > 1e-6);
            if let Ok(adj) = quantile_normalize_f(&raw, 2, 30) {
                for w in adj.windows(2) {
                    prop_assert!(w[0] <= w[1] + 1e-12);
                }
            }
        }
    }
}
