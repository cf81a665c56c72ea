//! Kolmogorov-Smirnov departure from the standard normal.
//!
//! Each standardized column is compared against the N(0,1) CDF. The exact
//! supremum over the empirical step function is attained at a data point,
//! approached from one side or the other, so it suffices to check both
//! one-sided gaps at every sorted observation.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::stats::dist::normal_cdf;
use crate::stats::null::NullTable;
use crate::{Error, Result};

static PVALUE_CALLS: AtomicU64 = AtomicU64::new(0);

/// How many times [`ks_pvalues`] has run in this process. A pipeline run
/// performs the conversion exactly once, however many iterations follow;
/// this counter lets integration tests assert that.
pub fn ks_pvalue_calls() -> u64 {
    PVALUE_CALLS.load(Ordering::Relaxed)
}

/// Raw KS score: sqrt(n) times the exact supremum distance between the
/// empirical CDF of `values` and the standard normal CDF.
///
/// The caller is expected to have standardized the column.
pub fn ks_score(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "KS score needs at least 2 values, got {n}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in KS input".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nf = n as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let phi = normal_cdf(x);
        let above = (i + 1) as f64 / nf - phi;
        let below = phi - i as f64 / nf;
        sup = sup.max(above).max(below);
    }
    Ok(nf.sqrt() * sup)
}

/// Z-score a vector of raw KS scores across features (population divisor).
/// Errors if the scores are constant: a screen where every feature looks
/// identical carries no ranking information.
pub fn standardize_ks(scores: &[f64]) -> Result<Vec<f64>> {
    let mut out = scores.to_vec();
    crate::stats::standardize_values(&mut out)?;
    Ok(out)
}

/// Convert standardized KS scores to upper-tail p-values against a Monte
/// Carlo reference table, with the add-one continuity correction.
pub fn ks_pvalues(standardized: &[f64], table: &NullTable) -> Result<Vec<f64>> {
    if standardized.is_empty() {
        return Err(Error::Degenerate("no scores to convert".into()));
    }
    if standardized.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite standardized score".into()));
    }
    PVALUE_CALLS.fetch_add(1, Ordering::Relaxed);
    Ok(standardized.iter().map(|&s| table.upper_pvalue(s)).collect())
}
