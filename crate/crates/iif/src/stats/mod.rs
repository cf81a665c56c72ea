//! Per-feature test statistics and their reference distributions.

pub mod anova;
pub mod dist;
pub mod ks;
pub mod null;

pub use anova::{anova_f, quantile_normalize_f, FScore, F_CAP};
pub use dist::{f_cdf, f_quantile, normal_cdf, normal_quantile};
pub use ks::{ks_pvalue_calls, ks_pvalues, ks_score, standardize_ks};
pub use null::{
    f_null_cached, ks_null_cached, ks_null_table, sample_null_f, NullTable,
    DEFAULT_F_NULL_DRAWS, DEFAULT_KS_NULL_COLUMNS,
};

use crate::{Error, Result};

/// Standardize `values` in place to mean 0 and variance 1, dividing by the
/// count (population convention). Errors on fewer than two values, any
/// non-finite value, or zero variance.
pub fn standardize_values(values: &mut [f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::Degenerate(format!(
            "standardization needs at least 2 values, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite value in standardization".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(Error::Degenerate("zero variance in standardization".into()));
    }
    let sd = var.sqrt();
    for v in values.iter_mut() {
        *v = (*v - mean) / sd;
    }
    Ok(())
}
