//! The iterative feature-selection-and-clustering loop.
//!
//! A run starts from a label-free initialization: every column is scored
//! by its departure from normality (influential features are mixtures,
//! hence non-normal), a Higher-Criticism threshold picks the initial
//! feature set, and k-means on a PCA embedding of those columns yields
//! starting labels. Each subsequent iteration then uses the current
//! labels to score features with a between-group F statistic, blends
//! that evidence with the static normality evidence — weighting the
//! label-dependent side by how trustworthy the labels currently look —
//! re-thresholds, re-embeds (linearly or via a neighbor-graph spectral
//! map), and re-clusters. The loop stops when the selected set stops
//! growing or an iteration budget runs out.
//!
//! Everything downstream of the input matrix is deterministic in the
//! configured seeds.

use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::clustering::{kmeans, KmeansConfig};
use crate::embedding::{
    column_standardize, cosine_affinity, knn_sparsify, laplacian_embed, pca_embed,
};
use crate::screening::{
    composite_scores, hct_composite, hct_ifpca, reliability_pvalue, weight_from_p1, FeatureSet,
    SelectionOrigin,
};
use crate::seeds::{derive, stream};
use crate::stats::{
    anova_f, f_cdf, f_null_cached, ks_null_cached, ks_pvalues, ks_score, quantile_normalize_f,
    standardize_ks, standardize_values, DEFAULT_F_NULL_DRAWS, DEFAULT_KS_NULL_COLUMNS,
};
use crate::{Error, Result};

/// Embedding used inside the iteration loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Principal-component embedding of the selected columns.
    Pca,
    /// Spectral embedding of the cosine-affinity neighbor graph.
    Lap,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Pca => "pca",
            Variant::Lap => "lap",
        })
    }
}

/// Knobs for the graph embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    /// Affinity bandwidth: A = exp(-gamma * d^2).
    pub gamma: f64,
    /// Neighbors kept per observation (symmetric union).
    pub n_neighbors: usize,
    /// Eigenpair residual tolerance and isolated-node self-loop weight.
    pub eig_tol: f64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            n_neighbors: 8,
            eig_tol: 1e-8,
        }
    }
}

/// Full pipeline configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub variant: Variant,
    /// Iteration budget (the loop always executes at least once).
    pub max_iter: usize,
    /// Stop once the feature-set change ratio falls to this or below.
    pub stop_ratio: f64,
    /// Weight floor parameter: full label distrust still leaves c/(1+c)
    /// of the blend on the label-dependent score.
    pub c: f64,
    /// Master seed for everything data-dependent (k-means restarts).
    pub seed: u64,
    /// Count removals as well as additions in the change ratio.
    pub symmetric_ratio: bool,
    /// Score features against the initialization labels every iteration
    /// instead of the latest labels (pinned alternative reading of the
    /// scoring step; off by default).
    pub f_under_init_labels: bool,
    /// Seed for the Monte-Carlo null tables. Kept separate from `seed`
    /// so every run shares one cached table per (n, K) shape.
    pub null_seed: u64,
    /// Monte-Carlo columns behind the normality-score p-values.
    pub ks_null_columns: usize,
    /// Monte-Carlo draws behind the F reference distribution.
    pub f_null_draws: usize,
    pub embedding: EmbeddingConfig,
    pub kmeans: KmeansSettings,
}

/// K-means knobs exposed on the pipeline config; the per-call seed is
/// derived from the pipeline seed, not set here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmeansSettings {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for KmeansSettings {
    fn default() -> Self {
        let base = KmeansConfig::default();
        Self {
            restarts: base.restarts,
            max_iter: base.max_iter,
            tol: base.tol,
        }
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Lap,
            max_iter: 10,
            stop_ratio: 0.10,
            c: 0.6,
            seed: 0,
            symmetric_ratio: false,
            f_under_init_labels: false,
            null_seed: 0,
            ks_null_columns: DEFAULT_KS_NULL_COLUMNS,
            f_null_draws: DEFAULT_F_NULL_DRAWS,
            embedding: EmbeddingConfig::default(),
            kmeans: KmeansSettings::default(),
        }
    }
}

impl PipelineConfig {
    fn kmeans_config(&self, seed: u64) -> KmeansConfig {
        KmeansConfig {
            restarts: self.kmeans.restarts,
            max_iter: self.kmeans.max_iter,
            tol: self.kmeans.tol,
            seed,
        }
    }
}

/// Embedding dimension at initialization.
const INIT_EMBED_DIM_BELOW_K: usize = 1; // d = K - 1
/// Embedding dimension inside the loop.
const LOOP_EMBED_DIM_ABOVE_K: usize = 2; // d = K + 2

/// Carried state between iterations.
#[derive(Debug, Clone)]
pub struct PipelineState {
    /// Current cluster of each observation, values in `0..k`.
    pub labels: Vec<usize>,
    /// Currently selected features.
    pub features: FeatureSet,
    /// Normality p-values per feature, computed once at initialization
    /// and reused by every iteration.
    pub p_ks: Arc<Vec<f64>>,
    /// Labels from the initialization (kept for the pinned scoring mode
    /// and for baseline comparisons).
    pub init_labels: Arc<Vec<usize>>,
    /// Features from the initialization.
    pub init_features: FeatureSet,
}

/// Diagnostics of the initialization stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitRecord {
    pub n_selected: usize,
    pub inertia: f64,
    /// The threshold scan found no feasible rank and fell back to the
    /// top sqrt(p) features.
    pub fallback: bool,
    /// Constant columns excluded from scoring.
    pub n_constant: usize,
}

/// Diagnostics of one loop iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    pub n_selected: usize,
    pub change_ratio: f64,
    /// Label-trust weight before normalization, in [c/(1+c), 1].
    pub raw_w: f64,
    /// Unit-norm version actually multiplying the F evidence.
    pub omega: f64,
    /// Tail probability that the previous selection's F p-values look
    /// uniform (small = labels are informative).
    pub p1: f64,
    /// Composite-score threshold chosen by the scan.
    pub threshold: f64,
    pub inertia: f64,
    pub fallback: bool,
    /// Reliability was pinned because fewer than 8 features carried over.
    pub degraded: bool,
}

/// Why the loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminatedBy {
    Converged,
    MaxIter,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    /// Final cluster labels, values in `0..k`.
    pub labels: Vec<usize>,
    /// Final selected features.
    pub features: FeatureSet,
    /// Labels straight out of the initialization.
    pub init_labels: Vec<usize>,
    /// Features straight out of the initialization.
    pub init_features: FeatureSet,
    pub init: InitRecord,
    pub trace: Vec<IterationRecord>,
    pub terminated_by: TerminatedBy,
}

fn validate_inputs(x: &Array2<f64>, k: usize, cfg: &PipelineConfig) -> Result<()> {
    let (n, p) = x.dim();
    if k < 2 {
        return Err(Error::Domain(format!("need at least 2 clusters, got {k}")));
    }
    if n <= k {
        return Err(Error::Degenerate(format!(
            "need more observations than clusters: n={n}, k={k}"
        )));
    }
    if p < 8 {
        return Err(Error::Degenerate(format!(
            "need at least 8 features for threshold scans, got {p}"
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("data matrix must be finite".into()));
    }
    if !(cfg.stop_ratio > 0.0 && cfg.stop_ratio < 1.0) {
        return Err(Error::Domain(format!(
            "stop_ratio must lie in (0,1), got {}",
            cfg.stop_ratio
        )));
    }
    if cfg.max_iter == 0 {
        return Err(Error::Domain("max_iter must be at least 1".into()));
    }
    Ok(())
}

/// Label-free initialization.
///
/// Scores every column by its standardized departure from normality,
/// converts the scores to Monte-Carlo p-values (cached in `state.p_ks`
/// for all later iterations), selects features by the label-free
/// threshold scan, embeds them linearly with d = K-1, and clusters.
/// Constant columns carry no class information and receive the minimal
/// score, so they are never selected.
pub fn ifpca_init(
    x: &Array2<f64>,
    k: usize,
    cfg: &PipelineConfig,
) -> Result<(PipelineState, InitRecord)> {
    validate_inputs(x, k, cfg)?;
    let (n, p) = x.dim();

    let mut n_constant = 0usize;
    let mut psi = vec![0.0; p];
    let mut col = Vec::with_capacity(n);
    for j in 0..p {
        col.clear();
        col.extend(x.column(j).iter());
        match standardize_values(&mut col) {
            Ok(()) => psi[j] = ks_score(&col)?,
            Err(_) => {
                psi[j] = 0.0;
                n_constant += 1;
            }
        }
    }

    let table = ks_null_cached(n, cfg.ks_null_columns, cfg.null_seed)?;
    let standardized = standardize_ks(&psi)?;
    let p_ks = ks_pvalues(&standardized, &table)?;

    let scan = hct_ifpca(&standardized, &p_ks, n)?;
    let features = FeatureSet::new(scan.selected.indices.clone(), SelectionOrigin::Init);

    let w = column_standardize(x, &features.indices)?;
    let embed = pca_embed(&w, k - INIT_EMBED_DIM_BELOW_K)?;
    let km = kmeans(
        &embed.coords,
        k,
        &cfg.kmeans_config(derive(cfg.seed, stream::KMEANS, 0)),
    )?;

    let record = InitRecord {
        n_selected: features.len(),
        inertia: km.inertia,
        fallback: scan.fallback,
        n_constant,
    };
    let state = PipelineState {
        labels: km.labels.clone(),
        features: features.clone(),
        p_ks: Arc::new(p_ks),
        init_labels: Arc::new(km.labels),
        init_features: features,
    };
    Ok((state, record))
}

/// Growth of the selected set relative to its previous size:
/// |next \ prev| / |prev|, plus |prev \ next| in the numerator when
/// `symmetric` is set.
pub fn change_ratio(prev: &FeatureSet, next: &FeatureSet, symmetric: bool) -> Result<f64> {
    if prev.is_empty() {
        return Err(Error::Degenerate("previous feature set is empty".into()));
    }
    let added = next
        .indices
        .iter()
        .filter(|&&j| !prev.contains(j))
        .count();
    let removed = if symmetric {
        prev.indices
            .iter()
            .filter(|&&j| !next.contains(j))
            .count()
    } else {
        0
    };
    Ok((added + removed) as f64 / prev.len() as f64)
}

/// One loop iteration: score features under the current labels, blend
/// with the cached normality evidence, re-threshold, re-embed, and
/// re-cluster. `t` is the 1-based iteration number (it seeds k-means and
/// tags the new feature set).
pub fn iterate_once(
    x: &Array2<f64>,
    k: usize,
    state: &PipelineState,
    cfg: &PipelineConfig,
    t: usize,
) -> Result<(PipelineState, IterationRecord)> {
    let (n, p) = x.dim();
    let labels: &[usize] = if cfg.f_under_init_labels {
        &state.init_labels
    } else {
        &state.labels
    };
    let mut class_seen = vec![false; k];
    for &l in labels {
        if l >= k {
            return Err(Error::Label(format!("label {l} out of range for k={k}")));
        }
        class_seen[l] = true;
    }
    if let Some(missing) = class_seen.iter().position(|&s| !s) {
        return Err(Error::Label(format!(
            "class {missing} vanished from the labeling; cannot form the \
             between-group statistic (iteration {t})"
        )));
    }

    // (a) Between-group evidence for every feature under current labels.
    let mut raw_f = Vec::with_capacity(p);
    let mut col = Vec::with_capacity(n);
    for j in 0..p {
        col.clear();
        col.extend(x.column(j).iter());
        raw_f.push(anova_f(&col, labels, k)?.value);
    }
    let df1 = (k - 1) as u64;
    let df2 = (n - k) as u64;
    let f_adj = quantile_normalize_f(&raw_f, df1, df2)?;

    let f_table = f_null_cached(df1, df2, cfg.f_null_draws, cfg.null_seed)?;
    // Strict-open clamp: the composite transform needs p-values inside
    // (0,1), and the theoretical CDF hits the boundary for adjusted
    // values at or below 0. The clamp width matches the Monte-Carlo
    // resolution of the null tables.
    let eps = 1.0 / (cfg.f_null_draws as f64 + 1.0);
    let p_f: Vec<f64> = f_adj
        .iter()
        .map(|&v| (1.0 - f_cdf(v, df1, df2)).clamp(eps, 1.0 - eps))
        .collect();

    // (b) How uniform do the carried-over features' p-values look under
    // the Monte-Carlo F reference? Uniform = labels are uninformative.
    let pi: Vec<f64> = state
        .features
        .indices
        .iter()
        .map(|&m| f_table.tail_fraction(f_adj[m]))
        .collect();
    let reliability = reliability_pvalue(&pi)?;
    let weight = weight_from_p1(reliability.p1, cfg.c)?;

    // (c) Blend and re-threshold.
    let composite = composite_scores(&p_f, &state.p_ks, &weight)?;
    let scan = hct_composite(
        &composite.scores,
        &composite.pvalues,
        SelectionOrigin::Iteration(t),
    )?;
    let features = scan.selected.clone();
    let ratio = change_ratio(&state.features, &features, cfg.symmetric_ratio)?;

    // (d) Embed the selected columns and re-cluster.
    let w = column_standardize(x, &features.indices)?;
    let d = k + LOOP_EMBED_DIM_ABOVE_K;
    let coords = match cfg.variant {
        Variant::Pca => pca_embed(&w, d.min(n))?.coords,
        Variant::Lap => {
            let affinity = cosine_affinity(&w, cfg.embedding.gamma)?;
            let sparse = knn_sparsify(&affinity, cfg.embedding.n_neighbors)?;
            laplacian_embed(&sparse, d.min(n - 1), cfg.embedding.eig_tol)?.coords
        }
    };
    let km = kmeans(
        &coords,
        k,
        &cfg.kmeans_config(derive(cfg.seed, stream::KMEANS, t as u64)),
    )?;

    let record = IterationRecord {
        t,
        n_selected: features.len(),
        change_ratio: ratio,
        raw_w: weight.raw,
        omega: weight.normalized,
        p1: reliability.p1,
        threshold: scan.threshold,
        inertia: km.inertia,
        fallback: scan.fallback,
        degraded: reliability.degraded,
    };
    let new_state = PipelineState {
        labels: km.labels,
        features,
        p_ks: Arc::clone(&state.p_ks),
        init_labels: Arc::clone(&state.init_labels),
        init_features: state.init_features.clone(),
    };
    Ok((new_state, record))
}

/// Full run: initialization, then iterations until the selected set
/// stabilizes (change ratio ≤ `stop_ratio`) or `max_iter` is reached.
/// The stop check runs after each iteration, so at least one iteration
/// always executes; reaching the budget with a passing final ratio
/// still counts as converged.
pub fn run(x: &Array2<f64>, k: usize, cfg: &PipelineConfig) -> Result<PipelineResult> {
    let (mut state, init) = ifpca_init(x, k, cfg)?;
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut terminated_by = TerminatedBy::MaxIter;
    for t in 1..=cfg.max_iter {
        let (next, record) = iterate_once(x, k, &state, cfg, t)?;
        state = next;
        let converged = record.change_ratio <= cfg.stop_ratio;
        trace.push(record);
        if converged {
            terminated_by = TerminatedBy::Converged;
            break;
        }
    }
    Ok(PipelineResult {
        labels: state.labels,
        features: state.features,
        init_labels: state.init_labels.as_ref().clone(),
        init_features: state.init_features,
        init,
        trace,
        terminated_by,
    })
}
