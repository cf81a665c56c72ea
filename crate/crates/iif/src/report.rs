//! Structured, versioned JSON reports for pipeline runs.
//!
//! A [`RunReport`] captures everything needed to audit or reproduce a fit:
//! the configuration echo, the final and initialization-stage outputs, the
//! per-iteration trace, optional quality metrics against supplied ground
//! truth, and wall-clock timings. Reports serialize to pretty-printed JSON
//! with a stable field order, so parsing a report and re-emitting it is
//! byte-identical.
//!
//! Labels and feature indices are 1-based in reports, matching the label
//! and feature files the command-line tool writes; the in-memory pipeline
//! API is 0-based.

use serde::{Deserialize, Serialize};

use crate::metrics::{accuracy, ari, feature_metrics, FeatureSelectionReport};
use crate::pipeline::{InitRecord, IterationRecord, PipelineConfig, PipelineResult, TerminatedBy};
use crate::Result;

/// Version stamp written into every report.
pub const SCHEMA_VERSION: u32 = 1;

/// Where the fitted matrix came from and how it was preprocessed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    /// Path as given on the command line (or a caller-chosen name).
    pub path: String,
    /// Observations after ingestion.
    pub n: usize,
    /// Features after ingestion.
    pub p: usize,
    /// Whether log(1 + x) was applied elementwise.
    pub log1p: bool,
    /// Whether the file was transposed on load.
    pub transpose: bool,
}

/// Quality of the run against supplied ground truth. Every field is
/// optional because label truth and feature truth arrive independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct MetricsBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ari: Option<f64>,
    /// Accuracy of the initialization-stage labels, for before/after
    /// comparisons.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_ari: Option<f64>,
    /// Selection rates of the final feature set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub features: Option<FeatureSelectionReport>,
    /// Selection rates of the initialization-stage feature set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_features: Option<FeatureSelectionReport>,
}

/// Wall-clock stage durations in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load_seconds: f64,
    pub fit_seconds: f64,
    pub total_seconds: f64,
}

/// Complete record of one pipeline fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub library_version: String,
    /// Echo of `config.seed`, hoisted for quick grepping.
    pub seed: u64,
    pub k: usize,
    pub input: InputEcho,
    pub config: PipelineConfig,
    /// Final cluster of each observation, values in 1..=k.
    pub labels: Vec<usize>,
    /// Final selected features, 1-based.
    pub selected_features: Vec<usize>,
    /// Initialization-stage cluster labels, values in 1..=k.
    pub init_labels: Vec<usize>,
    /// Initialization-stage selection, 1-based.
    pub init_features: Vec<usize>,
    pub init: InitRecord,
    pub trace: Vec<IterationRecord>,
    pub terminated_by: TerminatedBy,
    /// Present only when ground truth was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsBlock>,
    pub timings: Timings,
}

impl RunReport {
    /// Assemble a report from a pipeline result, shifting labels and
    /// feature indices to the 1-based external convention.
    pub fn new(
        input: InputEcho,
        k: usize,
        config: PipelineConfig,
        result: &PipelineResult,
        metrics: Option<MetricsBlock>,
        timings: Timings,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            library_version: env!("CARGO_PKG_VERSION").to_owned(),
            seed: config.seed,
            k,
            input,
            labels: result.labels.iter().map(|&l| l + 1).collect(),
            selected_features: result.features.indices.iter().map(|&j| j + 1).collect(),
            init_labels: result.init_labels.iter().map(|&l| l + 1).collect(),
            init_features: result
                .init_features
                .indices
                .iter()
                .map(|&j| j + 1)
                .collect(),
            init: result.init.clone(),
            trace: result.trace.clone(),
            terminated_by: result.terminated_by,
            metrics,
            config,
            timings,
        }
    }

    /// Pretty-printed JSON with a trailing newline. Emission is
    /// deterministic: field order follows the struct definition.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Parse a report produced by [`RunReport::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Build the metrics block for whatever ground truth is available; `None`
/// when neither labels nor features were supplied. Truth inputs are
/// 0-based, as in the pipeline API.
pub fn metrics_block(
    result: &PipelineResult,
    true_labels: Option<&[usize]>,
    true_features: Option<&[usize]>,
    p: usize,
) -> Result<Option<MetricsBlock>> {
    if true_labels.is_none() && true_features.is_none() {
        return Ok(None);
    }
    let mut block = MetricsBlock::default();
    if let Some(truth) = true_labels {
        block.accuracy = Some(accuracy(&result.labels, truth)?);
        block.ari = Some(ari(&result.labels, truth)?);
        block.init_accuracy = Some(accuracy(&result.init_labels, truth)?);
        block.init_ari = Some(ari(&result.init_labels, truth)?);
    }
    if let Some(truth) = true_features {
        block.features = Some(feature_metrics(&result.features.indices, truth, p)?);
        block.init_features = Some(feature_metrics(
            &result.init_features.indices,
            truth,
            p,
        )?);
    }
    Ok(Some(block))
}
