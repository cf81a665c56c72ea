//! Iterative influential-feature selection and clustering.
//!
//! High-dimensional clustering pipelines often fail because the class
//! structure lives in a small set of columns. This crate screens features
//! with a pair of per-feature tests, keeps those passing an adaptive
//! Higher-Criticism threshold, embeds the survivors, clusters the
//! embedding, and feeds the labels back into the screen until the
//! selected set stabilizes.

pub mod clustering;
pub mod datagen;
pub mod embedding;
pub mod error;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod screening;
pub mod seeds;
pub mod stats;

pub use error::{Error, Result};

/// The user guide, rendered from `book/` and compiled as doc-tests so
/// every snippet in it keeps building against the current API.
#[cfg(any(doc, doctest))]
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/scoring.md")]
    pub mod scoring_features {}
    #[doc = include_str!("../../../book/src/selection.md")]
    pub mod choosing_a_threshold {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    pub mod embedding_and_clustering {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    pub mod the_iterative_pipeline {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    pub mod benchmarks_and_metrics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod command_line_interface {}
}
