//! Feature selection by fuzzy feature clustering followed by greedy forward
//! search on a fused global-separability / local-consistency score.
//!
//! The pipeline:
//!
//! 1. [`dataset`] loads a CSV, imputes missing cells and min-max scales the
//!    features into a [`FuzzyDecisionSystem`].
//! 2. [`clustering`] groups redundant features with fuzzy C-means.
//! 3. [`selection`] picks at most one feature per group, scoring candidates
//!    with [`separability`] (global) and [`consistency`] (local) measures.
//! 4. [`evaluation`] cross-validates the result with a KNN classifier and
//!    compares methods with Friedman statistics.

pub mod clustering;
pub mod consistency;
pub mod dataset;
pub mod error;
pub mod evaluation;
mod membership;
pub mod selection;
pub mod separability;

pub use clustering::{FcmConfig, FcmState, FeatureGroups};
pub use consistency::{ConsistencyConfig, FuzzyRelation, SimilarityStructure};
pub use dataset::{FuzzyDecisionSystem, LabelColumn, RawTable};
pub use error::{FcsscError, Result};
pub use evaluation::{EvalReport, FoldPlan, RankTable};
pub use selection::{fcssc, ClusteringMode, SelectionTrace, SelectorConfig};
