//! Algorithm selection for collaborative filtering.
//!
//! The crate covers the whole metalearning pipeline:
//!
//! - [`dataset`]: rating datasets, loading, sampling and k-fold splits;
//! - [`graph`]: the user/item bipartite graph and the graph-theory primitives
//!   behind the graph metafeatures;
//! - [`metafeatures`]: the `object.function.postfunction` extraction framework
//!   with rating-matrix (RM), landmarker (SL), graph (GR) and comprehensive (CM)
//!   extractors;
//! - [`baselevel`]: a compact suite of CF baselearners, evaluation measures and a
//!   cross-validation harness producing performance tables;
//! - [`metatarget`]: single-measure and Pareto-frontier multicriteria rankings;
//! - [`metalearn`]: feature selection, label-ranking metalearners, LOOCV,
//!   feature importance, baselevel impact and critical-difference statistics.
//!
//! [`synth`] generates seeded synthetic corpora so the pipeline can run without
//! external data.

// `!(x > y)` is used on purpose so NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselevel;
pub mod dataset;
mod error;
pub mod graph;
pub mod metafeatures;
pub mod metalearn;
pub mod metatarget;
mod numfmt;
mod seed;
pub mod synth;

pub use error::{Error, Result};
pub use numfmt::format_sig;
pub use seed::derive_seed;
