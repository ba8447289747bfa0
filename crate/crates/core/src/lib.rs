//! Friendship Paradox gaps on weighted undirected graphs.
//!
//! The crate computes the eight gap versions (list/singular × plain/weighted ×
//! with/without node attributes), the correlations whose signs decide the
//! attribute versions, a brute-force oracle for cross-checking, and the random
//! graph machinery needed to run condition sweeps.

pub mod analysis;
pub mod correlation;
pub mod generators;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod oracle;
pub mod pipeline;
pub mod simulation;
pub mod stats;

pub use analysis::{analyze, Analysis, AnalysisError};
pub use correlation::{
    check_sign_consistency, pearson, sign_rule_report, Correlation, CorrelationReport, Prediction,
    SignConsistency,
};
pub use graph::{Graph, GraphClass, GraphError, NodeQuantities};
pub use metrics::{full_report, GapReport, GapValue, Paradox, Verdict};
