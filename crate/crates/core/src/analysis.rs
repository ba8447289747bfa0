//! One-call analysis of a single graph: gaps, correlations and the sign check.

use serde::Serialize;
use thiserror::Error;

use crate::correlation::{
    check_sign_consistency, sign_rule_report, CorrelationError, CorrelationReport,
    SignConsistency,
};
use crate::graph::{Graph, GraphClass, GraphError};
use crate::metrics::{full_report_with, GapReport, MetricsError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    /// Classification of the analyzed graph (after isolates were dropped).
    pub class: GraphClass,
    pub isolates_dropped: usize,
    pub gaps: GapReport,
    pub correlations: CorrelationReport,
    pub consistency: SignConsistency,
}

/// Drops isolates, then computes every gap and correlation.
pub fn analyze(g: &Graph) -> Result<Analysis, AnalysisError> {
    let filtered = g.drop_isolates()?;
    let g = &filtered.graph;
    let q = g.node_quantities()?;
    let gaps = full_report_with(g, &q, g.attributes())?;
    let correlations = sign_rule_report(&q, g.attributes())?;
    let consistency = check_sign_consistency(&gaps, &correlations);
    Ok(Analysis {
        class: g.classify(),
        isolates_dropped: filtered.dropped,
        gaps,
        correlations,
        consistency,
    })
}
