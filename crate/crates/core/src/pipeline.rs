//! Social-network pipeline: homophily attribute and weights from node
//! metadata, then an optional configuration-model counterpart.

use thiserror::Error;

use crate::analysis::{analyze, Analysis, AnalysisError};
use crate::generators::{assign_bernoulli_weights, configuration_rewire, derive_seed, GeneratorError};
use crate::graph::{Graph, GraphError};
use crate::ingest::{derive_homophily_weights, derive_prop_own, IngestError, MetadataTable};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// An analyzed network together with the graph the analysis ran on.
#[derive(Debug, Clone)]
pub struct PipelineNetwork {
    pub graph: Graph,
    /// Fraction of weight-2 edges.
    pub p2: f64,
    pub analysis: Analysis,
}

/// Attribute = share of friends with the same `attribute_column` value;
/// weight 2 on edges whose endpoints share a reported `weight_column` value.
pub fn build_network(
    g: &Graph,
    metadata: &MetadataTable,
    attribute_column: &str,
    weight_column: &str,
) -> Result<PipelineNetwork, PipelineError> {
    let attributes = derive_prop_own(g, metadata, attribute_column)?;
    let (weighted, p2) = derive_homophily_weights(g, metadata, weight_column)?;
    let graph = weighted.with_attributes(attributes)?;
    let analysis = analyze(&graph)?;
    Ok(PipelineNetwork {
        graph,
        p2,
        analysis,
    })
}

/// Rewires `net` with the configuration model, keeping every node's
/// attribute and drawing fresh Bernoulli(p2) weights.
pub fn config_counterpart(net: &PipelineNetwork, seed: u64) -> Result<PipelineNetwork, PipelineError> {
    let rewired = configuration_rewire(&net.graph, seed)?;
    let graph = assign_bernoulli_weights(&rewired, net.p2, derive_seed(seed, 1))?;
    let analysis = analyze(&graph)?;
    let heavy = graph.edges().filter(|&(_, _, w)| w == 2.0).count();
    Ok(PipelineNetwork {
        p2: heavy as f64 / graph.edge_count().max(1) as f64,
        graph,
        analysis,
    })
}
