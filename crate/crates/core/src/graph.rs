//! Weighted undirected simple graphs with optional node attributes.
//!
//! Nodes are dense `0..n` indices. Adjacency is kept as one sorted neighbor
//! list per node, each entry carrying the edge weight, so `weight(i, j)` is a
//! binary search and every per-node sum is a single pass over the list.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance used when deciding whether two weighted degrees are equal.
const WEIGHTED_REGULAR_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("edge {{{0}, {1}}} has non-positive or non-finite weight {2}")]
    NonPositiveWeight(usize, usize, f64),
    #[error("edge {{{0}, {1}}} references a node outside 0..{2}")]
    IndexOutOfRange(usize, usize, usize),
    #[error("node {0} is isolated; drop isolates first")]
    IsolatePresent(usize),
    #[error("expected {expected} attribute values, got {got}")]
    AttributeLengthMismatch { expected: usize, got: usize },
    #[error("attribute of node {0} is not finite")]
    NonFiniteAttribute(usize),
    #[error("expected {expected} labels, got {got}")]
    LabelLengthMismatch { expected: usize, got: usize },
}

/// A weighted undirected graph without self-loops or parallel edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: Vec<Vec<(usize, f64)>>,
    edge_count: usize,
    attributes: Option<Vec<f64>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a validated graph on nodes `0..n` from `(i, j, weight)` triples.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(GraphError::IndexOutOfRange(i, j, n));
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(GraphError::NonPositiveWeight(i, j, w));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(GraphError::DuplicateEdge(i, j));
            }
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
        }
        for list in &mut adjacency {
            list.sort_unstable_by_key(|&(j, _)| j);
        }
        Ok(Self {
            adjacency,
            edge_count: seen.len(),
            attributes: None,
            labels: None,
        })
    }

    /// Same as [`Graph::from_edges`] followed by [`Graph::with_attributes`].
    pub fn build(
        n: usize,
        edges: &[(usize, usize, f64)],
        attributes: Option<Vec<f64>>,
    ) -> Result<Self, GraphError> {
        let g = Self::from_edges(n, edges.iter().copied())?;
        match attributes {
            Some(a) => g.with_attributes(a),
            None => Ok(g),
        }
    }

    pub fn with_attributes(mut self, attributes: Vec<f64>) -> Result<Self, GraphError> {
        self.set_attributes(Some(attributes))?;
        Ok(self)
    }

    pub fn set_attributes(&mut self, attributes: Option<Vec<f64>>) -> Result<(), GraphError> {
        if let Some(a) = &attributes {
            check_attributes(a, self.node_count())?;
        }
        self.attributes = attributes;
        Ok(())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.node_count() {
            return Err(GraphError::LabelLengthMismatch {
                expected: self.node_count(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn attributes(&self) -> Option<&[f64]> {
        self.attributes.as_deref()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External label of node `i`, falling back to its index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(labels) => labels[i].clone(),
            None => i.to_string(),
        }
    }

    /// Neighbors of `i` in ascending index order, with edge weights.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Edge weight, or 0 when `{i, j}` is not an edge.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let list = &self.adjacency[i];
        match list.binary_search_by_key(&j, |&(k, _)| k) {
            Ok(pos) => list[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Every edge once as `(i, j, weight)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .filter(move |&&(j, _)| i < j)
                .map(move |&(j, w)| (i, j, w))
        })
    }

    pub fn has_unit_weights(&self) -> bool {
        self.edges().all(|(_, _, w)| w == 1.0)
    }

    /// Copy of the graph with each edge weight replaced by `f(i, j, w)`.
    ///
    /// `f` is called once per edge in [`Graph::edges`] order.
    pub fn reweighted<F>(&self, mut f: F) -> Result<Self, GraphError>
    where
        F: FnMut(usize, usize, f64) -> f64,
    {
        let edges: Vec<_> = self.edges().map(|(i, j, w)| (i, j, f(i, j, w))).collect();
        let mut g = Self::from_edges(self.node_count(), edges)?;
        g.attributes = self.attributes.clone();
        g.labels = self.labels.clone();
        Ok(g)
    }

    /// Copy with every edge weight set to 1.
    pub fn unit_weights(&self) -> Self {
        let mut g = self.clone();
        for list in &mut g.adjacency {
            for entry in list.iter_mut() {
                entry.1 = 1.0;
            }
        }
        g
    }

    pub fn isolates(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&i| self.adjacency[i].is_empty())
    }

    pub fn component_count(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Degree, weighted degree, delta and gamma of every node.
    pub fn node_quantities(&self) -> Result<NodeQuantities, GraphError> {
        if let Some(i) = self.isolates().next() {
            return Err(GraphError::IsolatePresent(i));
        }
        let degree: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        let weighted_degree: Vec<f64> = self
            .adjacency
            .iter()
            .map(|list| list.iter().map(|&(_, w)| w).sum())
            .collect();
        let delta = self
            .adjacency
            .iter()
            .map(|list| list.iter().map(|&(j, _)| 1.0 / degree[j] as f64).sum())
            .collect();
        let gamma = self
            .adjacency
            .iter()
            .map(|list| list.iter().map(|&(j, w)| w / weighted_degree[j]).sum())
            .collect();
        Ok(NodeQuantities {
            degree,
            weighted_degree,
            delta,
            gamma,
        })
    }

    pub fn classify(&self) -> GraphClass {
        let n = self.node_count();
        let degrees: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        let weighted: Vec<f64> = self
            .adjacency
            .iter()
            .map(|list| list.iter().map(|&(_, w)| w).sum())
            .collect();
        let regular = degrees.windows(2).all(|p| p[0] == p[1]);
        let scale = weighted.iter().fold(0.0_f64, |m, &w| m.max(w.abs()));
        let weighted_regular = weighted
            .windows(2)
            .all(|p| (p[0] - p[1]).abs() <= WEIGHTED_REGULAR_RTOL * scale);
        let isolate_count = degrees.iter().filter(|&&d| d == 0).count();
        GraphClass {
            nodes: n,
            edges: self.edge_count,
            connected: self.is_connected(),
            regular,
            weighted_regular,
            has_isolates: isolate_count > 0,
            isolate_count,
        }
    }

    /// Induced subgraph on the non-isolated nodes, reindexed densely.
    ///
    /// Attributes and labels follow their nodes.
    pub fn drop_isolates(&self) -> Result<IsolateFiltered, GraphError> {
        let kept: Vec<usize> = (0..self.node_count())
            .filter(|&i| !self.adjacency[i].is_empty())
            .collect();
        if kept.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let dropped = self.node_count() - kept.len();
        if dropped == 0 {
            return Ok(IsolateFiltered {
                graph: self.clone(),
                dropped: 0,
                kept,
            });
        }
        let mut new_index = vec![usize::MAX; self.node_count()];
        for (new, &old) in kept.iter().enumerate() {
            new_index[old] = new;
        }
        let adjacency = kept
            .iter()
            .map(|&old| {
                self.adjacency[old]
                    .iter()
                    .map(|&(j, w)| (new_index[j], w))
                    .collect()
            })
            .collect();
        let graph = Graph {
            adjacency,
            edge_count: self.edge_count,
            attributes: self
                .attributes
                .as_ref()
                .map(|a| kept.iter().map(|&i| a[i]).collect()),
            labels: self
                .labels
                .as_ref()
                .map(|l| kept.iter().map(|&i| l[i].clone()).collect()),
        };
        Ok(IsolateFiltered {
            graph,
            dropped,
            kept,
        })
    }
}

fn check_attributes(a: &[f64], n: usize) -> Result<(), GraphError> {
    if a.len() != n {
        return Err(GraphError::AttributeLengthMismatch {
            expected: n,
            got: a.len(),
        });
    }
    if let Some(i) = a.iter().position(|x| !x.is_finite()) {
        return Err(GraphError::NonFiniteAttribute(i));
    }
    Ok(())
}

/// Result of [`Graph::drop_isolates`].
#[derive(Debug, Clone)]
pub struct IsolateFiltered {
    pub graph: Graph,
    pub dropped: usize,
    /// `kept[new_index]` is the node's index in the original graph.
    pub kept: Vec<usize>,
}

/// Per-node first-order quantities.
///
/// * `degree[i]` = |N(i)|
/// * `weighted_degree[i]` = sum of incident edge weights
/// * `delta[i]` = sum over neighbors j of 1/d_j
/// * `gamma[i]` = sum over neighbors j of e_ij/w_j
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeQuantities {
    pub degree: Vec<usize>,
    pub weighted_degree: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl NodeQuantities {
    pub fn len(&self) -> usize {
        self.degree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degree.is_empty()
    }

    pub fn degree_f64(&self) -> Vec<f64> {
        self.degree.iter().map(|&d| d as f64).collect()
    }

    /// Quantities of the same graph with every weight set to 1: w = d and γ = δ.
    pub fn unweighted(&self) -> NodeQuantities {
        NodeQuantities {
            degree: self.degree.clone(),
            weighted_degree: self.degree_f64(),
            delta: self.delta.clone(),
            gamma: self.delta.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphClass {
    pub nodes: usize,
    pub edges: usize,
    pub connected: bool,
    pub regular: bool,
    pub weighted_regular: bool,
    pub has_isolates: bool,
    pub isolate_count: usize,
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn builds_example_path() {
        let g = example_path();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weight(1, 2), 2.0);
        assert_eq!(g.weight(2, 1), 2.0);
        assert_eq!(g.weight(0, 2), 0.0);
        assert_eq!(g.attributes(), Some(&[2.0, 0.0, 1.0][..]));
    }

    #[test]
    fn rejects_malformed_edges() {
        assert_eq!(
            Graph::build(2, &[(0, 1, 1.0), (0, 1, 1.0)], None),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Graph::build(2, &[(0, 1, 1.0), (1, 0, 3.0)], None),
            Err(GraphError::DuplicateEdge(1, 0))
        );
        assert_eq!(
            Graph::build(1, &[(0, 0, 1.0)], None),
            Err(GraphError::SelfLoop(0))
        );
        assert_eq!(
            Graph::build(2, &[(0, 1, 0.0)], None),
            Err(GraphError::NonPositiveWeight(0, 1, 0.0))
        );
        assert!(matches!(
            Graph::build(2, &[(0, 1, f64::NAN)], None),
            Err(GraphError::NonPositiveWeight(0, 1, _))
        ));
        assert_eq!(
            Graph::build(2, &[(0, 2, 1.0)], None),
            Err(GraphError::IndexOutOfRange(0, 2, 2))
        );
        assert_eq!(Graph::build(0, &[], None), Err(GraphError::EmptyGraph));
        assert_eq!(
            Graph::build(3, &[(0, 1, 1.0)], Some(vec![1.0])),
            Err(GraphError::AttributeLengthMismatch {
                expected: 3,
                got: 1
            })
        );
    }

    #[test]
    fn quantities_of_example_path() {
        let q = example_path().node_quantities().unwrap();
        assert_eq!(q.degree, vec![1, 2, 1]);
        assert_eq!(q.weighted_degree, vec![1.0, 3.0, 2.0]);
        assert_eq!(q.delta, vec![0.5, 2.0, 0.5]);
        let expected_gamma = [1.0 / 3.0, 2.0, 2.0 / 3.0];
        for (g, e) in q.gamma.iter().zip(expected_gamma) {
            assert!((g - e).abs() < 1e-15);
        }
        assert!((q.gamma.iter().sum::<f64>() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn quantities_of_regular_and_two_node_graphs() {
        let q = cycle(4, &[1.0]).node_quantities().unwrap();
        assert_eq!(q.degree, vec![2; 4]);
        assert_eq!(q.weighted_degree, vec![2.0; 4]);
        assert_eq!(q.delta, vec![1.0; 4]);
        assert_eq!(q.gamma, vec![1.0; 4]);

        let q = Graph::build(2, &[(0, 1, 5.0)], None)
            .unwrap()
            .node_quantities()
            .unwrap();
        assert_eq!(q.degree, vec![1, 1]);
        assert_eq!(q.weighted_degree, vec![5.0, 5.0]);
        assert_eq!(q.delta, vec![1.0, 1.0]);
        assert_eq!(q.gamma, vec![1.0, 1.0]);
    }

    #[test]
    fn quantities_require_no_isolates() {
        let g = Graph::build(3, &[(0, 1, 1.0)], None).unwrap();
        assert_eq!(g.node_quantities(), Err(GraphError::IsolatePresent(2)));
    }

    #[test]
    fn classification() {
        let c = example_path().classify();
        assert!(c.connected && !c.regular && !c.weighted_regular && !c.has_isolates);

        let triangle = Graph::build(3, &[(0, 1, 1.0), (1, 2, 2.0), (2, 0, 3.0)], None).unwrap();
        let q = triangle.node_quantities().unwrap();
        assert_eq!(q.weighted_degree, vec![4.0, 3.0, 5.0]);
        let c = triangle.classify();
        assert!(c.regular && !c.weighted_regular);

        let c = cycle(4, &[1.0, 3.0]).classify();
        assert!(c.regular && c.weighted_regular);

        let two_triangles = Graph::build(
            6,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (3, 4, 1.0), (4, 5, 1.0), (5, 3, 1.0)],
            None,
        )
        .unwrap();
        assert!(!two_triangles.classify().connected);
        assert_eq!(two_triangles.component_count(), 2);
    }

    #[test]
    fn drop_isolates_reindexes_and_carries_attributes() {
        let g = Graph::build(
            4,
            &[(0, 1, 1.0), (1, 3, 2.0)],
            Some(vec![2.0, 0.0, 9.0, 1.0]),
        )
        .unwrap()
        .with_labels(["A", "B", "E", "C"].map(String::from).to_vec())
        .unwrap();
        assert_eq!(g.classify().isolate_count, 1);
        let f = g.drop_isolates().unwrap();
        assert_eq!(f.dropped, 1);
        assert_eq!(f.kept, vec![0, 1, 3]);
        let expected = example_path();
        assert_eq!(f.graph.edges().collect::<Vec<_>>(), expected.edges().collect::<Vec<_>>());
        assert_eq!(f.graph.attributes(), expected.attributes());
        assert_eq!(f.graph.labels().unwrap(), &["A", "B", "C"]);

        let f = expected.drop_isolates().unwrap();
        assert_eq!(f.dropped, 0);
        assert_eq!(f.graph, expected);

        let edgeless = Graph::build(3, &[], None).unwrap();
        assert!(matches!(edgeless.drop_isolates(), Err(GraphError::EmptyGraph)));
    }

    #[test]
    fn unit_weights_make_weighted_quantities_match_unweighted() {
        let g = Graph::build(
            5,
            &[(0, 1, 2.5), (1, 2, 1.0), (2, 3, 7.0), (3, 4, 0.5), (4, 0, 3.0), (0, 2, 4.0)],
            None,
        )
        .unwrap();
        let q = g.unit_weights().node_quantities().unwrap();
        assert_eq!(q.weighted_degree, q.degree_f64());
        assert_eq!(q.gamma, q.delta);
        assert_eq!(g.node_quantities().unwrap().unweighted(), q);
    }

    #[test]
    fn reweighted_keeps_structure() {
        let g = example_path();
        let h = g.reweighted(|_, _, w| w * 2.0).unwrap();
        assert_eq!(h.weight(0, 1), 2.0);
        assert_eq!(h.weight(2, 1), 4.0);
        assert_eq!(h.attributes(), g.attributes());
        assert!(g.reweighted(|_, _, _| -1.0).is_err());
    }
}
