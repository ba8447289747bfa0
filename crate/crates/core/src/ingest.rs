//! Edge-list and node-metadata ingestion, plus the homophily-based attribute
//! and weight constructions used for campus-style social networks.
//!
//! Edge lists hold one edge per line: `source target [weight]`. Fields are
//! separated by tabs, commas or runs of whitespace (detected from the first
//! data line). Blank lines and lines starting with `#` or `%` are skipped.
//!
//! Metadata files start with a header row whose first field names the node
//! label column; the remaining fields name attribute columns.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate edge {a} - {b}")]
    DuplicateEdge { line: usize, a: String, b: String },
    #[error("line {line}: self-loop on {label}")]
    SelfLoop { line: usize, label: String },
    #[error("metadata line {line}: node {label} does not appear in the graph")]
    UnknownNodeInMetadata { line: usize, label: String },
    #[error("metadata line {line}: node {label} listed twice")]
    DuplicateMetadataRow { line: usize, label: String },
    #[error("metadata has no column named {0:?}")]
    MissingColumn(String),
    #[error("node {label}: attribute value {value:?} is not a finite number")]
    NonNumericAttribute { label: String, value: String },
    #[error("node {0}: attribute value is missing")]
    MissingAttribute(String),
    #[error("edge list contains no edges")]
    NoEdges,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Tab,
    Comma,
    Whitespace,
}

impl Delimiter {
    fn detect(line: &str) -> Self {
        if line.contains('\t') {
            Delimiter::Tab
        } else if line.contains(',') {
            Delimiter::Comma
        } else {
            Delimiter::Whitespace
        }
    }

    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match self {
            Delimiter::Tab => line.split('\t').map(str::trim).collect(),
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Drop self-loops, duplicate edges and unknown metadata rows (counting
    /// them) instead of failing.
    pub lenient: bool,
    /// Metadata cell value meaning "not reported". Empty cells are always missing.
    pub missing_token: Option<String>,
    /// Force a delimiter instead of detecting one.
    pub delimiter: Option<Delimiter>,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        (!line.is_empty() && !line.starts_with('#') && !line.starts_with('%'))
            .then_some((i + 1, raw.trim_end_matches('\r')))
    })
}

/// Node metadata, one row per graph node, in node index order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetadataTable {
    columns: Vec<String>,
    rows: Vec<Vec<Option<String>>>,
}

impl MetadataTable {
    /// Table with the given columns and every value missing.
    pub fn empty(columns: Vec<String>, nodes: usize) -> Self {
        let width = columns.len();
        Self {
            columns,
            rows: vec![vec![None; width]; nodes],
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    fn column_index(&self, name: &str) -> Result<usize, IngestError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    }

    pub fn set(&mut self, node: usize, column: &str, value: Option<String>) -> Result<(), IngestError> {
        let c = self.column_index(column)?;
        self.rows[node][c] = value;
        Ok(())
    }

    /// Values of one column; `None` marks a missing value.
    pub fn column(&self, name: &str) -> Result<Vec<Option<&str>>, IngestError> {
        let c = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[c].as_deref()).collect())
    }

    /// A column parsed as finite numbers; every node must have a value.
    pub fn numeric_column(&self, name: &str, g: &Graph) -> Result<Vec<f64>, IngestError> {
        self.column(name)?
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let v = v.ok_or_else(|| IngestError::MissingAttribute(g.label(i)))?;
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| IngestError::NonNumericAttribute {
                        label: g.label(i),
                        value: v.to_string(),
                    })
            })
            .collect()
    }

    /// Rows restricted to the given original node indices.
    pub fn select(&self, kept: &[usize]) -> Self {
        Self {
            columns: self.columns.clone(),
            rows: kept.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Delimited text with a header; missing values written as `missing`.
    pub fn to_delimited(&self, g: &Graph, delimiter: char, missing: &str) -> String {
        let mut out = String::new();
        let _ = write!(out, "node");
        for c in &self.columns {
            let _ = write!(out, "{delimiter}{c}");
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&g.label(i));
            for v in row {
                out.push(delimiter);
                out.push_str(v.as_deref().unwrap_or(missing));
            }
            out.push('\n');
        }
        out
    }
}

/// A graph loaded from text, with bookkeeping about what was dropped.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    /// Graph with labels set and isolates removed.
    pub graph: Graph,
    pub metadata: Option<MetadataTable>,
    pub dropped_isolates: usize,
    pub dropped_duplicates: usize,
    pub dropped_self_loops: usize,
    pub ignored_metadata_rows: usize,
}

struct ParsedEdges {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, f64)>,
    dropped_duplicates: usize,
    dropped_self_loops: usize,
}

fn parse_edges(text: &str, options: &LoadOptions) -> Result<ParsedEdges, IngestError> {
    let mut delimiter = options.delimiter;
    let mut parsed = ParsedEdges {
        labels: Vec::new(),
        index: HashMap::new(),
        edges: Vec::new(),
        dropped_duplicates: 0,
        dropped_self_loops: 0,
    };
    let mut seen = HashSet::new();
    for (line_no, line) in data_lines(text) {
        let delim = *delimiter.get_or_insert_with(|| Delimiter::detect(line));
        let fields = delim.split(line);
        if fields.len() < 2 || fields.len() > 3 || fields[..2].iter().any(|f| f.is_empty()) {
            return Err(IngestError::Parse {
                line: line_no,
                message: format!("expected `source target [weight]`, got {line:?}"),
            });
        }
        let weight = match fields.get(2) {
            Some(text) => text.parse::<f64>().map_err(|_| IngestError::Parse {
                line: line_no,
                message: format!("weight {text:?} is not a number"),
            })?,
            None => 1.0,
        };
        if !(weight.is_finite() && weight > 0.0) {
            return Err(IngestError::Parse {
                line: line_no,
                message: format!("weight {weight} must be positive"),
            });
        }
        let (a, b) = (fields[0], fields[1]);
        if a == b {
            if options.lenient {
                parsed.dropped_self_loops += 1;
                continue;
            }
            return Err(IngestError::SelfLoop {
                line: line_no,
                label: a.to_string(),
            });
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if !seen.insert((key.0.to_string(), key.1.to_string())) {
            if options.lenient {
                parsed.dropped_duplicates += 1;
                continue;
            }
            return Err(IngestError::DuplicateEdge {
                line: line_no,
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        let i = intern(&mut parsed, a);
        let j = intern(&mut parsed, b);
        parsed.edges.push((i, j, weight));
    }
    Ok(parsed)
}

fn intern(parsed: &mut ParsedEdges, label: &str) -> usize {
    if let Some(&i) = parsed.index.get(label) {
        return i;
    }
    let i = parsed.labels.len();
    parsed.labels.push(label.to_string());
    parsed.index.insert(label.to_string(), i);
    i
}

fn parse_metadata(
    text: &str,
    index: &HashMap<String, usize>,
    nodes: usize,
    options: &LoadOptions,
) -> Result<(MetadataTable, usize), IngestError> {
    let mut lines = data_lines(text);
    let Some((_, header)) = lines.next() else {
        return Err(IngestError::Parse {
            line: 1,
            message: "metadata file has no header".into(),
        });
    };
    let delimiter = options.delimiter.unwrap_or_else(|| Delimiter::detect(header));
    let header = delimiter.split(header);
    let columns: Vec<String> = header[1..].iter().map(|s| s.to_string()).collect();
    let mut table = MetadataTable::empty(columns, nodes);
    let mut filled = vec![false; nodes];
    let mut ignored = 0;
    for (line_no, line) in lines {
        let fields = delimiter.split(line);
        if fields.len() != header.len() {
            return Err(IngestError::Parse {
                line: line_no,
                message: format!("expected {} fields, got {}", header.len(), fields.len()),
            });
        }
        let label = fields[0];
        let Some(&node) = index.get(label) else {
            if options.lenient {
                ignored += 1;
                continue;
            }
            return Err(IngestError::UnknownNodeInMetadata {
                line: line_no,
                label: label.to_string(),
            });
        };
        if std::mem::replace(&mut filled[node], true) {
            return Err(IngestError::DuplicateMetadataRow {
                line: line_no,
                label: label.to_string(),
            });
        }
        table.rows[node] = fields[1..]
            .iter()
            .map(|v| {
                let missing = v.is_empty() || options.missing_token.as_deref() == Some(*v);
                (!missing).then(|| v.to_string())
            })
            .collect();
    }
    Ok((table, ignored))
}

/// Parses an edge list (and optional metadata) already held in memory.
pub fn load_graph_from_str(
    edges: &str,
    metadata: Option<&str>,
    options: &LoadOptions,
) -> Result<LoadedGraph, IngestError> {
    let parsed = parse_edges(edges, options)?;
    if parsed.edges.is_empty() {
        return Err(IngestError::NoEdges);
    }
    let n = parsed.labels.len();
    let (metadata, ignored) = match metadata {
        Some(text) => {
            let (table, ignored) = parse_metadata(text, &parsed.index, n, options)?;
            (Some(table), ignored)
        }
        None => (None, 0),
    };
    let graph = Graph::from_edges(n, parsed.edges)?.with_labels(parsed.labels)?;
    let filtered = graph.drop_isolates()?;
    Ok(LoadedGraph {
        metadata: metadata.map(|m| m.select(&filtered.kept)),
        graph: filtered.graph,
        dropped_isolates: filtered.dropped,
        dropped_duplicates: parsed.dropped_duplicates,
        dropped_self_loops: parsed.dropped_self_loops,
        ignored_metadata_rows: ignored,
    })
}

fn read(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads an edge-list file and optional metadata file.
pub fn load_graph(
    edge_path: &Path,
    metadata_path: Option<&Path>,
    options: &LoadOptions,
) -> Result<LoadedGraph, IngestError> {
    let edges = read(edge_path)?;
    let metadata = metadata_path.map(read).transpose()?;
    load_graph_from_str(&edges, metadata.as_deref(), options)
}

/// Per-node share of friends with the same value in `column`.
///
/// Missing is a value like any other: two nodes that both lack it match.
/// Neighbors are counted once each, whatever the edge weight.
pub fn derive_prop_own(
    g: &Graph,
    metadata: &MetadataTable,
    column: &str,
) -> Result<Vec<f64>, IngestError> {
    let values = metadata.column(column)?;
    (0..g.node_count())
        .map(|i| {
            let friends = g.neighbors(i);
            if friends.is_empty() {
                return Err(GraphError::IsolatePresent(i).into());
            }
            let same = friends.iter().filter(|&&(j, _)| values[j] == values[i]).count();
            Ok(same as f64 / friends.len() as f64)
        })
        .collect()
}

/// Weight 2 on edges whose endpoints share a reported `column` value, 1
/// otherwise. Returns the new graph and the fraction of weight-2 edges.
pub fn derive_homophily_weights(
    g: &Graph,
    metadata: &MetadataTable,
    column: &str,
) -> Result<(Graph, f64), IngestError> {
    let values = metadata.column(column)?;
    let mut heavy = 0usize;
    let weighted = g.reweighted(|i, j, _| match (values[i], values[j]) {
        (Some(x), Some(y)) if x == y => {
            heavy += 1;
            2.0
        }
        _ => 1.0,
    })?;
    let p2 = if g.edge_count() == 0 {
        0.0
    } else {
        heavy as f64 / g.edge_count() as f64
    };
    Ok((weighted, p2))
}

/// Edge list text (`source<TAB>target<TAB>weight`) using node labels.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (i, j, w) in g.edges() {
        let _ = writeln!(out, "{}\t{}\t{}", g.label(i), g.label(j), w);
    }
    out
}

/// Two-column attribute table (`node<TAB>column`), or `None` without attributes.
pub fn write_attribute_table(g: &Graph, column: &str) -> Option<String> {
    let a = g.attributes()?;
    let mut out = format!("node\t{column}\n");
    for (i, v) in a.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}", g.label(i), v);
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonNode {
    pub id: usize,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub attribute: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Serializable mirror of [`Graph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<JsonNode>,
    pub edges: Vec<JsonEdge>,
}

impl GraphJson {
    pub fn from_graph(g: &Graph) -> Self {
        let attributes = g.attributes();
        Self {
            nodes: (0..g.node_count())
                .map(|i| JsonNode {
                    id: i,
                    label: g.label(i),
                    attribute: attributes.map(|a| a[i]),
                })
                .collect(),
            edges: g
                .edges()
                .map(|(source, target, weight)| JsonEdge {
                    source,
                    target,
                    weight,
                })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<Graph, GraphError> {
        let mut nodes = self.nodes.clone();
        nodes.sort_by_key(|n| n.id);
        let n = nodes.len();
        let g = Graph::from_edges(n, self.edges.iter().map(|e| (e.source, e.target, e.weight)))?
            .with_labels(nodes.iter().map(|x| x.label.clone()).collect())?;
        let attributes: Option<Vec<f64>> = nodes.iter().map(|x| x.attribute).collect();
        match attributes {
            Some(a) if n > 0 => g.with_attributes(a),
            _ => Ok(g),
        }
    }
}
