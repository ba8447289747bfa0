//! Seeded random graphs, weights and attributes.
//!
//! Every generator takes an explicit seed and draws from a ChaCha stream
//! dedicated to one purpose (topology, weights, attributes, rewiring,
//! metadata). Changing how one of them is used never shifts the others, so a
//! run's graph stays fixed while its attribute conditions vary.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::ingest::MetadataTable;

/// Retries allowed before configuration-model rewiring gives up.
pub const REWIRE_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
    #[error("no connected rewiring found after {0} attempts")]
    RetryLimitExceeded(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Topology = 1,
    Weights = 2,
    Attributes = 3,
    Rewire = 4,
    Metadata = 5,
}

/// RNG for one purpose under one seed.
pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Derives an independent child seed (SplitMix64 finalizer over seed and index).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// G(n, p) with integer weights uniform on `1..=max_weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnpSpec {
    pub n: usize,
    pub p: f64,
    pub max_weight: u32,
    pub seed: u64,
}

impl Default for GnpSpec {
    fn default() -> Self {
        Self {
            n: 1000,
            p: 1.0 / 50.0,
            max_weight: 10,
            seed: 0,
        }
    }
}

impl GnpSpec {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.n == 0 {
            return Err(GeneratorError::InvalidSpec("n must be positive".into()));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(GeneratorError::InvalidSpec(format!(
                "p = {} is outside (0, 1]",
                self.p
            )));
        }
        if self.max_weight == 0 {
            return Err(GeneratorError::InvalidSpec("max_weight must be at least 1".into()));
        }
        Ok(())
    }
}

/// Each unordered pair becomes an edge independently with probability `p`;
/// each edge then gets a uniform integer weight in `1..=max_weight`.
pub fn generate_gnp(spec: &GnpSpec) -> Result<Graph, GeneratorError> {
    spec.validate()?;
    let mut topo = stream_rng(spec.seed, Stream::Topology);
    let mut weights = stream_rng(spec.seed, Stream::Weights);
    let mut edges = Vec::new();
    for i in 0..spec.n {
        for j in (i + 1)..spec.n {
            if topo.random_bool(spec.p) {
                edges.push((i, j, 0.0));
            }
        }
    }
    for e in &mut edges {
        e.2 = weights.random_range(1..=spec.max_weight) as f64;
    }
    Ok(Graph::from_edges(spec.n, edges)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectReason {
    Disconnected,
    Regular,
    WeightedRegular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Acceptance {
    Accept,
    Reject(RejectReason),
}

/// Keeps only connected graphs that are neither regular nor weighted-regular.
pub fn accept_graph(g: &Graph) -> Acceptance {
    let class = g.classify();
    if !class.connected {
        Acceptance::Reject(RejectReason::Disconnected)
    } else if class.regular {
        Acceptance::Reject(RejectReason::Regular)
    } else if class.weighted_regular {
        Acceptance::Reject(RejectReason::WeightedRegular)
    } else {
        Acceptance::Accept
    }
}

/// Attribute condition `j`: a_i = z_i + (j/100)·d_i with z_i standard normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionSpec {
    pub j: i32,
}

impl ConditionSpec {
    pub fn new(j: i32) -> Result<Self, GeneratorError> {
        if !(-100..=100).contains(&j) {
            return Err(GeneratorError::InvalidSpec(format!(
                "condition {j} is outside [-100, 100]"
            )));
        }
        Ok(Self { j })
    }
}

/// `n` independent standard normal draws from the attribute stream.
pub fn draw_base_attributes(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, Stream::Attributes);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Shifts base draws toward (j > 0) or away from (j < 0) the degrees.
pub fn condition_attributes(base: &[f64], degree: &[usize], cond: ConditionSpec) -> Vec<f64> {
    let slope = cond.j as f64 / 100.0;
    base.iter()
        .zip(degree)
        .map(|(z, &d)| z + slope * d as f64)
        .collect()
}

pub fn synthesize_attributes(degree: &[usize], cond: ConditionSpec, seed: u64) -> Vec<f64> {
    condition_attributes(&draw_base_attributes(degree.len(), seed), degree, cond)
}

/// Configuration-model rewiring by stub matching.
///
/// Half-edges are shuffled and paired; self-loops and repeated pairs are
/// discarded. The draw is repeated until the result is connected. Output
/// edges all have weight 1; attributes and labels are carried over.
pub fn configuration_rewire(g: &Graph, seed: u64) -> Result<Graph, GeneratorError> {
    let n = g.node_count();
    let mut stubs: Vec<usize> = (0..n)
        .flat_map(|i| std::iter::repeat_n(i, g.degree(i)))
        .collect();
    let mut rng = stream_rng(seed, Stream::Rewire);
    for _ in 0..REWIRE_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let pairs: BTreeSet<(usize, usize)> = stubs
            .chunks_exact(2)
            .filter(|p| p[0] != p[1])
            .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
            .collect();
        let candidate = Graph::from_edges(n, pairs.into_iter().map(|(i, j)| (i, j, 1.0)))?;
        if candidate.is_connected() {
            let mut out = candidate;
            out.set_attributes(g.attributes().map(<[f64]>::to_vec))?;
            if let Some(labels) = g.labels() {
                out = out.with_labels(labels.to_vec())?;
            }
            return Ok(out);
        }
    }
    Err(GeneratorError::RetryLimitExceeded(REWIRE_ATTEMPTS))
}

/// Each edge independently gets weight 2 with probability `p2`, else 1.
pub fn assign_bernoulli_weights(g: &Graph, p2: f64, seed: u64) -> Result<Graph, GeneratorError> {
    if !(0.0..=1.0).contains(&p2) {
        return Err(GeneratorError::InvalidSpec(format!("p2 = {p2} is outside [0, 1]")));
    }
    let mut rng = stream_rng(seed, Stream::Weights);
    Ok(g.reweighted(|_, _, _| if rng.random_bool(p2) { 2.0 } else { 1.0 })?)
}

/// Stochastic block model with two blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBlockSpec {
    pub sizes: [usize; 2],
    /// Within-block edge probability of each block.
    pub p_in: [f64; 2],
    pub p_out: f64,
    pub seed: u64,
}

/// Two-block random graph; returns the graph and each node's block.
pub fn generate_two_block(spec: &TwoBlockSpec) -> Result<(Graph, Vec<usize>), GeneratorError> {
    let n = spec.sizes[0] + spec.sizes[1];
    let probs = [spec.p_in[0], spec.p_in[1], spec.p_out];
    if n == 0 || probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(GeneratorError::InvalidSpec(format!("{spec:?}")));
    }
    let block: Vec<usize> = (0..n).map(|i| usize::from(i >= spec.sizes[0])).collect();
    let mut rng = stream_rng(spec.seed, Stream::Topology);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block[i] != block[j] {
                spec.p_out
            } else {
                spec.p_in[block[i]]
            };
            if rng.random_bool(p) {
                edges.push((i, j, 1.0));
            }
        }
    }
    Ok((Graph::from_edges(n, edges)?, block))
}

/// Campus-style social network: a two-block graph with gender and
/// graduation-year metadata that both lean toward block membership.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampusSpec {
    pub blocks: TwoBlockSpec,
    /// Probability that a node in block b reports gender "F".
    pub female_share: [f64; 2],
    pub gender_missing: f64,
    /// Modal graduation year of each block; other years are drawn uniformly.
    pub block_year: [u16; 2],
    pub year_alignment: f64,
    pub year_missing: f64,
}

pub const CAMPUS_YEARS: [u16; 4] = [2005, 2006, 2007, 2008];

/// Generates a campus network. Isolates are dropped, so the returned graph
/// and table may have fewer nodes than requested.
pub fn synthetic_campus(spec: &CampusSpec) -> Result<(Graph, MetadataTable), GeneratorError> {
    let (g, block) = generate_two_block(&spec.blocks)?;
    let mut rng = stream_rng(spec.blocks.seed, Stream::Metadata);
    let mut table = MetadataTable::empty(vec!["gender".into(), "year".into()], g.node_count());
    for (i, &b) in block.iter().enumerate() {
        let gender = if rng.random_bool(spec.gender_missing) {
            None
        } else if rng.random_bool(spec.female_share[b]) {
            Some("F".to_string())
        } else {
            Some("M".to_string())
        };
        let year = if rng.random_bool(spec.year_missing) {
            None
        } else if rng.random_bool(spec.year_alignment) {
            Some(spec.block_year[b].to_string())
        } else {
            Some(CAMPUS_YEARS[rng.random_range(0..CAMPUS_YEARS.len())].to_string())
        };
        table
            .set(i, "gender", gender)
            .and_then(|_| table.set(i, "year", year))
            .expect("columns exist");
    }
    let labels = (0..g.node_count()).map(|i| format!("u{i}")).collect();
    let g = g.with_labels(labels)?;
    let filtered = g.drop_isolates()?;
    Ok((filtered.graph, table.select(&filtered.kept)))
}

/// Spec for network `index` of a seeded campus corpus.
///
/// Block 0 is small and dense, block 1 larger and sparse, so degree tracks
/// block membership the way it tracks dorm or class cohorts on a real campus.
pub fn campus_corpus_spec(master_seed: u64, index: u64) -> CampusSpec {
    let seed = derive_seed(master_seed, index);
    let mut rng = stream_rng(seed, Stream::Metadata);
    CampusSpec {
        blocks: TwoBlockSpec {
            sizes: [rng.random_range(100..=200), rng.random_range(150..=300)],
            p_in: [rng.random_range(0.10..0.20), rng.random_range(0.02..0.05)],
            p_out: rng.random_range(0.002..0.006),
            seed: derive_seed(seed, 0),
        },
        female_share: [rng.random_range(0.5..0.9), rng.random_range(0.1..0.5)],
        gender_missing: 0.077,
        block_year: [2006, 2008],
        year_alignment: rng.random_range(0.4..0.8),
        year_missing: 0.137,
    }
}

/// `networks` campus graphs drawn with [`campus_corpus_spec`].
pub fn campus_corpus(
    master_seed: u64,
    networks: usize,
) -> Result<Vec<(Graph, MetadataTable)>, GeneratorError> {
    (0..networks as u64)
        .map(|k| synthetic_campus(&campus_corpus_spec(master_seed, k)))
        .collect()
}
