//! Condition sweeps over random graphs and the tables built from them.
//!
//! A run draws one accepted G(n, p) graph and one standard normal attribute
//! sequence, then derives an attribute vector for every condition j and
//! records all gaps and correlations. Runs are independent and executed in
//! parallel; results are collected in run order so summaries do not depend on
//! the worker count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::Analysis;
use crate::correlation::{
    check_sign_consistency, pearson, sign_rule_report, Correlation, CorrelationError,
    CorrelationReport, PairConsistency,
};
use crate::generators::{
    accept_graph, condition_attributes, derive_seed, draw_base_attributes, generate_gnp,
    Acceptance, ConditionSpec, GeneratorError, GnpSpec, RejectReason,
};
use crate::graph::GraphError;
use crate::metrics::{full_report_with, GapReport, MetricsError, Paradox, Verdict};
use crate::stats::{mean_sd, ols_slope};

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error("run {run}: no acceptable graph in {attempts} attempts")]
    NoAcceptableGraph { run: usize, attempts: usize },
    #[error("run {run}, condition {condition}: gap sign differs from correlation sign: {details:?}")]
    SignRuleViolation {
        run: usize,
        condition: i32,
        details: Vec<PairConsistency>,
    },
    #[error("paired lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub runs: usize,
    /// Graph parameters; the seed field is ignored in favor of per-run seeds.
    pub graph: GnpSpec,
    pub conditions: Vec<i32>,
    pub master_seed: u64,
    /// Graph draws allowed per run before giving up.
    pub max_attempts: usize,
}

impl SweepSpec {
    /// n = 300, p = 0.02, 200 runs, j in -5..=5.
    pub fn desk(master_seed: u64) -> Self {
        Self {
            runs: 200,
            graph: GnpSpec {
                n: 300,
                p: 0.02,
                max_weight: 10,
                seed: 0,
            },
            conditions: (-5..=5).collect(),
            master_seed,
            max_attempts: 1000,
        }
    }

    /// n = 1000, p = 1/50, 1000 runs, j in -100..=100.
    pub fn paper(master_seed: u64) -> Self {
        Self {
            runs: 1000,
            graph: GnpSpec::default(),
            conditions: (-100..=100).collect(),
            master_seed,
            max_attempts: 1000,
        }
    }

    fn validate(&self) -> Result<Vec<ConditionSpec>, SimulationError> {
        if self.runs == 0 {
            return Err(SimulationError::InvalidSpec("runs must be positive".into()));
        }
        if self.conditions.is_empty() {
            return Err(SimulationError::InvalidSpec("no conditions".into()));
        }
        self.graph.validate()?;
        let mut conds: Vec<ConditionSpec> = self
            .conditions
            .iter()
            .map(|&j| ConditionSpec::new(j))
            .collect::<Result<_, _>>()?;
        conds.sort_by_key(|c| c.j);
        conds.dedup();
        Ok(conds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionOutcome {
    pub j: i32,
    pub gaps: GapReport,
    pub correlations: CorrelationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    /// Seed of the accepted graph.
    pub graph_seed: u64,
    pub nodes: usize,
    pub edges: usize,
    pub rejected: BTreeMap<String, usize>,
    pub r_d_delta: Correlation,
    pub r_w_gamma: Correlation,
    pub r_dw: Correlation,
    pub outcomes: Vec<ConditionOutcome>,
}

fn run_once(spec: &SweepSpec, conds: &[ConditionSpec], run: usize) -> Result<RunRecord, SimulationError> {
    let run_seed = derive_seed(spec.master_seed, run as u64);
    let mut rejected: BTreeMap<String, usize> = BTreeMap::new();
    let (graph, graph_seed) = (0..spec.max_attempts)
        .find_map(|attempt| {
            let seed = derive_seed(run_seed, attempt as u64);
            let g = generate_gnp(&GnpSpec { seed, ..spec.graph });
            match g {
                Err(e) => Some(Err(e)),
                Ok(g) => match accept_graph(&g) {
                    Acceptance::Accept => Some(Ok((g, seed))),
                    Acceptance::Reject(reason) => {
                        *rejected.entry(reject_key(reason).into()).or_default() += 1;
                        None
                    }
                },
            }
        })
        .ok_or(SimulationError::NoAcceptableGraph {
            run,
            attempts: spec.max_attempts,
        })??;

    let q = graph.node_quantities()?;
    let base = draw_base_attributes(graph.node_count(), run_seed);
    let topology = sign_rule_report(&q, None)?;
    let mut outcomes = Vec::with_capacity(conds.len());
    for &cond in conds {
        let a = condition_attributes(&base, &q.degree, cond);
        let gaps = full_report_with(&graph, &q, Some(&a))?;
        let correlations = sign_rule_report(&q, Some(&a))?;
        let check = check_sign_consistency(&gaps, &correlations);
        if !check.ok {
            return Err(SimulationError::SignRuleViolation {
                run,
                condition: cond.j,
                details: check.violations().cloned().collect(),
            });
        }
        outcomes.push(ConditionOutcome {
            j: cond.j,
            gaps,
            correlations,
        });
    }
    Ok(RunRecord {
        run,
        graph_seed,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        rejected,
        r_d_delta: topology.r_d_delta,
        r_w_gamma: topology.r_w_gamma,
        r_dw: topology.r_dw,
        outcomes,
    })
}

fn reject_key(reason: RejectReason) -> &'static str {
    match reason {
        RejectReason::Disconnected => "disconnected",
        RejectReason::Regular => "regular",
        RejectReason::WeightedRegular => "weighted_regular",
    }
}

/// Mean and spread of one statistic, with the number of undefined values skipped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatSummary {
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub defined: usize,
    pub undefined: usize,
}

impl StatSummary {
    pub fn from_correlations<'a>(values: impl IntoIterator<Item = &'a Correlation>) -> Self {
        let mut defined = Vec::new();
        let mut undefined = 0;
        for c in values {
            match c.value() {
                Some(r) => defined.push(r),
                None => undefined += 1,
            }
        }
        Self::from_values(&defined, undefined)
    }

    fn from_values(values: &[f64], undefined: usize) -> Self {
        if values.is_empty() {
            return Self {
                mean: None,
                sd: None,
                defined: 0,
                undefined,
            };
        }
        let (m, sd) = mean_sd(values);
        Self {
            mean: Some(m),
            sd,
            defined: values.len(),
            undefined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParadoxTally {
    pub failures: usize,
    pub failure_proportion: f64,
    pub zero_gaps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionSummary {
    pub j: i32,
    pub runs: usize,
    pub paradoxes: BTreeMap<Paradox, ParadoxTally>,
    /// Keyed by the associated attribute paradox (r_da for LAFP and so on).
    pub correlations: BTreeMap<Paradox, StatSummary>,
    pub sign_rule_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyStats {
    pub r_d_delta: StatSummary,
    pub r_w_gamma: StatSummary,
    pub r_dw: StatSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub spec: SweepSpec,
    pub discarded: BTreeMap<String, usize>,
    pub conditions: Vec<ConditionSummary>,
    pub topology: TopologyStats,
    pub sign_rule_violations: usize,
}

impl SimulationSummary {
    pub fn condition(&self, j: i32) -> Option<&ConditionSummary> {
        self.conditions.iter().find(|c| c.j == j)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub summary: SimulationSummary,
    pub runs: Vec<RunRecord>,
}

impl SweepResult {
    /// Scatter rows for one condition, one point per run.
    pub fn scatter(&self, j: i32) -> ScatterTable {
        let entries: Vec<(String, GapReport, CorrelationReport)> = self
            .runs
            .iter()
            .filter_map(|r| {
                r.outcomes
                    .iter()
                    .find(|o| o.j == j)
                    .map(|o| (r.run.to_string(), o.gaps, o.correlations))
            })
            .collect();
        scatter_table(&entries)
    }
}

/// Runs every condition on `spec.runs` accepted graphs.
///
/// Fails fast on the first gap whose sign disagrees with its correlation.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SimulationError> {
    let conds = spec.validate()?;
    let runs: Vec<RunRecord> = (0..spec.runs)
        .into_par_iter()
        .map(|r| run_once(spec, &conds, r))
        .collect::<Result<_, _>>()?;
    let summary = summarize(spec, &conds, &runs);
    Ok(SweepResult { summary, runs })
}

fn summarize(spec: &SweepSpec, conds: &[ConditionSpec], runs: &[RunRecord]) -> SimulationSummary {
    let mut discarded: BTreeMap<String, usize> = BTreeMap::new();
    for r in runs {
        for (k, v) in &r.rejected {
            *discarded.entry(k.clone()).or_default() += v;
        }
    }
    let conditions = conds
        .iter()
        .enumerate()
        .map(|(k, cond)| {
            let outcomes: Vec<&ConditionOutcome> = runs.iter().map(|r| &r.outcomes[k]).collect();
            let total = outcomes.len();
            let paradoxes = Paradox::ALL
                .into_iter()
                .map(|p| {
                    let failures = outcomes
                        .iter()
                        .filter(|o| o.gaps.get(p).verdict == Verdict::Fails)
                        .count();
                    let zero_gaps = outcomes.iter().filter(|o| o.gaps.get(p).zero).count();
                    (
                        p,
                        ParadoxTally {
                            failures,
                            failure_proportion: failures as f64 / total as f64,
                            zero_gaps,
                        },
                    )
                })
                .collect();
            let correlations = Paradox::ATTRIBUTE
                .into_iter()
                .map(|p| {
                    let stat = StatSummary::from_correlations(
                        outcomes.iter().filter_map(|o| o.correlations.associated(p)),
                    );
                    (p, stat)
                })
                .collect();
            ConditionSummary {
                j: cond.j,
                runs: total,
                paradoxes,
                correlations,
                sign_rule_violations: 0,
            }
        })
        .collect();
    SimulationSummary {
        spec: spec.clone(),
        discarded,
        conditions,
        topology: topology_correlation_stats(runs.iter().map(|r| (&r.r_d_delta, &r.r_w_gamma, &r.r_dw))),
        sign_rule_violations: 0,
    }
}

/// Mean and standard deviation of r(d,δ), r(w,γ) and r(d,w) across graphs.
pub fn topology_correlation_stats<'a, I>(graphs: I) -> TopologyStats
where
    I: IntoIterator<Item = (&'a Correlation, &'a Correlation, &'a Correlation)>,
{
    let (mut dd, mut wg, mut dw) = (Vec::new(), Vec::new(), Vec::new());
    for (a, b, c) in graphs {
        dd.push(*a);
        wg.push(*b);
        dw.push(*c);
    }
    TopologyStats {
        r_d_delta: StatSummary::from_correlations(&dd),
        r_w_gamma: StatSummary::from_correlations(&wg),
        r_dw: StatSummary::from_correlations(&dw),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub network_id: String,
    pub paradox: Paradox,
    pub correlation: Option<f64>,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterTable {
    pub rows: Vec<ScatterRow>,
    /// Across-network correlation between each attribute gap and its
    /// associated correlation (rows with undefined correlations skipped).
    pub gap_correlation: BTreeMap<Paradox, Correlation>,
}

/// (correlation, gap) pairs for every attribute paradox of every network.
pub fn scatter_table(entries: &[(String, GapReport, CorrelationReport)]) -> ScatterTable {
    let mut rows = Vec::with_capacity(entries.len() * 4);
    for (id, gaps, corrs) in entries {
        for p in Paradox::ATTRIBUTE {
            rows.push(ScatterRow {
                network_id: id.clone(),
                paradox: p,
                correlation: corrs.associated(p).and_then(Correlation::value),
                gap: gaps.get(p).value,
            });
        }
    }
    let gap_correlation = Paradox::ATTRIBUTE
        .into_iter()
        .map(|p| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.paradox == p)
                .filter_map(|r| r.correlation.map(|c| (c, r.gap)))
                .unzip();
            let c = pearson(&xs, &ys).expect("equal lengths");
            (p, c)
        })
        .collect();
    ScatterTable {
        rows,
        gap_correlation,
    }
}

/// Every metric compared between an original network and its rewiring.
pub const COMPARISON_METRICS: [&str; 15] = [
    "g_lfp", "g_sfp", "g_lwfp", "g_swfp", "g_lafp", "g_safp", "g_lwafp", "g_swafp", "r_da",
    "r_delta_a", "r_wa", "r_gamma_a", "r_d_delta", "r_w_gamma", "r_dw",
];

fn metric_value(a: &Analysis, metric: &str) -> Option<f64> {
    if let Some(key) = metric.strip_prefix("g_") {
        let p = Paradox::ALL.into_iter().find(|p| p.key() == key)?;
        return Some(a.gaps.get(p).value);
    }
    let c = &a.correlations;
    match metric {
        "r_da" => c.r_da.value(),
        "r_delta_a" => c.r_delta_a.value(),
        "r_wa" => c.r_wa.value(),
        "r_gamma_a" => c.r_gamma_a.value(),
        "r_d_delta" => c.r_d_delta.value(),
        "r_w_gamma" => c.r_w_gamma.value(),
        "r_dw" => c.r_dw.value(),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub network: usize,
    pub metric: &'static str,
    pub original: f64,
    pub rewired: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    /// Least-squares slope of rewired on original values, per metric.
    pub slopes: BTreeMap<&'static str, Option<f64>>,
}

impl Comparison {
    pub fn slope(&self, metric: &str) -> Option<f64> {
        self.slopes.get(metric).copied().flatten()
    }

    pub fn pairs(&self, metric: &str) -> impl Iterator<Item = &ComparisonRow> + '_ {
        let metric = metric.to_string();
        self.rows.iter().filter(move |r| r.metric == metric)
    }
}

/// Pairs up the metrics of index-matched networks and fits a slope for each.
pub fn compare_original_vs_config(
    original: &[Analysis],
    rewired: &[Analysis],
) -> Result<Comparison, SimulationError> {
    if original.len() != rewired.len() {
        return Err(SimulationError::LengthMismatch(original.len(), rewired.len()));
    }
    let mut rows = Vec::new();
    for (k, (a, b)) in original.iter().zip(rewired).enumerate() {
        for metric in COMPARISON_METRICS {
            if let (Some(x), Some(y)) = (metric_value(a, metric), metric_value(b, metric)) {
                rows.push(ComparisonRow {
                    network: k,
                    metric,
                    original: x,
                    rewired: y,
                });
            }
        }
    }
    let slopes = COMPARISON_METRICS
        .into_iter()
        .map(|metric| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.metric == metric)
                .map(|r| (r.original, r.rewired))
                .unzip();
            (metric, ols_slope(&xs, &ys))
        })
        .collect();
    Ok(Comparison { rows, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::analyze;
    use crate::graph::fixtures::example_path;
    use crate::graph::Graph;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            runs: 12,
            graph: GnpSpec {
                n: 60,
                p: 0.1,
                max_weight: 10,
                seed: 0,
            },
            conditions: vec![-20, 0, 20],
            master_seed: 9,
            max_attempts: 200,
        }
    }

    #[test]
    fn sweep_is_deterministic_and_structural_gaps_hold() {
        let a = run_sweep(&small_spec()).unwrap();
        let b = run_sweep(&small_spec()).unwrap();
        assert_eq!(a, b);
        for c in &a.summary.conditions {
            assert_eq!(c.runs, 12);
            for p in Paradox::STRUCTURAL {
                assert_eq!(c.paradoxes[&p].failures, 0);
            }
        }
        let j20 = a.summary.condition(20).unwrap();
        let jm20 = a.summary.condition(-20).unwrap();
        assert!(j20.paradoxes[&Paradox::Lafp].failures <= jm20.paradoxes[&Paradox::Lafp].failures);
    }

    #[test]
    fn sweep_rejects_bad_specs() {
        let mut spec = small_spec();
        spec.conditions = vec![150];
        assert!(matches!(run_sweep(&spec), Err(SimulationError::Generator(_))));
        spec.conditions.clear();
        assert!(matches!(run_sweep(&spec), Err(SimulationError::InvalidSpec(_))));
        let mut spec = small_spec();
        spec.graph.n = 40;
        spec.graph.p = 0.001;
        spec.max_attempts = 3;
        assert!(matches!(
            run_sweep(&spec),
            Err(SimulationError::NoAcceptableGraph { .. })
        ));
    }

    #[test]
    fn two_network_scatter_is_perfectly_anticorrelated() {
        let first = example_path().unit_weights();
        let second = Graph::build(
            4,
            &[(0, 1, 1.0), (1, 2, 1.0), (1, 3, 1.0)],
            Some(vec![3.0, 0.0, 1.0, 0.0]),
        )
        .unwrap();
        let entries: Vec<_> = [first, second]
            .iter()
            .enumerate()
            .map(|(k, g)| {
                let a = analyze(g).unwrap();
                (k.to_string(), a.gaps, a.correlations)
            })
            .collect();
        assert!((entries[1].1.lafp.value + 1.0 / 3.0).abs() < 1e-15);
        assert!((entries[1].2.r_da.value().unwrap() + 0.471).abs() < 1e-3);
        let table = scatter_table(&entries);
        assert_eq!(table.rows.len(), 8);
        let c = table.gap_correlation[&Paradox::Lafp].value().unwrap();
        assert!((c + 1.0).abs() < 1e-12);

        let single = scatter_table(&entries[..1]);
        assert!(!single.gap_correlation[&Paradox::Lafp].is_defined());
    }

    #[test]
    fn identical_comparison_has_unit_slopes() {
        let graphs: Vec<Analysis> = (0..5)
            .map(|k| {
                let g = Graph::build(
                    4,
                    &[(0, 1, 1.0 + k as f64), (1, 2, 2.0), (2, 3, 1.0), (1, 3, 3.0)],
                    Some(vec![k as f64, 1.0, -2.0, 0.5 * k as f64]),
                )
                .unwrap();
                analyze(&g).unwrap()
            })
            .collect();
        let cmp = compare_original_vs_config(&graphs, &graphs).unwrap();
        for metric in ["g_lwafp", "g_swafp", "g_lafp", "r_wa", "r_w_gamma"] {
            assert_eq!(cmp.slope(metric), Some(1.0), "{metric}");
        }
        assert!(matches!(
            compare_original_vs_config(&graphs, &graphs[..2]),
            Err(SimulationError::LengthMismatch(5, 2))
        ));
    }

    #[test]
    fn topology_stats_skip_undefined() {
        let defined = Correlation::Defined(0.5);
        let undefined = Correlation::Undefined(crate::correlation::UndefinedReason::Both);
        let stats = topology_correlation_stats([
            (&defined, &defined, &defined),
            (&undefined, &defined, &defined),
        ]);
        assert_eq!(stats.r_d_delta.defined, 1);
        assert_eq!(stats.r_d_delta.undefined, 1);
        assert_eq!(stats.r_w_gamma.mean, Some(0.5));
        assert_eq!(stats.r_w_gamma.sd, Some(0.0));
    }
}
