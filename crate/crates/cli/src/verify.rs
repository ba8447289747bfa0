use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::bail;
use friendship_paradox::correlation::{check_sign_consistency, sign_rule_report};
use friendship_paradox::generators::{derive_seed, draw_base_attributes, generate_gnp, stream_rng, GnpSpec, Stream};
use friendship_paradox::metrics::{full_report_with, gap_scales};
use friendship_paradox::oracle::{oracle_all, relative_error};
use friendship_paradox::{Graph, GapValue, Paradox};
use rand::Rng;
use serde_json::json;

use crate::output::write_json;
use crate::{CmdResult, Failure};

const ORACLE_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-9;
const SHIFT: f64 = 7.5;

const PROPERTIES: [&str; 8] = [
    "oracle_equivalence",
    "non_negativity",
    "sign_rules",
    "gamma_sum",
    "delta_sum",
    "topology_correlations",
    "shift_invariance",
    "negation",
];

#[derive(clap::Args)]
pub struct Args {
    /// Number of random graphs to check
    #[arg(long, default_value_t = 200)]
    pub graphs: usize,
    /// Largest graph size (at least 3)
    #[arg(long, default_value_t = 30)]
    pub max_n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the per-property report as JSON (`-` for stdout)
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Flip the sign of one computed gap, to prove the checks can fail
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Default)]
struct Tally {
    checks: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }
}

/// Connected G(n, p) graph with integer weights 1..=10 and normal attributes.
fn sample(seed: u64, max_n: usize) -> anyhow::Result<(Graph, Vec<f64>)> {
    let mut rng = stream_rng(seed, Stream::Metadata);
    let n = rng.random_range(3..=max_n);
    let p = rng.random_range(0.1..0.6);
    for attempt in 0..1000 {
        let g = generate_gnp(&GnpSpec {
            n,
            p,
            max_weight: 10,
            seed: derive_seed(seed, attempt),
        })?;
        if g.is_connected() {
            return Ok((g, draw_base_attributes(n, seed)));
        }
    }
    bail!("no connected graph for n={n}, p={p}")
}

fn check_graph(index: usize, g: &Graph, a: &[f64], fault: bool, tallies: &mut BTreeMap<&'static str, Tally>) -> anyhow::Result<()> {
    let q = g.node_quantities()?;
    let n = g.node_count() as f64;
    let scales = gap_scales(&q, Some(a))?;
    let mut gaps = full_report_with(g, &q, Some(a))?;
    if fault {
        let v = gaps.lwafp.value;
        gaps.lwafp = GapValue::classify(-v, scales[6]);
    }
    let corrs = sign_rule_report(&q, Some(a))?;
    let at = |p: &str| format!("graph {index} (n={}): {p}", g.node_count());

    let oracle = oracle_all(&g.clone().with_attributes(a.to_vec())?)?;
    for (k, p) in Paradox::ALL.into_iter().enumerate() {
        let err = relative_error(gaps.get(p).value, oracle[k], scales[k]);
        tallies.get_mut("oracle_equivalence").unwrap().record(err <= ORACLE_TOL, || {
            at(&format!("{} closed form {} vs oracle {} (relative error {err:e})", p.name(), gaps.get(p).value, oracle[k]))
        });
    }
    for p in Paradox::STRUCTURAL {
        let g_p = gaps.get(p);
        tallies.get_mut("non_negativity").unwrap().record(g_p.value >= 0.0 || g_p.zero, || {
            at(&format!("{} = {}", p.name(), g_p.value))
        });
    }
    let consistency = check_sign_consistency(&gaps, &corrs);
    for d in &consistency.details {
        tallies.get_mut("sign_rules").unwrap().record(d.consistent, || {
            at(&format!("{} gap {} vs correlation {:?}", d.paradox.name(), d.gap, d.correlation))
        });
    }
    let gamma: f64 = q.gamma.iter().sum();
    tallies.get_mut("gamma_sum").unwrap().record((gamma - n).abs() <= IDENTITY_TOL * n, || {
        at(&format!("sum of gamma {gamma}"))
    });
    let delta: f64 = q.delta.iter().sum();
    tallies.get_mut("delta_sum").unwrap().record((delta - n).abs() <= IDENTITY_TOL * n, || {
        at(&format!("sum of delta {delta}"))
    });
    for (name, c) in [("r(d,delta)", corrs.r_d_delta), ("r(w,gamma)", corrs.r_w_gamma)] {
        if let Some(r) = c.value() {
            tallies.get_mut("topology_correlations").unwrap().record(r > 0.0, || at(&format!("{name} = {r}")));
        }
    }

    let shifted: Vec<f64> = a.iter().map(|x| x + SHIFT).collect();
    let shifted_gaps = full_report_with(g, &q, Some(&shifted))?;
    let negated: Vec<f64> = a.iter().map(|x| -x).collect();
    let negated_gaps = full_report_with(g, &q, Some(&negated))?;
    for (k, p) in Paradox::ALL.into_iter().enumerate().filter(|(_, p)| p.is_attribute()) {
        let base = gaps.get(p).value;
        let s = shifted_gaps.get(p).value;
        let err = relative_error(s, base, scales[k]);
        tallies.get_mut("shift_invariance").unwrap().record(err <= IDENTITY_TOL, || {
            at(&format!("{} {base} vs shifted {s}", p.name()))
        });
        let m = negated_gaps.get(p).value;
        let err = relative_error(-m, base, scales[k]);
        tallies.get_mut("negation").unwrap().record(err <= ORACLE_TOL, || {
            at(&format!("{} {base} vs negated {m}", p.name()))
        });
    }
    Ok(())
}

pub fn run(args: Args) -> CmdResult {
    if args.max_n < 3 {
        return Err(Failure::Input(anyhow::anyhow!("--max-n must be at least 3")));
    }
    let mut tallies: BTreeMap<&'static str, Tally> = PROPERTIES.iter().map(|&p| (p, Tally::default())).collect();
    for i in 0..args.graphs {
        let (g, a) = sample(derive_seed(args.seed, i as u64), args.max_n)?;
        check_graph(i, &g, &a, args.inject_fault, &mut tallies)?;
    }

    let mut violated = Vec::new();
    for name in PROPERTIES {
        let t = &tallies[name];
        if t.failures == 0 {
            println!("PASS {name:<22} {} checks", t.checks);
        } else {
            println!("FAIL {name:<22} {}/{} checks failed; first: {}", t.failures, t.checks, t.first.as_deref().unwrap_or(""));
            violated.push(name);
        }
    }
    if let Some(path) = &args.json {
        let report: serde_json::Map<String, serde_json::Value> = PROPERTIES
            .iter()
            .map(|&name| {
                let t = &tallies[name];
                (name.to_string(), json!({ "checks": t.checks, "failures": t.failures, "first": t.first }))
            })
            .collect();
        write_json(path, &json!({ "graphs": args.graphs, "max_n": args.max_n, "seed": args.seed, "properties": report }))?;
    }
    if violated.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("violated properties: {}", violated.join(", "))))
    }
}
