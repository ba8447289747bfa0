use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use friendship_paradox::generators::derive_seed;
use friendship_paradox::ingest::{load_graph, LoadOptions};
use friendship_paradox::pipeline::{build_network, config_counterpart, PipelineNetwork};
use friendship_paradox::simulation::{compare_original_vs_config, scatter_table, Comparison, COMPARISON_METRICS};
use friendship_paradox::{Analysis, Paradox};
use serde_json::{json, Map, Value};

use crate::output::{analysis_json, corr_json, ensure_dir, float, opt_float, sig6, write_json};
use crate::{CmdResult, Failure};

pub const EDGE_SUFFIX: &str = ".edges.tsv";
pub const META_SUFFIX: &str = ".meta.tsv";

#[derive(clap::Args)]
pub struct Args {
    /// Alternating edge-list and node-table files: EDGES META [EDGES META ...]
    pub inputs: Vec<PathBuf>,
    /// Directory of NAME.edges.tsv / NAME.meta.tsv pairs
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Categorical column whose same-value share becomes the attribute
    #[arg(long)]
    pub gender_col: String,
    /// Column whose shared reported values put weight 2 on an edge
    #[arg(long)]
    pub year_col: String,
    /// Also rewire each network (degrees and attributes kept, Bernoulli weights)
    #[arg(long)]
    pub config_model: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub lenient: bool,
    /// Node-table value that means "not reported"
    #[arg(long)]
    pub missing: Option<String>,
}

struct Input {
    name: String,
    edges: PathBuf,
    meta: PathBuf,
}

fn corpus_inputs(dir: &Path) -> anyhow::Result<Vec<Input>> {
    let mut inputs = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|f| f.to_str()).and_then(|f| f.strip_suffix(EDGE_SUFFIX)) else {
            continue;
        };
        let meta = dir.join(format!("{name}{META_SUFFIX}"));
        if !meta.exists() {
            bail!("{} has no matching {}", path.display(), meta.display());
        }
        inputs.push(Input {
            name: name.to_string(),
            edges: path.clone(),
            meta,
        });
    }
    inputs.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(inputs)
}

fn network_name(path: &Path) -> String {
    let file = path.file_name().and_then(|f| f.to_str()).unwrap_or("network");
    file.strip_suffix(EDGE_SUFFIX)
        .map(str::to_string)
        .unwrap_or_else(|| path.file_stem().and_then(|s| s.to_str()).unwrap_or(file).to_string())
}

fn collect_inputs(args: &Args) -> anyhow::Result<Vec<Input>> {
    if !args.inputs.len().is_multiple_of(2) {
        bail!("inputs must come in EDGES META pairs");
    }
    let mut inputs: Vec<Input> = args
        .inputs
        .chunks(2)
        .map(|pair| Input {
            name: network_name(&pair[0]),
            edges: pair[0].clone(),
            meta: pair[1].clone(),
        })
        .collect();
    if let Some(dir) = &args.corpus {
        inputs.extend(corpus_inputs(dir)?);
    }
    if inputs.is_empty() {
        bail!("no networks given");
    }
    Ok(inputs)
}

struct Entry {
    name: String,
    original: PipelineNetwork,
    rewired: Option<PipelineNetwork>,
}

pub fn run(args: Args) -> CmdResult {
    let options = LoadOptions {
        lenient: args.lenient,
        missing_token: args.missing.clone(),
        delimiter: None,
    };
    let mut entries = Vec::new();
    for (k, input) in collect_inputs(&args)?.into_iter().enumerate() {
        let loaded = load_graph(&input.edges, Some(&input.meta), &options)
            .with_context(|| format!("loading {}", input.name))?;
        let meta = loaded.metadata.expect("metadata requested");
        let original = build_network(&loaded.graph, &meta, &args.gender_col, &args.year_col)
            .with_context(|| format!("network {}", input.name))?;
        let rewired = if args.config_model {
            let net = config_counterpart(&original, derive_seed(args.seed, k as u64))
                .with_context(|| format!("rewiring {}", input.name))?;
            Some(net)
        } else {
            None
        };
        entries.push(Entry {
            name: input.name,
            original,
            rewired,
        });
    }

    ensure_dir(&args.out)?;
    write_networks(&args.out.join("networks.csv"), &entries)?;
    write_scatter(&args.out.join("scatter.csv"), &entries)?;
    let comparison = if args.config_model {
        let original: Vec<Analysis> = entries.iter().map(|e| e.original.analysis.clone()).collect();
        let rewired: Vec<Analysis> = entries
            .iter()
            .filter_map(|e| e.rewired.as_ref().map(|r| r.analysis.clone()))
            .collect();
        let cmp = compare_original_vs_config(&original, &rewired)?;
        write_comparison(&args.out.join("comparison.csv"), &entries, &cmp)?;
        write_slopes(&args.out.join("slopes.csv"), &cmp)?;
        Some(cmp)
    } else {
        None
    };
    write_json(&args.out.join("summary.json"), &summary_json(&entries, comparison.as_ref()))?;
    print_table(&entries, comparison.as_ref());

    let bad: Vec<String> = entries
        .iter()
        .flat_map(|e| {
            let mut v = vec![(e.name.clone(), "original", &e.original)];
            if let Some(r) = &e.rewired {
                v.push((e.name.clone(), "config", r));
            }
            v
        })
        .filter(|(_, _, net)| !net.analysis.consistency.ok)
        .map(|(name, model, _)| format!("{name} ({model})"))
        .collect();
    if !bad.is_empty() {
        return Err(Failure::Violation(format!("sign rule broken in {}", bad.join(", "))));
    }
    Ok(())
}

fn models(e: &Entry) -> Vec<(&'static str, &PipelineNetwork)> {
    let mut v = vec![("original", &e.original)];
    if let Some(r) = &e.rewired {
        v.push(("config", r));
    }
    v
}

fn write_networks(path: &Path, entries: &[Entry]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["network", "model", "nodes", "edges", "p2"];
    header.extend(COMPARISON_METRICS);
    header.push("consistent");
    w.write_record(&header)?;
    for e in entries {
        for (model, net) in models(e) {
            let a = &net.analysis;
            let c = &a.correlations;
            let mut row = vec![
                e.name.clone(),
                model.to_string(),
                a.class.nodes.to_string(),
                a.class.edges.to_string(),
                float(net.p2),
            ];
            row.extend(Paradox::ALL.iter().map(|&p| float(a.gaps.get(p).value)));
            row.extend(
                [c.r_da, c.r_delta_a, c.r_wa, c.r_gamma_a, c.r_d_delta, c.r_w_gamma, c.r_dw]
                    .iter()
                    .map(|r| opt_float(r.value())),
            );
            row.push(a.consistency.ok.to_string());
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_scatter(path: &Path, entries: &[Entry]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["network", "model", "paradox", "correlation", "gap"])?;
    for e in entries {
        for (model, net) in models(e) {
            let a = &net.analysis;
            for p in Paradox::ATTRIBUTE {
                w.write_record([
                    e.name.clone(),
                    model.to_string(),
                    p.key().to_string(),
                    opt_float(a.correlations.associated(p).and_then(|c| c.value())),
                    float(a.gaps.get(p).value),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn write_comparison(path: &Path, entries: &[Entry], cmp: &Comparison) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["network", "metric", "original", "rewired"])?;
    for row in &cmp.rows {
        w.write_record([
            entries[row.network].name.clone(),
            row.metric.to_string(),
            float(row.original),
            float(row.rewired),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn rewired_higher(cmp: &Comparison, metric: &str) -> (usize, usize) {
    let pairs: Vec<_> = cmp.pairs(metric).collect();
    (pairs.iter().filter(|r| r.rewired > r.original).count(), pairs.len())
}

fn write_slopes(path: &Path, cmp: &Comparison) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["metric", "slope", "rewired_higher", "networks"])?;
    for metric in COMPARISON_METRICS {
        let (higher, total) = rewired_higher(cmp, metric);
        w.write_record([
            metric.to_string(),
            opt_float(cmp.slope(metric)),
            higher.to_string(),
            total.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn summary_json(entries: &[Entry], cmp: Option<&Comparison>) -> Value {
    let networks: Vec<Value> = entries
        .iter()
        .map(|e| {
            let mut v = json!({
                "network": e.name,
                "p2": e.original.p2,
                "original": analysis_json(&e.original.analysis),
            });
            if let Some(r) = &e.rewired {
                v["config"] = json!({ "p2": r.p2, "analysis": analysis_json(&r.analysis) });
            }
            v
        })
        .collect();
    let scatter_corr = |pick: fn(&Entry) -> Option<&PipelineNetwork>| -> Value {
        let rows: Vec<_> = entries
            .iter()
            .filter_map(|e| pick(e).map(|n| (e.name.clone(), n.analysis.gaps, n.analysis.correlations)))
            .collect();
        if rows.is_empty() {
            return Value::Null;
        }
        let table = scatter_table(&rows);
        let m: Map<String, Value> = table
            .gap_correlation
            .iter()
            .map(|(p, c)| (p.key().to_string(), corr_json(c)))
            .collect();
        Value::Object(m)
    };
    let mut out = json!({
        "networks": networks,
        "scatter_correlation": {
            "original": scatter_corr(|e| Some(&e.original)),
            "config": scatter_corr(|e| e.rewired.as_ref()),
        },
    });
    if let Some(cmp) = cmp {
        let slopes: Map<String, Value> = COMPARISON_METRICS
            .iter()
            .map(|&m| {
                let (higher, total) = rewired_higher(cmp, m);
                (m.to_string(), json!({ "slope": cmp.slope(m), "rewired_higher": higher, "networks": total }))
            })
            .collect();
        out["slopes"] = Value::Object(slopes);
    }
    out
}

fn print_table(entries: &[Entry], cmp: Option<&Comparison>) {
    print!("{:<14} {:<8} {:>6} {:>7} {:>9}", "network", "model", "nodes", "edges", "p2");
    for p in Paradox::ATTRIBUTE {
        print!(" {:>10}", p.name());
    }
    println!();
    for e in entries {
        for (model, net) in models(e) {
            let a = &net.analysis;
            print!(
                "{:<14} {:<8} {:>6} {:>7} {:>9}",
                e.name,
                model,
                a.class.nodes,
                a.class.edges,
                sig6(net.p2)
            );
            for p in Paradox::ATTRIBUTE {
                print!(" {:>10}", sig6(a.gaps.get(p).value));
            }
            println!();
        }
    }
    if let Some(cmp) = cmp {
        println!();
        println!("{:<10} {:>10} {:>14}", "metric", "slope", "rewired higher");
        for metric in COMPARISON_METRICS {
            let (higher, total) = rewired_higher(cmp, metric);
            let slope = cmp.slope(metric).map_or_else(|| "n/a".to_string(), sig6);
            println!("{metric:<10} {slope:>10} {:>14}", format!("{higher}/{total}"));
        }
    }
}
