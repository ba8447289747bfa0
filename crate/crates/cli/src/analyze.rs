use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use friendship_paradox::ingest::{load_graph, LoadOptions};
use friendship_paradox::{analyze, Analysis, Paradox};

use crate::output::{analysis_json, float, prediction_str, sig6, sig6_corr, verdict_str, write_json, write_out};
use crate::{CmdResult, Failure};

#[derive(clap::Args)]
pub struct Args {
    /// Edge list: `source target [weight]` per line, tab, comma or space separated
    pub edge_file: PathBuf,
    /// Node table with a header row; the first column holds node labels
    #[arg(long)]
    pub attrs: Option<PathBuf>,
    /// Column of the node table to use as the attribute
    #[arg(long, requires = "attrs")]
    pub attr_col: Option<String>,
    /// Fail unless the graph is connected
    #[arg(long)]
    pub strict_connected: bool,
    /// Write the JSON report here (`-` for stdout)
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Write a one-row-per-metric CSV here (`-` for stdout)
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Drop self-loops, duplicate edges and unknown node-table rows instead of failing
    #[arg(long)]
    pub lenient: bool,
    /// Node-table value that means "not reported"
    #[arg(long)]
    pub missing: Option<String>,
}

pub fn run(args: Args) -> CmdResult {
    let options = LoadOptions {
        lenient: args.lenient,
        missing_token: args.missing.clone(),
        delimiter: None,
    };
    let loaded = load_graph(&args.edge_file, args.attrs.as_deref(), &options)
        .with_context(|| format!("loading {}", args.edge_file.display()))?;
    let mut graph = loaded.graph;
    if let Some(meta) = &loaded.metadata {
        let column = match &args.attr_col {
            Some(c) => c.clone(),
            None if meta.columns().len() == 1 => meta.columns()[0].clone(),
            None => return Err(anyhow!("--attr-col is required when the node table has several columns").into()),
        };
        let a = meta.numeric_column(&column, &graph)?;
        graph.set_attributes(Some(a))?;
    }
    if args.strict_connected && !graph.is_connected() {
        return Err(Failure::Input(anyhow!("graph not connected ({} components)", graph.component_count())));
    }
    for (count, what) in [
        (loaded.dropped_isolates, "isolated nodes"),
        (loaded.dropped_duplicates, "duplicate edges"),
        (loaded.dropped_self_loops, "self-loops"),
        (loaded.ignored_metadata_rows, "node-table rows for unknown nodes"),
    ] {
        if count > 0 {
            eprintln!("dropped {count} {what}");
        }
    }

    let analysis = analyze(&graph)?;
    if let Some(path) = &args.json {
        write_json(path, &analysis_json(&analysis))?;
    }
    if let Some(path) = &args.csv {
        write_csv(path, &analysis)?;
    }
    if args.json.is_none() && args.csv.is_none() {
        print_table(&analysis);
    }
    if !analysis.consistency.ok {
        let bad: Vec<&str> = analysis.consistency.violations().map(|d| d.paradox.name()).collect();
        return Err(Failure::Violation(format!("gap sign disagrees with correlation for {}", bad.join(", "))));
    }
    Ok(())
}

fn write_csv(path: &Path, a: &Analysis) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "value", "verdict", "zero", "prediction"])?;
    for (p, g) in a.gaps.iter() {
        w.write_record([
            format!("g_{}", p.key()),
            float(g.value),
            verdict_str(g.verdict).into(),
            g.zero.to_string(),
            String::new(),
        ])?;
    }
    let r = &a.correlations;
    let rows = [
        ("r_d_a", &r.r_da, r.prediction(Paradox::Lafp)),
        ("r_delta_a", &r.r_delta_a, r.prediction(Paradox::Safp)),
        ("r_w_a", &r.r_wa, r.prediction(Paradox::Lwafp)),
        ("r_gamma_a", &r.r_gamma_a, r.prediction(Paradox::Swafp)),
        ("r_d_delta", &r.r_d_delta, None),
        ("r_w_gamma", &r.r_w_gamma, None),
        ("r_d_w", &r.r_dw, None),
    ];
    for (name, c, pred) in rows {
        let value = c.value().map_or_else(|| "undefined".to_string(), float);
        w.write_record([
            name.to_string(),
            value,
            String::new(),
            String::new(),
            pred.map(prediction_str).unwrap_or_default().into(),
        ])?;
    }
    write_out(path, &w.into_inner()?)
}

fn print_table(a: &Analysis) {
    let c = &a.class;
    println!(
        "nodes {}  edges {}  connected {}  regular {}  weighted-regular {}",
        c.nodes, c.edges, c.connected, c.regular, c.weighted_regular
    );
    println!();
    println!("{:<6} {:>14} {:>7}  {:<10} {:>12} {:>10}", "gap", "value", "verdict", "sign corr", "r", "predicts");
    for (p, g) in a.gaps.iter() {
        let verdict = if g.zero { "zero" } else { verdict_str(g.verdict) };
        let (name, r, pred) = match p {
            Paradox::Lafp => ("r(d,a)", sig6_corr(&a.correlations.r_da), a.correlations.prediction(p)),
            Paradox::Safp => ("r(δ,a)", sig6_corr(&a.correlations.r_delta_a), a.correlations.prediction(p)),
            Paradox::Lwafp => ("r(w,a)", sig6_corr(&a.correlations.r_wa), a.correlations.prediction(p)),
            Paradox::Swafp => ("r(γ,a)", sig6_corr(&a.correlations.r_gamma_a), a.correlations.prediction(p)),
            _ => ("", String::new(), None),
        };
        println!(
            "{:<6} {:>14} {:>7}  {:<10} {:>12} {:>10}",
            p.name(),
            sig6(g.value),
            verdict,
            name,
            r,
            pred.map(prediction_str).unwrap_or("")
        );
    }
    println!();
    println!(
        "r(d,δ) {}  r(w,γ) {}  r(d,w) {}",
        sig6_corr(&a.correlations.r_d_delta),
        sig6_corr(&a.correlations.r_w_gamma),
        sig6_corr(&a.correlations.r_dw)
    );
    println!("sign rule consistent: {}", a.consistency.ok);
}
