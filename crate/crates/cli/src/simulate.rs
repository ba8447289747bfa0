use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use friendship_paradox::simulation::{run_sweep, SimulationError, SweepResult, SweepSpec};
use friendship_paradox::Paradox;
use serde_json::{json, Value};

use crate::output::{corr_json, ensure_dir, float, opt_float, sig6, write_json};
use crate::{CmdResult, Failure};

#[derive(clap::Args)]
pub struct Args {
    /// Nodes per graph [default: 300, or 1000 with --paper-scale]
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability [default: 0.02]
    #[arg(long)]
    pub p: Option<f64>,
    /// Accepted graphs to draw [default: 200, or 1000 with --paper-scale]
    #[arg(long)]
    pub runs: Option<usize>,
    /// Conditions j, e.g. `-5..5`, `0` or `-3,0,3` (ranges are inclusive)
    /// [default: -5..5, or -100..100 with --paper-scale]
    #[arg(long, allow_hyphen_values = true)]
    pub conditions: Option<String>,
    /// Largest integer edge weight
    #[arg(long, default_value_t = 10)]
    pub max_weight: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Graph draws allowed per run before giving up
    #[arg(long, default_value_t = 1000)]
    pub max_attempts: usize,
    /// Start from n = 1000, 1000 runs and j in -100..100
    #[arg(long)]
    pub paper_scale: bool,
    /// Output directory for conditions.csv, scatter.csv and summary.json
    #[arg(long)]
    pub out: PathBuf,
}

pub fn parse_conditions(text: &str) -> anyhow::Result<Vec<i32>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        // a leading minus belongs to the first bound, so split after it
        let split = part.get(1..).and_then(|rest| rest.find("..")).map(|k| k + 1);
        match split {
            Some(k) => {
                let lo: i32 = part[..k].trim().parse().with_context(|| format!("bad range {part:?}"))?;
                let hi = part[k + 2..].trim_start_matches('=');
                let hi: i32 = hi.trim().parse().with_context(|| format!("bad range {part:?}"))?;
                if lo > hi {
                    bail!("empty range {part:?}");
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().with_context(|| format!("bad condition {part:?}"))?),
        }
    }
    if out.is_empty() {
        bail!("no conditions given");
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn spec_from(args: &Args) -> anyhow::Result<SweepSpec> {
    let mut spec = if args.paper_scale {
        SweepSpec::paper(args.seed)
    } else {
        SweepSpec::desk(args.seed)
    };
    if let Some(n) = args.n {
        spec.graph.n = n;
    }
    if let Some(p) = args.p {
        spec.graph.p = p;
    }
    if let Some(runs) = args.runs {
        spec.runs = runs;
    }
    if let Some(c) = &args.conditions {
        spec.conditions = parse_conditions(c)?;
    }
    spec.graph.max_weight = args.max_weight;
    spec.max_attempts = args.max_attempts;
    Ok(spec)
}

pub fn run(args: Args) -> CmdResult {
    let spec = spec_from(&args)?;
    let start = Instant::now();
    let result = match run_sweep(&spec) {
        Ok(r) => r,
        Err(e @ SimulationError::SignRuleViolation { .. }) => return Err(Failure::Violation(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    eprintln!("{} runs in {:.2?}", spec.runs, start.elapsed());
    ensure_dir(&args.out)?;
    write_conditions(&args.out.join("conditions.csv"), &result)?;
    write_scatter(&args.out.join("scatter.csv"), &result)?;
    write_json(&args.out.join("summary.json"), &summary_json(&result)?)?;
    print_table(&result);
    Ok(())
}

fn write_conditions(path: &PathBuf, result: &SweepResult) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "j",
        "paradox",
        "runs",
        "failures",
        "failure_proportion",
        "zero_gaps",
        "corr_mean",
        "corr_sd",
        "corr_defined",
        "corr_undefined",
        "scatter_corr",
        "sign_rule_violations",
    ])?;
    for cond in &result.summary.conditions {
        let scatter = result.scatter(cond.j);
        for (p, tally) in &cond.paradoxes {
            let stat = cond.correlations.get(p);
            let scatter_corr = scatter.gap_correlation.get(p).and_then(|c| c.value());
            w.write_record([
                cond.j.to_string(),
                p.key().to_string(),
                cond.runs.to_string(),
                tally.failures.to_string(),
                float(tally.failure_proportion),
                tally.zero_gaps.to_string(),
                opt_float(stat.and_then(|s| s.mean)),
                opt_float(stat.and_then(|s| s.sd)),
                stat.map(|s| s.defined.to_string()).unwrap_or_default(),
                stat.map(|s| s.undefined.to_string()).unwrap_or_default(),
                opt_float(scatter_corr),
                cond.sign_rule_violations.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_scatter(path: &PathBuf, result: &SweepResult) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["j", "run", "paradox", "correlation", "gap"])?;
    for run in &result.runs {
        for o in &run.outcomes {
            for p in Paradox::ATTRIBUTE {
                let c = o.correlations.associated(p).and_then(|c| c.value());
                w.write_record([
                    o.j.to_string(),
                    run.run.to_string(),
                    p.key().to_string(),
                    opt_float(c),
                    float(o.gaps.get(p).value),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn summary_json(result: &SweepResult) -> anyhow::Result<Value> {
    let mut value = serde_json::to_value(&result.summary)?;
    let conditions = value["conditions"].as_array_mut().expect("conditions array");
    for (entry, cond) in conditions.iter_mut().zip(&result.summary.conditions) {
        let scatter = result.scatter(cond.j);
        let per: serde_json::Map<String, Value> = scatter
            .gap_correlation
            .iter()
            .map(|(p, c)| (p.key().to_string(), corr_json(c)))
            .collect();
        entry["scatter_correlation"] = json!(per);
    }
    Ok(value)
}

fn print_table(result: &SweepResult) {
    let s = &result.summary;
    println!("failure proportion by condition");
    print!("{:>5}", "j");
    for p in Paradox::ATTRIBUTE {
        print!(" {:>9}", p.name());
    }
    println!(" {:>9}", "others");
    for c in &s.conditions {
        print!("{:>5}", c.j);
        for p in Paradox::ATTRIBUTE {
            print!(" {:>9}", sig6(c.paradoxes[&p].failure_proportion));
        }
        let others: usize = Paradox::STRUCTURAL.iter().map(|p| c.paradoxes[p].failures).sum();
        println!(" {:>9}", others);
    }
    let t = &s.topology;
    let show = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), sig6);
    println!(
        "mean r(d,δ) {}  r(w,γ) {}  r(d,w) {}",
        show(t.r_d_delta.mean),
        show(t.r_w_gamma.mean),
        show(t.r_dw.mean)
    );
    let discarded: usize = s.discarded.values().sum();
    println!("discarded graphs {discarded}  sign-rule violations {}", s.sign_rule_violations);
}
