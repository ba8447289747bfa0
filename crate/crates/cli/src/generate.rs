use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use friendship_paradox::generators::{
    accept_graph, campus_corpus, derive_seed, generate_gnp, synthesize_attributes, Acceptance, ConditionSpec,
    GnpSpec,
};
use friendship_paradox::ingest::{write_attribute_table, write_edge_list};

use crate::output::ensure_dir;
use crate::pipeline::{EDGE_SUFFIX, META_SUFFIX};
use crate::CmdResult;

#[derive(clap::Subcommand)]
pub enum Command {
    /// One G(n, p) graph with integer weights
    Gnp(GnpArgs),
    /// Two-block campus networks with gender and year columns
    Campus(CampusArgs),
}

#[derive(clap::Args)]
pub struct GnpArgs {
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    #[arg(long, default_value_t = 0.02)]
    pub p: f64,
    #[arg(long, default_value_t = 10)]
    pub max_weight: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Redraw until the graph is connected and neither regular nor weighted-regular
    #[arg(long)]
    pub accept: bool,
    /// Also write attributes for condition j (-100..=100)
    #[arg(long, allow_hyphen_values = true, requires = "attrs_out")]
    pub condition: Option<i32>,
    #[arg(long)]
    pub attrs_out: Option<PathBuf>,
    /// Edge list output (tab separated)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(clap::Args)]
pub struct CampusArgs {
    #[arg(long, default_value_t = 20)]
    pub networks: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Directory for NAME.edges.tsv and NAME.meta.tsv files
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Gnp(args) => gnp(args),
        Command::Campus(args) => campus(args),
    }
}

fn gnp(args: GnpArgs) -> CmdResult {
    let mut spec = GnpSpec {
        n: args.n,
        p: args.p,
        max_weight: args.max_weight,
        seed: args.seed,
    };
    let mut attempt = 0;
    let g = loop {
        let g = generate_gnp(&spec)?;
        match accept_graph(&g) {
            Acceptance::Reject(_) if args.accept => {
                attempt += 1;
                if attempt >= 1000 {
                    return Err(anyhow!("no acceptable graph in 1000 draws").into());
                }
                spec.seed = derive_seed(args.seed, attempt);
            }
            _ => break g,
        }
    };
    fs::write(&args.out, write_edge_list(&g)).with_context(|| format!("writing {}", args.out.display()))?;
    if let (Some(j), Some(path)) = (args.condition, &args.attrs_out) {
        let degree: Vec<usize> = (0..g.node_count()).map(|i| g.degree(i)).collect();
        let a = synthesize_attributes(&degree, ConditionSpec::new(j)?, spec.seed);
        let with_attrs = g.clone().with_attributes(a)?;
        let table = write_attribute_table(&with_attrs, "attribute").expect("attributes set");
        fs::write(path, table).with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!("n={} m={} seed={}", g.node_count(), g.edge_count(), spec.seed);
    Ok(())
}

fn campus(args: CampusArgs) -> CmdResult {
    ensure_dir(&args.out)?;
    let width = args.networks.saturating_sub(1).to_string().len().max(2);
    for (k, (g, meta)) in campus_corpus(args.seed, args.networks)?.into_iter().enumerate() {
        let name = format!("campus_{k:0width$}");
        let edges = args.out.join(format!("{name}{EDGE_SUFFIX}"));
        fs::write(&edges, write_edge_list(&g)).with_context(|| format!("writing {}", edges.display()))?;
        let meta_path = args.out.join(format!("{name}{META_SUFFIX}"));
        fs::write(&meta_path, meta.to_delimited(&g, '\t', ""))
            .with_context(|| format!("writing {}", meta_path.display()))?;
    }
    Ok(())
}
