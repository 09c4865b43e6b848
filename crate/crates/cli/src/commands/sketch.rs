//! `boolsketch sketch`: learn a hypergraph's cut-complement polynomial from
//! random queries and reconstruct its edges.

use std::path::PathBuf;

use clap::Args;

use boolsketch::hypergraph::{learn_graph, CutOracle, GraphConfig, Hypergraph, SketchError, SketchResult};

use crate::config::{pick, FileConfig};
use crate::{report, CliError};

#[derive(Args, Debug)]
pub struct SketchArgs {
    /// Hypergraph JSON to query
    pub input: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Edge count bound; defaults to the instance's actual edge count
    #[arg(long)]
    pub s: Option<usize>,
    /// Known max edge size; estimated from data when absent
    #[arg(long)]
    pub d: Option<usize>,
    /// Explicit sample count override
    #[arg(long)]
    pub m1: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(serde::Serialize)]
struct SketchDoc<'a> {
    input: String,
    seed: u64,
    s: usize,
    #[serde(flatten)]
    result: &'a SketchResult,
}

pub fn run(args: SketchArgs) -> Result<(), CliError> {
    let cfg = FileConfig::load(args.config.as_deref())?;
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::io(&format!("reading {}", args.input.display()), e))?;
    let graph: Hypergraph = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.input.display())))?;

    let seed = pick(args.seed, cfg.seed, 0);
    let s = pick(args.s, cfg.s, graph.s().max(1));
    let mut config = GraphConfig::new(s);
    if let Some(d) = args.d.or(cfg.d) {
        config = config.with_d_hint(d);
    }
    if let Some(m1) = args.m1.or(cfg.m1) {
        config = config.with_m1(m1);
    }

    let oracle = CutOracle::new(graph);
    match learn_graph(&oracle, &config, seed) {
        Ok(result) => {
            let doc = report::stamp(SketchDoc {
                input: args.input.display().to_string(),
                seed,
                s,
                result: &result,
            });
            report::write_json(args.out.as_deref(), &doc)
        }
        Err(err) => {
            let stage = match &err {
                SketchError::Config(_) => return Err(CliError::Usage(err.to_string())),
                SketchError::Sampling(_) => "sampling",
                SketchError::Hypergraph(_) => "oracle",
                SketchError::GridAmbiguous { .. } => "grid_rounding",
                SketchError::ComponentTooLarge { .. } => "component",
                SketchError::Reconstruct(_) => "reconstruction",
            }
            .to_string();
            let doc = report::stamp(report::FailureDoc { error: err.to_string(), stage: stage.clone() });
            report::write_json(args.out.as_deref(), &doc)?;
            Err(CliError::Algorithm { stage, message: err.to_string() })
        }
    }
}
