//! `boolsketch gen`: write a planted polynomial or hypergraph plus a seeded
//! sample batch, or a synthetic message log with its window ground truth.

use std::path::PathBuf;

use clap::Args;

use boolsketch::hypergraph::CutOracle;
use boolsketch::ingest::{synth_log, SynthParams};
use boolsketch::sampling::{draw_batch, write_batch_csv, ExactOracle};

use crate::config::{pick, pick_required, FileConfig};
use crate::instances::{gen_hypergraph, gen_polynomial, rng_for, CoefficientFamily};
use crate::{report, CliError};

#[derive(Args, Debug)]
pub struct GenArgs {
    /// What to generate: poly, graph, or log
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ambient dimension (poly) or vertex count (graph)
    #[arg(long)]
    pub n: Option<usize>,
    /// Sparsity (poly) or edge count (graph)
    #[arg(long)]
    pub s: Option<usize>,
    /// Maximum edge size (graph)
    #[arg(long)]
    pub d: Option<usize>,
    /// Coefficient family for poly: general, independent, or positive
    #[arg(long)]
    pub condition: Option<String>,
    /// Size of the accompanying sample batch
    #[arg(long)]
    pub m1: Option<usize>,
    /// Output directory (default: current directory)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: GenArgs) -> Result<(), CliError> {
    let cfg = FileConfig::load(args.config.as_deref())?;
    let kind = pick_required(args.kind.clone(), cfg.kind.clone(), "--kind")?;
    let seed = pick(args.seed, cfg.seed, 0);
    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::io(&format!("creating {}", out_dir.display()), e))?;

    match kind.as_str() {
        "poly" => {
            let n = pick(args.n, cfg.n, 30);
            let s = pick(args.s, cfg.s, 3);
            let family: CoefficientFamily = pick(
                args.condition.clone(),
                cfg.condition.clone(),
                "general".to_string(),
            )
            .parse()?;
            let mut rng = rng_for(seed);
            let poly = gen_polynomial(n, s, family, &mut rng);
            let m1 = pick(args.m1, cfg.m1, 2 * n * (1usize << s.min(20)));

            let poly_path = out_dir.join("poly.json");
            report::write_out(Some(&poly_path), &report::to_json_doc(&poly)?)?;

            let oracle = ExactOracle::new(poly);
            let batch = draw_batch(&oracle, m1, seed)
                .map_err(|e| CliError::Usage(format!("sampling: {e}")))?;
            let mut csv = Vec::new();
            write_batch_csv(&mut csv, &batch).map_err(|e| CliError::io("writing batch", e))?;
            let batch_path = out_dir.join("samples.csv");
            std::fs::write(&batch_path, &csv)
                .map_err(|e| CliError::io(&format!("writing {}", batch_path.display()), e))?;
            println!("{} {}", poly_path.display(), batch_path.display());
        }
        "graph" => {
            let n = pick(args.n, cfg.n, 200);
            let s = pick(args.s, cfg.s, 3);
            let d = pick(args.d, cfg.d, 4);
            if d < 2 || d > n {
                return Err(CliError::Usage(format!("d = {d} out of range for n = {n}")));
            }
            let mut rng = rng_for(seed);
            let graph = gen_hypergraph(n, s, d, &mut rng);
            let graph_path = out_dir.join("graph.json");
            report::write_out(Some(&graph_path), &report::to_json_doc(&graph)?)?;

            let m1 = pick(args.m1, cfg.m1, 4096);
            let oracle = CutOracle::new(graph);
            let batch = draw_batch(&oracle, m1, seed)
                .map_err(|e| CliError::Usage(format!("sampling: {e}")))?;
            let mut csv = Vec::new();
            write_batch_csv(&mut csv, &batch).map_err(|e| CliError::io("writing batch", e))?;
            let batch_path = out_dir.join("samples.csv");
            std::fs::write(&batch_path, &csv)
                .map_err(|e| CliError::io(&format!("writing {}", batch_path.display()), e))?;
            println!("{} {}", graph_path.display(), batch_path.display());
        }
        "log" => {
            let params = cfg.synth.clone().unwrap_or_else(SynthParams::default);
            let out = synth_log(&params, seed);
            let log_path = out_dir.join("messages.log");
            std::fs::write(&log_path, &out.log)
                .map_err(|e| CliError::io(&format!("writing {}", log_path.display()), e))?;
            let truth_path = out_dir.join("truth.json");
            #[derive(serde::Serialize)]
            struct TruthDoc<'a> {
                delta_t: u32,
                windows: &'a [boolsketch::ingest::WindowTruth],
            }
            report::write_out(
                Some(&truth_path),
                &report::to_json_doc(&TruthDoc { delta_t: params.delta_t, windows: &out.truth })?,
            )?;
            println!("{} {}", log_path.display(), truth_path.display());
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown kind {other:?} (expected poly, graph, or log)"
            )))
        }
    }
    Ok(())
}
