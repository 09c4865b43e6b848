//! `boolsketch bench`: seeded trial sweeps over sample scale (error rate)
//! or over the vertex count (runtime), with per-trial CSV rows and an
//! aggregate summary. Trials run in a worker pool; per-trial seeds derive
//! from the master seed alone, so results do not depend on `--jobs`.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use boolsketch::hypergraph::{c_cut_polynomial, learn_graph, CutOracle, GraphConfig};
use boolsketch::sampling::lane_seed;

use crate::config::{pick, FileConfig};
use crate::instances::{gen_hypergraph, rng_for};
use crate::{report, CliError};

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Sweep mode: error (failure rate vs sample scale) or runtime
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Worker pool size (default: all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Vertex count for the error sweep
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge count of generated instances
    #[arg(long)]
    pub s: Option<usize>,
    /// Max edge size of generated instances
    #[arg(long)]
    pub d: Option<usize>,
    /// Sample-scale grid for the error sweep (comma separated)
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Vertex-count grid for the runtime sweep (comma separated)
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    /// Grid point label: the alpha value or the vertex count.
    pub point: String,
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    /// Coefficient-vector L2 distance to the planted polynomial; NaN when
    /// the run errored before producing one.
    pub error_l2: f64,
    /// Samples drawn by the identification stage.
    pub samples: usize,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointSummary {
    pub point: String,
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub median_wall_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub mode: String,
    pub n: usize,
    pub s: usize,
    pub d: usize,
    pub master_seed: u64,
    pub points: Vec<PointSummary>,
}

#[derive(Clone, Debug)]
pub struct ErrorSweepSpec {
    pub n: usize,
    pub s: usize,
    pub d: usize,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct RuntimeSweepSpec {
    pub n_grid: Vec<usize>,
    pub s: usize,
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
}

fn run_one_trial(
    n: usize,
    s: usize,
    d: usize,
    alpha: f64,
    point: String,
    trial: usize,
    trial_seed: u64,
) -> TrialRow {
    let mut rng = rng_for(lane_seed(trial_seed, 0));
    let graph = gen_hypergraph(n, s, d, &mut rng);
    let expected = c_cut_polynomial(&graph).expect("planted expansion");
    let oracle = CutOracle::new(graph.clone());
    let config = GraphConfig::new(s).with_d_hint(d).with_sample_scale(alpha);

    let start = Instant::now();
    let outcome = learn_graph(&oracle, &config, lane_seed(trial_seed, 1));
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    match outcome {
        Ok(result) => {
            let error_l2 = result.polynomial.coeff_l2_distance(&expected);
            let success = result.edges == graph && error_l2 == 0.0;
            TrialRow {
                point,
                trial,
                seed: trial_seed,
                success,
                error_l2,
                samples: result.diagnostics.m1_used,
                wall_ms,
            }
        }
        Err(_) => TrialRow {
            point,
            trial,
            seed: trial_seed,
            success: false,
            error_l2: f64::NAN,
            samples: 0,
            wall_ms,
        },
    }
}

/// Failure rate as a function of the sample-scale multiplier alpha.
pub fn run_error_sweep(spec: &ErrorSweepSpec) -> (Vec<TrialRow>, Vec<PointSummary>) {
    let mut rows: Vec<TrialRow> = spec
        .grid
        .iter()
        .enumerate()
        .flat_map(|(pi, &alpha)| {
            (0..spec.trials)
                .into_par_iter()
                .map(move |trial| {
                    let trial_seed = lane_seed(spec.seed, (pi * 1_000_000 + trial) as u64);
                    run_one_trial(
                        spec.n,
                        spec.s,
                        spec.d,
                        alpha,
                        format!("{alpha}"),
                        trial,
                        trial_seed,
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect();
    rows.sort_by(|a, b| {
        a.point
            .parse::<f64>()
            .unwrap()
            .partial_cmp(&b.point.parse::<f64>().unwrap())
            .unwrap()
            .then(a.trial.cmp(&b.trial))
    });
    let summaries = summarize(&rows, spec.grid.iter().map(|a| format!("{a}")).collect());
    (rows, summaries)
}

/// Wall time as a function of the vertex count, at fixed (s, d). Trials run
/// sequentially: concurrent trials contend for memory bandwidth and distort
/// the per-trial timings this sweep exists to measure.
pub fn run_runtime_sweep(spec: &RuntimeSweepSpec) -> (Vec<TrialRow>, Vec<PointSummary>) {
    let mut rows: Vec<TrialRow> = spec
        .n_grid
        .iter()
        .enumerate()
        .flat_map(|(pi, &n)| {
            (0..spec.trials)
                .map(move |trial| {
                    let trial_seed = lane_seed(spec.seed, (pi * 1_000_000 + trial) as u64);
                    run_one_trial(n, spec.s, spec.d, 1.0, format!("{n}"), trial, trial_seed)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    rows.sort_by(|a, b| {
        a.point
            .parse::<usize>()
            .unwrap()
            .cmp(&b.point.parse::<usize>().unwrap())
            .then(a.trial.cmp(&b.trial))
    });
    let summaries = summarize(&rows, spec.n_grid.iter().map(|n| format!("{n}")).collect());
    (rows, summaries)
}

fn summarize(rows: &[TrialRow], point_order: Vec<String>) -> Vec<PointSummary> {
    point_order
        .into_iter()
        .map(|point| {
            let of_point: Vec<&TrialRow> = rows.iter().filter(|r| r.point == point).collect();
            let failures = of_point.iter().filter(|r| !r.success).count();
            let mut walls: Vec<f64> = of_point.iter().map(|r| r.wall_ms).collect();
            walls.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median_wall_ms = if walls.is_empty() {
                0.0
            } else {
                walls[walls.len() / 2]
            };
            PointSummary {
                point,
                trials: of_point.len(),
                failures,
                failure_rate: failures as f64 / of_point.len().max(1) as f64,
                median_wall_ms,
            }
        })
        .collect()
}

pub fn rows_to_csv(rows: &[TrialRow]) -> String {
    let mut csv = String::from("point,trial,seed,success,error_l2,samples,wall_ms\n");
    for r in rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{:.3}\n",
            r.point, r.trial, r.seed, r.success, r.error_l2, r.samples, r.wall_ms
        ));
    }
    csv
}

pub fn run(args: BenchArgs) -> Result<SweepReport, CliError> {
    let cfg = FileConfig::load(args.config.as_deref())?;
    let mode = pick(args.mode.clone(), cfg.mode.clone(), "error".to_string());
    let seed = pick(args.seed, cfg.seed, 0);
    let jobs = args.jobs.or(cfg.jobs);
    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::io(&format!("creating {}", out_dir.display()), e))?;

    let in_pool = |f: &(dyn Fn() -> (Vec<TrialRow>, Vec<PointSummary>) + Sync)| match jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| CliError::Usage(format!("worker pool: {e}")))
            .map(|pool| pool.install(f)),
        None => Ok(f()),
    };

    let (label, n, s, d, rows, points) = match mode.as_str() {
        "error" => {
            let spec = ErrorSweepSpec {
                n: pick(args.n, cfg.n, 60),
                s: pick(args.s, cfg.s, 2),
                d: pick(args.d, cfg.d, 3),
                grid: pick(
                    args.grid.clone(),
                    cfg.grid.clone(),
                    vec![0.002, 0.005, 0.02, 0.1],
                ),
                trials: pick(args.trials, cfg.trials, 50),
                seed,
            };
            if spec.trials < 1 {
                return Err(CliError::Usage("trials must be at least 1".into()));
            }
            let (rows, points) = in_pool(&|| run_error_sweep(&spec))?;
            ("error", spec.n, spec.s, spec.d, rows, points)
        }
        "runtime" => {
            let spec = RuntimeSweepSpec {
                n_grid: pick(
                    args.n_grid.clone(),
                    cfg.n_grid.clone(),
                    vec![88, 159, 288, 556, 1221],
                ),
                s: pick(args.s, cfg.s, 1),
                d: pick(args.d, cfg.d, 3),
                trials: pick(args.trials, cfg.trials, 3),
                seed,
            };
            if spec.trials < 1 {
                return Err(CliError::Usage("trials must be at least 1".into()));
            }
            let (rows, points) = in_pool(&|| run_runtime_sweep(&spec))?;
            ("runtime", 0, spec.s, spec.d, rows, points)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown mode {other:?} (expected error or runtime)"
            )))
        }
    };

    let csv_path = out_dir.join(format!("bench_{label}_trials.csv"));
    std::fs::write(&csv_path, rows_to_csv(&rows))
        .map_err(|e| CliError::io(&format!("writing {}", csv_path.display()), e))?;

    let sweep = SweepReport {
        mode: label.to_string(),
        n,
        s,
        d,
        master_seed: seed,
        points,
    };
    let summary_path = out_dir.join(format!("bench_{label}_summary.json"));
    report::write_json(Some(&summary_path), &report::stamp(sweep.clone()))?;
    println!("{} {}", csv_path.display(), summary_path.display());
    Ok(sweep)
}
