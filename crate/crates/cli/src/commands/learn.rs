//! `boolsketch learn`: run the noiseless or noisy learner against a planted
//! polynomial, emitting the outcome (or a stage-tagged failure) as JSON.

use std::path::PathBuf;

use clap::Args;

use boolsketch::fourier::SparsePolynomial;
use boolsketch::learn::{learn_bool, learn_bool_noisy, LearnConfig, LearnError, LearnOutcome};
use boolsketch::sampling::{ExactOracle, NoiseSpec, NoisyOracle};

use crate::config::{pick, FileConfig};
use crate::{report, CliError};

#[derive(Args, Debug)]
pub struct LearnArgs {
    /// Planted polynomial JSON
    pub input: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sparsity bound; defaults to the planted sparsity
    #[arg(long)]
    pub s: Option<usize>,
    /// Identification samples (default 2 n 2^s)
    #[arg(long)]
    pub m1: Option<usize>,
    /// Recovery samples (default 4096 n s^2)
    #[arg(long)]
    pub m: Option<usize>,
    /// Observation noise bound; a positive value switches to the noisy path
    #[arg(long)]
    pub eps: Option<f64>,
    /// Tail slack; a positive value switches to the noisy path
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(serde::Serialize)]
struct LearnDoc<'a> {
    input: String,
    seed: u64,
    s: usize,
    m1: usize,
    m: usize,
    eps: f64,
    nu: f64,
    #[serde(flatten)]
    outcome: &'a LearnOutcome,
}

pub fn run(args: LearnArgs) -> Result<(), CliError> {
    let cfg = FileConfig::load(args.config.as_deref())?;
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::io(&format!("reading {}", args.input.display()), e))?;
    let planted: SparsePolynomial = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.input.display())))?;

    let seed = pick(args.seed, cfg.seed, 0);
    let s = pick(args.s, cfg.s, planted.sparsity().max(1));
    let eps = pick(args.eps, cfg.eps, 0.0);
    let nu = pick(args.nu, cfg.nu, 0.0);
    let mut config = LearnConfig::for_dimension(planted.n(), s);
    if let Some(m1) = args.m1.or(cfg.m1) {
        config = config.with_m1(m1);
    }
    if let Some(m) = args.m.or(cfg.m) {
        config = config.with_m(m);
    }

    let result = if eps > 0.0 || nu > 0.0 {
        let spec = NoiseSpec::new(eps, nu, None)
            .map_err(|e| CliError::Usage(format!("noise spec: {e}")))?;
        config = config.with_noise(spec.clone());
        let oracle = NoisyOracle::new(planted, spec)
            .map_err(|e| CliError::Usage(format!("noise spec: {e}")))?;
        learn_bool_noisy(&oracle, &config, seed)
    } else {
        let oracle = ExactOracle::new(planted);
        learn_bool(&oracle, &config, seed)
    };

    match result {
        Ok(outcome) => {
            let doc = report::stamp(LearnDoc {
                input: args.input.display().to_string(),
                seed,
                s,
                m1: config.m1,
                m: config.m,
                eps,
                nu,
                outcome: &outcome,
            });
            report::write_json(args.out.as_deref(), &doc)
        }
        Err(err) => {
            let stage = match &err {
                LearnError::Failed { stage, .. } => stage.to_string(),
                LearnError::Config(_) => return Err(CliError::Usage(err.to_string())),
                LearnError::Sampling(_) => "sampling".to_string(),
            };
            let doc = report::stamp(report::FailureDoc { error: err.to_string(), stage: stage.clone() });
            report::write_json(args.out.as_deref(), &doc)?;
            Err(CliError::Algorithm { stage, message: err.to_string() })
        }
    }
}
