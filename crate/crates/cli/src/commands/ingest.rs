//! `boolsketch ingest`: parse a 6-column message log and write one
//! hypergraph JSON per requested window, plus a manifest.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::Args;

use boolsketch::ingest::{build_window_hypergraph, parse_log, WindowSpec};

use crate::config::{pick, FileConfig};
use crate::{report, CliError};

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Message log (whitespace-separated 6-column rows)
    pub input: PathBuf,
    /// Window length in seconds
    #[arg(long)]
    pub delta_t: Option<u32>,
    /// Zipcodes to keep (comma separated); all observed when absent
    #[arg(long, value_delimiter = ',')]
    pub zipcodes: Option<Vec<String>>,
    /// Window indices to build (comma separated); all nonempty when absent
    #[arg(long, value_delimiter = ',')]
    pub windows: Option<Vec<u64>>,
    /// Consecutive windows pooled into the ambient node set
    #[arg(long)]
    pub ambient: Option<u32>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(serde::Serialize)]
struct WindowEntry {
    index: u64,
    n: usize,
    s: usize,
    d: usize,
    nodes: Vec<String>,
    merged_edges: usize,
    dropped_singletons: usize,
    path: String,
}

#[derive(serde::Serialize)]
struct Manifest {
    input: String,
    delta_t: u32,
    ambient_windows: u32,
    zipcodes: Vec<String>,
    windows: Vec<WindowEntry>,
}

pub fn run(args: IngestArgs) -> Result<(), CliError> {
    let cfg = FileConfig::load(args.config.as_deref())?;
    let delta_t = pick(args.delta_t, cfg.delta_t, 60);
    let ambient = pick(args.ambient, cfg.ambient_windows, 10);

    let file = std::fs::File::open(&args.input)
        .map_err(|e| CliError::io(&format!("opening {}", args.input.display()), e))?;
    let records = parse_log(std::io::BufReader::new(file))
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.input.display())))?;

    let zipcodes: BTreeSet<String> = match args.zipcodes.clone().or(cfg.zipcodes.clone()) {
        Some(z) => z.into_iter().collect(),
        None => records.iter().map(|r| r.zipcode.clone()).collect(),
    };
    if zipcodes.is_empty() {
        return Err(CliError::Usage("no zipcodes to filter on (empty log?)".into()));
    }

    let indices: Vec<u64> = match args.windows.clone().or(cfg.windows.clone()) {
        Some(w) => w,
        None => {
            let mut seen: BTreeSet<u64> = BTreeSet::new();
            for r in &records {
                if zipcodes.contains(&r.zipcode) {
                    seen.insert(r.abs_time() / delta_t as u64);
                }
            }
            seen.into_iter().collect()
        }
    };

    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::io(&format!("creating {}", out_dir.display()), e))?;

    let mut entries = Vec::new();
    for index in indices {
        let spec = WindowSpec::new(delta_t, index, zipcodes.clone(), ambient)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let build = build_window_hypergraph(&records, &spec)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let path = out_dir.join(format!("window_{index}.json"));
        report::write_out(Some(&path), &report::to_json_doc(&build.graph)?)?;
        entries.push(WindowEntry {
            index,
            n: build.graph.n(),
            s: build.graph.s(),
            d: build.graph.d(),
            nodes: build.nodes,
            merged_edges: build.merged_edges,
            dropped_singletons: build.dropped_singletons,
            path: path.display().to_string(),
        });
    }

    let manifest = report::stamp(Manifest {
        input: args.input.display().to_string(),
        delta_t,
        ambient_windows: ambient,
        zipcodes: zipcodes.into_iter().collect(),
        windows: entries,
    });
    report::write_json(Some(&out_dir.join("manifest.json")), &manifest)?;
    Ok(())
}
