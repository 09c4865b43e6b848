//! Timestamped message-log parsing and windowed difference hypergraphs:
//! transmitting users become hyperedges over the receiving users active in a
//! window, filtered by a zipcode set. A seeded synthetic generator stands in
//! for real logs and emits its per-window ground truth alongside.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use rand::SeedableRng;
use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{Hypergraph, HypergraphError};

pub const SECONDS_PER_DAY: u32 = 86_400;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("invalid window spec: {0}")]
    InvalidWindow(String),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One log row: day and second-of-day stamps, transmitter, zipcode of
/// transmission, receiver, and the contact-list flag (parsed and carried,
/// not used).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageRecord {
    pub day: u32,
    pub time: u32,
    pub tx_id: String,
    pub zipcode: String,
    pub rx_id: String,
    pub in_contact: bool,
}

impl MessageRecord {
    /// Seconds since the start of day 1.
    pub fn abs_time(&self) -> u64 {
        (self.day as u64 - 1) * SECONDS_PER_DAY as u64 + self.time as u64
    }
}

/// Parses whitespace-separated 6-column rows, aborting on the first
/// malformed line.
pub fn parse_log(reader: impl BufRead) -> Result<Vec<MessageRecord>, IngestError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(IngestError::MalformedLine {
                line: lineno,
                reason: format!("expected 6 columns, found {}", fields.len()),
            });
        }
        let day: u32 = fields[0].parse().map_err(|e| IngestError::MalformedLine {
            line: lineno,
            reason: format!("bad day {:?}: {e}", fields[0]),
        })?;
        if day == 0 {
            return Err(IngestError::MalformedLine {
                line: lineno,
                reason: "day must be at least 1".into(),
            });
        }
        let time: u32 = fields[1].parse().map_err(|e| IngestError::MalformedLine {
            line: lineno,
            reason: format!("bad time {:?}: {e}", fields[1]),
        })?;
        if time >= SECONDS_PER_DAY {
            return Err(IngestError::MalformedLine {
                line: lineno,
                reason: format!("time {time} outside a day"),
            });
        }
        let in_contact = match fields[5] {
            "y" => true,
            "n" => false,
            other => {
                return Err(IngestError::MalformedLine {
                    line: lineno,
                    reason: format!("contact flag must be y or n, found {other:?}"),
                })
            }
        };
        out.push(MessageRecord {
            day,
            time,
            tx_id: fields[2].to_string(),
            zipcode: fields[3].to_string(),
            rx_id: fields[4].to_string(),
            in_contact,
        });
    }
    Ok(out)
}

/// A window on the global `delta_t` grid anchored at the start of day 1,
/// plus the zipcode filter and the number of consecutive windows pooled to
/// define the ambient node set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowSpec {
    pub delta_t: u32,
    pub index: u64,
    pub zipcodes: BTreeSet<String>,
    pub ambient_windows: u32,
}

impl WindowSpec {
    pub fn new(
        delta_t: u32,
        index: u64,
        zipcodes: BTreeSet<String>,
        ambient_windows: u32,
    ) -> Result<Self, IngestError> {
        if delta_t == 0 {
            return Err(IngestError::InvalidWindow("delta_t must be positive".into()));
        }
        if zipcodes.is_empty() {
            return Err(IngestError::InvalidWindow("zipcode set must be nonempty".into()));
        }
        if ambient_windows == 0 {
            return Err(IngestError::InvalidWindow(
                "ambient window count must be at least 1".into(),
            ));
        }
        Ok(WindowSpec { delta_t, index, zipcodes, ambient_windows })
    }

    /// Which window a record falls in; the grid partitions time exactly.
    pub fn window_of(&self, record: &MessageRecord) -> u64 {
        record.abs_time() / self.delta_t as u64
    }

    /// The ambient block: the run of `ambient_windows` consecutive windows
    /// containing this one.
    fn block_range(&self) -> std::ops::Range<u64> {
        let m = self.ambient_windows as u64;
        let start = self.index / m * m;
        start..start + m
    }
}

/// A built window: the hypergraph over the pooled receivers, the node index
/// map, and merge/drop counters.
#[derive(Clone, Debug, Serialize)]
pub struct WindowBuild {
    pub graph: Hypergraph,
    /// Node index -> receiver id.
    pub nodes: Vec<String>,
    /// Transmitters whose receiver set duplicated another's and was merged.
    pub merged_edges: usize,
    /// Transmitters with at most one receiver in the window (masked).
    pub dropped_singletons: usize,
}

/// Restricts records to the window's span and zipcode set, groups receiver
/// sets by transmitter, drops size <= 1 edges and merges duplicates. The
/// ambient node set is the union of receivers active (with a matching
/// zipcode) anywhere in the surrounding block of windows.
pub fn build_window_hypergraph(
    records: &[MessageRecord],
    spec: &WindowSpec,
) -> Result<WindowBuild, IngestError> {
    let block = spec.block_range();
    let mut pool: BTreeSet<&str> = BTreeSet::new();
    for r in records {
        if spec.zipcodes.contains(&r.zipcode) && block.contains(&spec.window_of(r)) {
            pool.insert(&r.rx_id);
        }
    }
    let nodes: Vec<String> = pool.iter().map(|s| s.to_string()).collect();
    let index_of: BTreeMap<&str, usize> =
        nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

    let mut by_tx: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for r in records {
        if spec.zipcodes.contains(&r.zipcode) && spec.window_of(r) == spec.index {
            by_tx.entry(&r.tx_id).or_default().insert(index_of[r.rx_id.as_str()]);
        }
    }

    let mut dropped_singletons = 0;
    let mut merged_edges = 0;
    let mut edge_sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (_tx, receivers) in by_tx {
        if receivers.len() <= 1 {
            dropped_singletons += 1;
            continue;
        }
        let edge: Vec<usize> = receivers.into_iter().collect();
        if !edge_sets.insert(edge) {
            merged_edges += 1;
        }
    }
    if merged_edges > 0 {
        log::debug!(
            "window {}: merged {merged_edges} duplicate transmitter edges",
            spec.index
        );
    }
    let edges: Vec<Vec<usize>> = edge_sets.into_iter().collect();
    let graph = Hypergraph::from_edges(nodes.len(), &edges)?;
    Ok(WindowBuild { graph, nodes, merged_edges, dropped_singletons })
}

/// Knobs for the synthetic log generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthParams {
    pub tx_users: usize,
    pub rx_users: usize,
    pub zipcodes: usize,
    pub delta_t: u32,
    pub windows: u64,
    /// Expected number of active transmitters per window (Poisson).
    pub rate: f64,
    /// Largest receiver set an active transmitter messages.
    pub max_edge: usize,
    /// Probability an active transmitter messages a single receiver, which
    /// the window build then masks.
    pub singleton_rate: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            tx_users: 30,
            rx_users: 40,
            zipcodes: 5,
            delta_t: 60,
            windows: 20,
            rate: 2.5,
            max_edge: 4,
            singleton_rate: 0.2,
        }
    }
}

impl SynthParams {
    pub fn zipcode_name(&self, k: usize) -> String {
        format!("{:05}", 10_000 + k)
    }

    pub fn all_zipcodes(&self) -> BTreeSet<String> {
        (0..self.zipcodes).map(|k| self.zipcode_name(k)).collect()
    }
}

/// Ground truth for one generated window: the deduplicated receiver-id sets
/// of size >= 2 (singletons are generated but masked, matching the build).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowTruth {
    pub index: u64,
    pub edges: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct SynthLog {
    pub log: String,
    pub truth: Vec<WindowTruth>,
}

/// Generates a reproducible synthetic log in the 6-column schema together
/// with its per-window ground truth. Byte-identical for a fixed seed.
pub fn synth_log(params: &SynthParams, seed: u64) -> SynthLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = String::new();
    let mut truth = Vec::with_capacity(params.windows as usize);

    for w in 0..params.windows {
        let mut lines: Vec<(u64, String)> = Vec::new();
        let mut edges: BTreeSet<Vec<String>> = BTreeSet::new();

        let active = poisson(&mut rng, params.rate).min(params.tx_users);
        let tx_choice = partial_shuffle(&mut rng, params.tx_users, active);
        for tx in tx_choice {
            let tx_id = format!("t{tx}");
            let zipcode = params.zipcode_name(range(&mut rng, params.zipcodes.max(1)));
            let singleton = params.max_edge < 2 || unit(&mut rng) < params.singleton_rate;
            let size = if singleton {
                1
            } else {
                2 + range(&mut rng, params.max_edge - 1)
            };
            let size = size.min(params.rx_users);
            if size == 0 {
                continue;
            }
            let receivers = partial_shuffle(&mut rng, params.rx_users, size);
            let mut names: Vec<String> = receivers.iter().map(|r| format!("r{r}")).collect();
            for name in &names {
                let offset = range(&mut rng, params.delta_t as usize) as u64;
                let abs = w * params.delta_t as u64 + offset;
                let day = abs / SECONDS_PER_DAY as u64 + 1;
                let time = abs % SECONDS_PER_DAY as u64;
                let flag = if unit(&mut rng) < 0.5 { "y" } else { "n" };
                lines.push((abs, format!("{day} {time} {tx_id} {zipcode} {name} {flag}")));
            }
            if names.len() >= 2 {
                names.sort();
                edges.insert(names);
            }
        }

        lines.sort();
        for (_, line) in lines {
            log.push_str(&line);
            log.push('\n');
        }
        truth.push(WindowTruth { index: w, edges: edges.into_iter().collect() });
    }

    SynthLog { log, truth }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn range(rng: &mut ChaCha8Rng, n: usize) -> usize {
    // Modulo bias is irrelevant at these sizes.
    (rng.next_u64() % n.max(1) as u64) as usize
}

fn poisson(rng: &mut ChaCha8Rng, rate: f64) -> usize {
    if rate <= 0.0 {
        return 0;
    }
    let limit = (-rate.min(30.0)).exp();
    let mut k = 0usize;
    let mut p = 1.0;
    loop {
        p *= unit(rng);
        if p <= limit {
            return k;
        }
        k += 1;
    }
}

/// `count` distinct values from `0..n`, in draw order.
fn partial_shuffle(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<usize> {
    let count = count.min(n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = i + range(rng, n - i);
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(day: u32, time: u32, tx: &str, zip: &str, rx: &str) -> MessageRecord {
        MessageRecord {
            day,
            time,
            tx_id: tx.into(),
            zipcode: zip.into(),
            rx_id: rx.into(),
            in_contact: true,
        }
    }

    fn spec(delta_t: u32, index: u64, zips: &[&str]) -> WindowSpec {
        WindowSpec::new(
            delta_t,
            index,
            zips.iter().map(|z| z.to_string()).collect(),
            4,
        )
        .unwrap()
    }

    #[test]
    fn parses_schema_line() {
        let records = parse_log("1 37 u12 78701 u99 y\n".as_bytes()).unwrap();
        assert_eq!(
            records,
            vec![MessageRecord {
                day: 1,
                time: 37,
                tx_id: "u12".into(),
                zipcode: "78701".into(),
                rx_id: "u99".into(),
                in_contact: true,
            }]
        );
    }

    #[test]
    fn empty_stream_is_empty() {
        assert!(parse_log("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn five_columns_rejected_with_line_number() {
        let input = "1 37 u12 78701 u99 y\n2 40 u1 78701 u2\n";
        match parse_log(input.as_bytes()) {
            Err(IngestError::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_fields_rejected() {
        assert!(parse_log("0 5 a z b y\n".as_bytes()).is_err());
        assert!(parse_log("1 86400 a z b y\n".as_bytes()).is_err());
        assert!(parse_log("1 5 a z b x\n".as_bytes()).is_err());
    }

    #[test]
    fn builds_single_edge_window() {
        let records = vec![
            rec(1, 10, "t1", "z1", "a"),
            rec(1, 20, "t1", "z1", "b"),
        ];
        let build = build_window_hypergraph(&records, &spec(60, 0, &["z1"])).unwrap();
        assert_eq!(build.nodes, vec!["a".to_string(), "b".to_string()]);
        assert_eq!(build.graph.s(), 1);
        assert_eq!(build.graph.edge_lists(), vec![vec![0, 1]]);
    }

    #[test]
    fn singleton_transmitter_is_masked() {
        let records = vec![rec(1, 10, "t1", "z1", "a")];
        let build = build_window_hypergraph(&records, &spec(60, 0, &["z1"])).unwrap();
        assert_eq!(build.graph.s(), 0);
        assert_eq!(build.dropped_singletons, 1);
        // The receiver still counts toward the ambient pool.
        assert_eq!(build.nodes, vec!["a".to_string()]);
    }

    #[test]
    fn duplicate_transmitters_merge() {
        let records = vec![
            rec(1, 10, "t1", "z1", "a"),
            rec(1, 11, "t1", "z1", "b"),
            rec(1, 12, "t2", "z1", "a"),
            rec(1, 13, "t2", "z1", "b"),
        ];
        let build = build_window_hypergraph(&records, &spec(60, 0, &["z1"])).unwrap();
        assert_eq!(build.graph.s(), 1);
        assert_eq!(build.merged_edges, 1);
    }

    #[test]
    fn zipcode_filter_applies() {
        let records = vec![
            rec(1, 10, "t1", "z1", "a"),
            rec(1, 11, "t1", "z1", "b"),
            rec(1, 12, "t2", "z2", "c"),
            rec(1, 13, "t2", "z2", "d"),
        ];
        let build = build_window_hypergraph(&records, &spec(60, 0, &["z1"])).unwrap();
        assert_eq!(build.nodes, vec!["a".to_string(), "b".to_string()]);
        assert_eq!(build.graph.s(), 1);
    }

    #[test]
    fn ambient_pool_spans_block_but_edges_stay_in_window() {
        // Window 1 of a 4-window block: a receiver active in window 0 joins
        // the pool without joining any edge.
        let records = vec![
            rec(1, 10, "t9", "z1", "elsewhere"),
            rec(1, 70, "t1", "z1", "a"),
            rec(1, 75, "t1", "z1", "b"),
        ];
        let build = build_window_hypergraph(&records, &spec(60, 1, &["z1"])).unwrap();
        assert_eq!(
            build.nodes,
            vec!["a".to_string(), "b".to_string(), "elsewhere".to_string()]
        );
        assert_eq!(build.graph.s(), 1);
        assert_eq!(build.graph.edge_lists(), vec![vec![0, 1]]);
    }

    #[test]
    fn window_partition_is_exact() {
        let out = synth_log(&SynthParams::default(), 77);
        let records = parse_log(out.log.as_bytes()).unwrap();
        let spec = spec(60, 0, &["ignored"]);
        for r in &records {
            let w = spec.window_of(r);
            let start = w * 60;
            assert!(r.abs_time() >= start && r.abs_time() < start + 60);
        }
    }

    #[test]
    fn synth_is_deterministic_and_round_trips() {
        let params = SynthParams::default();
        let a = synth_log(&params, 5);
        let b = synth_log(&params, 5);
        assert_eq!(a.log, b.log);
        assert_eq!(a.truth, b.truth);
        let records = parse_log(a.log.as_bytes()).unwrap();
        assert!(!records.is_empty());
    }

    #[test]
    fn zero_rate_gives_empty_log() {
        let params = SynthParams { rate: 0.0, ..SynthParams::default() };
        let out = synth_log(&params, 1);
        assert!(out.log.is_empty());
        assert!(out.truth.iter().all(|t| t.edges.is_empty()));
    }

    #[test]
    fn truth_matches_built_windows() {
        let params = SynthParams::default();
        let out = synth_log(&params, 11);
        let records = parse_log(out.log.as_bytes()).unwrap();
        for t in &out.truth {
            let spec = WindowSpec::new(params.delta_t, t.index, params.all_zipcodes(), 4).unwrap();
            let build = build_window_hypergraph(&records, &spec).unwrap();
            let got: BTreeSet<Vec<String>> = build
                .graph
                .edge_lists()
                .into_iter()
                .map(|e| e.into_iter().map(|v| build.nodes[v].clone()).collect())
                .collect();
            let want: BTreeSet<Vec<String>> = t.edges.iter().cloned().collect();
            assert_eq!(got, want, "window {}", t.index);
        }
    }
}
