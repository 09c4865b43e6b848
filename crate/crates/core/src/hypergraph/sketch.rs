//! Sketching a hypergraph from cut-complement queries: collect the rows
//! attaining the maximum value, group identical columns to find the relevant
//! variables and the edge-size estimate, then snap empirical correlations to
//! the dyadic grid and reconstruct the edges.

use serde::Serialize;
use thiserror::Error;

use super::{edges_from_polynomial_capped, Hypergraph, HypergraphError, ReconstructError};
use crate::exec;
use crate::fourier::{LabeledSample, ParitySet, SignMatrix, SparsePolynomial};
use crate::sampling::{collect_max_rows, draw_batch, lane_seed, SampleOracle, SamplingError};

#[derive(Debug, Error)]
pub enum SketchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    /// A correlation landed too close to a rounding midpoint to trust; the
    /// caller should sample more.
    #[error(
        "correlation {value} lies within 10% of a 1/2^{grid_log2} grid midpoint; sample more"
    )]
    GridAmbiguous { value: f64, grid_log2: u32 },
    #[error("relevant component of size {size} exceeds cap {cap}")]
    ComponentTooLarge { size: usize, cap: usize },
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
}

/// Parameters of a sketching run.
#[derive(Clone, Debug)]
pub struct GraphConfig {
    /// Bound on the number of edges.
    pub s: usize,
    /// Known bound on the maximum edge size; estimated from the data when
    /// absent.
    pub d_hint: Option<usize>,
    /// The sample-complexity constant `c`; the guarantee only asks for
    /// "large enough".
    pub c: f64,
    /// Cap on the size of a relevant component (and on the binning tables).
    pub k_cap: usize,
    /// Multiplier on the sample budget; the benchmark sweep's alpha.
    pub sample_scale: f64,
    /// Explicit sample count, overriding the formula entirely.
    pub m1_override: Option<usize>,
}

impl GraphConfig {
    pub fn new(s: usize) -> Self {
        GraphConfig {
            s,
            d_hint: None,
            c: 8.0,
            k_cap: 24,
            sample_scale: 1.0,
            m1_override: None,
        }
    }

    pub fn with_d_hint(mut self, d: usize) -> Self {
        self.d_hint = Some(d);
        self
    }

    pub fn with_sample_scale(mut self, alpha: f64) -> Self {
        self.sample_scale = alpha;
        self
    }

    pub fn with_m1(mut self, m1: usize) -> Self {
        self.m1_override = Some(m1);
        self
    }

    /// `m1 = max(c 2^k d log n, c 2^(2d+1) s^2 (log n + k))` with
    /// `k` bounded by `min(s d, k_cap)`.
    pub fn sample_budget(&self, n: usize, d: usize) -> usize {
        if let Some(m1) = self.m1_override {
            return m1;
        }
        let k = (self.s * d).min(self.k_cap) as f64;
        let log_n = (n.max(2) as f64).ln();
        let s = self.s as f64;
        let a = self.c * 2f64.powf(k) * d as f64 * log_n;
        let b = self.c * 2f64.powi(2 * d as i32 + 1) * s * s * (log_n + k);
        ((a.max(b) * self.sample_scale).ceil() as usize).max(16)
    }
}

/// The Gram matrix `R = X_max^T X_max` over ±1 entries, in exact integer
/// arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gram {
    n: usize,
    data: Vec<i64>,
}

impl Gram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }
}

pub fn gram_matrix(x: &SignMatrix) -> Gram {
    let n = x.n();
    let n_max = x.n_rows() as i64;
    let cols = x.packed_columns();
    let mut data = vec![0i64; n * n];
    for i in 0..n {
        for j in i..n {
            let mut mismatches = 0u32;
            for (a, b) in cols[i].words().iter().zip(cols[j].words()) {
                mismatches += (a ^ b).count_ones();
            }
            let r = n_max - 2 * mismatches as i64;
            data[i * n + j] = r;
            data[j * n + i] = r;
        }
    }
    Gram { n, data }
}

/// The max-tie estimator `d = max_i |{j : R(i,j) = max(R(i,:))}|`. Returns 1
/// on an empty or single-row (degenerate) Gram matrix, where ties carry no
/// signal.
pub fn estimate_d(r: &Gram, n_max: usize) -> usize {
    if r.n == 0 || n_max <= 1 {
        return 1;
    }
    let mut best = 1;
    for i in 0..r.n {
        let row = &r.data[i * r.n..(i + 1) * r.n];
        let row_max = row.iter().copied().max().unwrap();
        let ties = row.iter().filter(|&&v| v == row_max).count();
        best = best.max(ties);
    }
    best
}

/// Nearest integer multiple of `1/2^d`, ties away from zero.
pub fn round_to_grid(v: f64, d: u32) -> f64 {
    assert!(d <= 30, "grid exponent {d} out of range");
    let scale = (1u64 << d) as f64;
    (v * scale).round() / scale
}

/// Distance (in grid units) from the nearest grid point; values at 0.5 sit
/// exactly on a midpoint.
fn grid_offset(v: f64, d: u32) -> f64 {
    let scaled = v * (1u64 << d) as f64;
    (scaled - scaled.round()).abs()
}

const GRID_AMBIGUITY_OFFSET: f64 = 0.4;

#[derive(Clone, Debug, Serialize)]
pub struct SketchDiagnostics {
    pub n_max: usize,
    pub m1_used: usize,
    pub eta: f64,
    /// Identical-column groups of size >= 2 (the relevant components), as
    /// sorted global vertex lists.
    pub groups: Vec<Vec<usize>>,
    /// Gram matrix restricted to the grouped (relevant) vertices, row order
    /// matching the concatenation of `groups`.
    pub gram_relevant: Vec<Vec<i64>>,
    /// Set when the max window was too thin to estimate anything.
    pub degenerate: bool,
    /// Estimate of d observed from the data (before any hint override).
    pub d_observed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SketchResult {
    /// Grid-rounded constant coefficient.
    pub c0: f64,
    /// The recovered cut-complement polynomial, constant term included.
    pub polynomial: SparsePolynomial,
    /// Edges reconstructed from the polynomial.
    pub edges: Hypergraph,
    /// The edge-size estimate actually used for grids and subset sizes.
    pub d_est: usize,
    pub diagnostics: SketchDiagnostics,
}

fn budget_checked(config: &GraphConfig, n: usize, d: usize) -> Result<usize, SketchError> {
    let m1 = config.sample_budget(n, d);
    if m1 > 1 << 31 {
        return Err(SketchError::Config(format!(
            "sample budget {m1} is impractical (s * d too large?); pass an explicit m1"
        )));
    }
    Ok(m1)
}

/// Groups of column indices with identical columns, singletons included,
/// found by sorting the packed columns. Columns are identical exactly when
/// their Gram entry equals `n_max`, so this matches thresholding R without
/// forming it.
fn column_groups(x: &SignMatrix) -> Vec<Vec<usize>> {
    let cols = x.packed_columns();
    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.sort_by(|&a, &b| cols[a].cmp(&cols[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for idx in order {
        match groups.last_mut() {
            Some(g) if cols[g[0]] == cols[idx] => g.push(idx),
            _ => groups.push(vec![idx]),
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort();
    groups
}

/// Learns the cut-complement polynomial of a singleton-free hypergraph from
/// random cut queries, then reconstructs its edges.
pub fn learn_graph(
    oracle: &impl SampleOracle,
    config: &GraphConfig,
    seed: u64,
) -> Result<SketchResult, SketchError> {
    if config.s < 1 {
        return Err(SketchError::Config("edge bound s must be at least 1".into()));
    }
    if !config.sample_scale.is_finite() || config.sample_scale <= 0.0 {
        return Err(SketchError::Config("sample scale must be positive".into()));
    }
    let n = oracle.dim();

    // Sizing d: a supplied hint wins; otherwise probe with growing guesses
    // until the observed estimate stops increasing.
    let d_for_budget = match config.d_hint {
        Some(d) => d,
        None => {
            let mut guess = 2usize;
            for probe in 0..8 {
                let m1 = budget_checked(config, n, guess)?;
                let batch = draw_batch(oracle, m1, lane_seed(seed, 16 + probe))?;
                let window = collect_max_rows(&batch)?;
                let observed = column_groups(window.x_max())
                    .iter()
                    .map(|g| g.len())
                    .max()
                    .unwrap_or(1);
                if observed <= guess {
                    guess = observed.max(2);
                    break;
                }
                guess = observed;
                if guess >= config.k_cap {
                    return Err(SketchError::ComponentTooLarge {
                        size: guess,
                        cap: config.k_cap,
                    });
                }
            }
            guess
        }
    };

    let m1 = budget_checked(config, n, d_for_budget)?;
    let batch = draw_batch(oracle, m1, lane_seed(seed, 0))?;
    let window = collect_max_rows(&batch)?;
    let n_max = window.n_max();
    let degenerate = n_max <= 1;

    let all_groups = column_groups(window.x_max());
    let d_observed = if degenerate {
        1
    } else {
        all_groups.iter().map(|g| g.len()).max().unwrap_or(1)
    };
    let d_est = config.d_hint.unwrap_or(d_observed);
    let grid_log2 = d_est.min(30) as u32;

    let groups: Vec<Vec<usize>> = if degenerate {
        Vec::new()
    } else {
        all_groups.into_iter().filter(|g| g.len() >= 2).collect()
    };
    for g in &groups {
        if g.len() > config.k_cap {
            return Err(SketchError::ComponentTooLarge { size: g.len(), cap: config.k_cap });
        }
    }

    // Constant coefficient: the sample mean, snapped to the grid. Query
    // values are small integers, so the sum is exact in f64.
    let total: f64 = batch.iter().map(|s| s.value).sum();
    let c0_raw = total / m1 as f64;
    if grid_offset(c0_raw, grid_log2) >= GRID_AMBIGUITY_OFFSET {
        return Err(SketchError::GridAmbiguous { value: c0_raw, grid_log2 });
    }
    let c0 = round_to_grid(c0_raw, grid_log2);

    // Correlations of every small even parity inside each group, all at once
    // via a Walsh-Hadamard transform over the group-pattern histogram.
    let mut polynomial = SparsePolynomial::new(n);
    if c0 != 0.0 {
        polynomial.add_to(ParitySet::empty(n), c0);
    }
    for group in &groups {
        let corr = group_correlations(&batch, group, c0);
        for (mask, value) in corr.iter().enumerate() {
            let size = (mask as u32).count_ones() as usize;
            if size == 0 || !size.is_multiple_of(2) || size > d_est {
                continue;
            }
            if grid_offset(*value, grid_log2) >= GRID_AMBIGUITY_OFFSET {
                return Err(SketchError::GridAmbiguous { value: *value, grid_log2 });
            }
            let coeff = round_to_grid(*value, grid_log2);
            if coeff != 0.0 {
                let members: Vec<usize> = (0..group.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| group[i])
                    .collect();
                let set = ParitySet::from_indices(n, &members)
                    .map_err(HypergraphError::from)?;
                polynomial.add_to(set, coeff);
            }
        }
    }

    let edges = edges_from_polynomial_capped(&polynomial, d_est.max(2), config.k_cap)?;

    // Gram restricted to the grouped vertices, for audit.
    let relevant: Vec<usize> = groups.iter().flatten().copied().collect();
    let gram_relevant = if relevant.is_empty() {
        Vec::new()
    } else {
        let cols = window.x_max().packed_columns();
        relevant
            .iter()
            .map(|&i| {
                relevant
                    .iter()
                    .map(|&j| {
                        let mismatches: u32 = cols[i]
                            .words()
                            .iter()
                            .zip(cols[j].words())
                            .map(|(a, b)| (a ^ b).count_ones())
                            .sum();
                        n_max as i64 - 2 * mismatches as i64
                    })
                    .collect()
            })
            .collect()
    };

    Ok(SketchResult {
        c0,
        polynomial,
        edges,
        d_est,
        diagnostics: SketchDiagnostics {
            n_max,
            m1_used: m1,
            eta: window.eta(),
            groups,
            gram_relevant,
            degenerate,
            d_observed,
        },
    })
}

/// Empirical correlations `sum_i (f(x_i) - c0) chi_M(x_i) / m` for every
/// subset `M` of `group`, via one histogram pass and two in-place transforms.
/// Query values and counts are integers, so chunked accumulation is exact
/// and thread-count independent.
fn group_correlations(batch: &[LabeledSample], group: &[usize], c0: f64) -> Vec<f64> {
    let g = group.len();
    let bins = 1usize << g;
    let (mut value_sums, counts) = exec::fold_chunks(
        batch,
        exec::DEFAULT_CHUNK,
        || (vec![0.0f64; bins], vec![0u64; bins]),
        |state, sample| {
            let mut pattern = 0usize;
            for (i, &v) in group.iter().enumerate() {
                if sample.point.bits().get(v) {
                    pattern |= 1 << i;
                }
            }
            state.0[pattern] += sample.value;
            state.1[pattern] += 1;
        },
        |acc, local| {
            for (a, b) in acc.0.iter_mut().zip(&local.0) {
                *a += b;
            }
            for (a, b) in acc.1.iter_mut().zip(&local.1) {
                *a += b;
            }
        },
    );

    let mut count_sums: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    wht_in_place(&mut value_sums);
    wht_in_place(&mut count_sums);

    let m = batch.len() as f64;
    value_sums
        .iter()
        .zip(&count_sums)
        .map(|(v, c)| (v - c0 * c) / m)
        .collect()
}

fn wht_in_place(buf: &mut [f64]) {
    let mut half = 1;
    while half < buf.len() {
        let step = half * 2;
        let mut base = 0;
        while base < buf.len() {
            for j in base..base + half {
                let (a, b) = (buf[j], buf[j + half]);
                buf[j] = a + b;
                buf[j + half] = a - b;
            }
            base += step;
        }
        half = step;
    }
}
