//! Uniform sampling of the hypercube, labeled-sample oracles (exact, noisy,
//! approximately sparse), and max-value row collection.
//!
//! Randomness comes from seedable, portable ChaCha8 streams. Derived streams
//! follow one rule everywhere: lane `k` of master seed `s` is the splitmix64
//! output at offset `k + 1` from `s` (see [`lane_seed`]), so batches and
//! trials can be reproduced independently on any platform.

use std::io::{BufRead, Write};
use std::sync::Arc;

use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

use crate::fourier::{FourierError, InputPoint, LabeledSample, SignMatrix, SparsePolynomial};
use crate::gf2::BitVector;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("batch size must be at least 1")]
    EmptyBatch,
    #[error("invalid noise specification: {0}")]
    InvalidNoise(String),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error("csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

/// Seed of derived stream `lane` under master seed `master` (splitmix64).
pub fn lane_seed(master: u64, lane: u64) -> u64 {
    let mut z = master.wrapping_add(lane.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A labeled-sample source: points are drawn uniformly by [`draw_batch`],
/// the oracle supplies the (possibly noisy) value at each point.
pub trait SampleOracle {
    fn dim(&self) -> usize;
    /// Value observed at `x`. Oracles with an observation-noise component
    /// draw it from `rng`, which is the batch stream.
    fn label(&self, x: &InputPoint, rng: &mut ChaCha8Rng) -> f64;
}

/// Noise-free oracle for a fixed sparse polynomial.
#[derive(Clone, Debug)]
pub struct ExactOracle {
    f: SparsePolynomial,
}

impl ExactOracle {
    pub fn new(f: SparsePolynomial) -> Self {
        ExactOracle { f }
    }

    pub fn polynomial(&self) -> &SparsePolynomial {
        &self.f
    }
}

impl SampleOracle for ExactOracle {
    fn dim(&self) -> usize {
        self.f.n()
    }

    fn label(&self, x: &InputPoint, _rng: &mut ChaCha8Rng) -> f64 {
        self.f.eval(x).expect("oracle dimension mismatch")
    }
}

/// Bounded additive observation noise plus an optional approximately-sparse
/// tail polynomial on parities disjoint from the main part.
#[derive(Clone, Debug)]
pub struct NoiseSpec {
    epsilon: f64,
    nu: f64,
    tail: Option<SparsePolynomial>,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        NoiseSpec { epsilon: 0.0, nu: 0.0, tail: None }
    }

    pub fn new(
        epsilon: f64,
        nu: f64,
        tail: Option<SparsePolynomial>,
    ) -> Result<Self, SamplingError> {
        if !epsilon.is_finite() || epsilon < 0.0 || !nu.is_finite() || nu < 0.0 {
            return Err(SamplingError::InvalidNoise(format!(
                "epsilon {epsilon} and nu {nu} must be nonnegative"
            )));
        }
        if let Some(t) = &tail {
            if t.l1_norm() >= nu {
                return Err(SamplingError::InvalidNoise(format!(
                    "tail L1 norm {} is not below nu {nu}",
                    t.l1_norm()
                )));
            }
        }
        Ok(NoiseSpec { epsilon, nu, tail })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn tail(&self) -> Option<&SparsePolynomial> {
        self.tail.as_ref()
    }

    /// The clustering radius parameter epsilon + nu.
    pub fn slack(&self) -> f64 {
        self.epsilon + self.nu
    }
}

/// Test hook signature for adversarial noise.
pub type NoiseFn = Arc<dyn Fn(&mut ChaCha8Rng, &InputPoint) -> f64 + Send + Sync>;

/// How the additive observation noise is drawn.
#[derive(Clone)]
pub enum NoiseModel {
    /// Uniform on `[-epsilon, +epsilon]`.
    Uniform,
    /// Test hook for adversarial noise; must stay within `[-eps, +eps]`.
    Custom(NoiseFn),
}

impl std::fmt::Debug for NoiseModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoiseModel::Uniform => write!(f, "Uniform"),
            NoiseModel::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Oracle for `f1 + tail` with bounded additive observation noise.
#[derive(Clone, Debug)]
pub struct NoisyOracle {
    f1: SparsePolynomial,
    spec: NoiseSpec,
    model: NoiseModel,
}

impl NoisyOracle {
    pub fn new(f1: SparsePolynomial, spec: NoiseSpec) -> Result<Self, SamplingError> {
        if let Some(tail) = spec.tail() {
            if tail.n() != f1.n() {
                return Err(SamplingError::InvalidNoise(
                    "tail dimension differs from the main polynomial".into(),
                ));
            }
            for set in tail.support() {
                if f1.coeff(set) != 0.0 {
                    return Err(SamplingError::InvalidNoise(format!(
                        "tail parity {set:?} overlaps the main support"
                    )));
                }
            }
        }
        Ok(NoisyOracle { f1, spec, model: NoiseModel::Uniform })
    }

    pub fn with_noise_model(mut self, model: NoiseModel) -> Self {
        self.model = model;
        self
    }

    pub fn main_part(&self) -> &SparsePolynomial {
        &self.f1
    }

    pub fn spec(&self) -> &NoiseSpec {
        &self.spec
    }
}

impl SampleOracle for NoisyOracle {
    fn dim(&self) -> usize {
        self.f1.n()
    }

    fn label(&self, x: &InputPoint, rng: &mut ChaCha8Rng) -> f64 {
        let mut v = self.f1.eval(x).expect("oracle dimension mismatch");
        if let Some(tail) = self.spec.tail() {
            v += tail.eval(x).expect("tail dimension mismatch");
        }
        let eps = self.spec.epsilon();
        let noise = match &self.model {
            NoiseModel::Uniform => {
                // Drawn even when eps == 0 so the stream layout is stable.
                let u = uniform_unit(rng);
                eps * (2.0 * u - 1.0)
            }
            NoiseModel::Custom(f) => f(rng, x),
        };
        assert!(
            noise.abs() <= eps * (1.0 + 1e-12) + f64::MIN_POSITIVE,
            "noise model exceeded its bound: |{noise}| > {eps}"
        );
        v + noise
    }
}

fn uniform_unit(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random bits into [0, 1).
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `m` i.i.d. uniform labeled samples. Deterministic given `seed`; the
/// point bits are drawn before the label so noisy oracles see a stable
/// stream.
pub fn draw_batch(
    oracle: &impl SampleOracle,
    m: usize,
    seed: u64,
) -> Result<Vec<LabeledSample>, SamplingError> {
    if m == 0 {
        return Err(SamplingError::EmptyBatch);
    }
    let n = oracle.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let point = InputPoint::from_bits(BitVector::from_word_fn(n, || rng.next_u64()));
        let value = oracle.label(&point, &mut rng);
        out.push(LabeledSample { point, value });
    }
    Ok(out)
}

/// The rows of a batch whose values sit within `radius` of the largest
/// observed value `eta`.
#[derive(Clone, Debug)]
pub struct MaxWindow {
    x_max: SignMatrix,
    values: Vec<f64>,
    eta: f64,
    radius: f64,
}

impl MaxWindow {
    pub fn x_max(&self) -> &SignMatrix {
        &self.x_max
    }

    pub fn n_max(&self) -> usize {
        self.x_max.n_rows()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Observed values of the collected rows, aligned with `x_max` rows.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Rows attaining the exact maximum value of the batch. Exact equality is
/// deliberate: noiseless evaluation uses a fixed term order, so repeated
/// values are bit-identical.
pub fn collect_max_rows(batch: &[LabeledSample]) -> Result<MaxWindow, SamplingError> {
    cluster_rows(batch, 0.0)
}

/// Rows within `2 * (epsilon + nu)` of the largest observed value. With
/// `epsilon + nu == 0` this degenerates to [`collect_max_rows`].
pub fn max_cluster(
    batch: &[LabeledSample],
    epsilon: f64,
    nu: f64,
) -> Result<MaxWindow, SamplingError> {
    let slack = epsilon + nu;
    if !slack.is_finite() || slack < 0.0 {
        return Err(SamplingError::InvalidNoise(format!(
            "epsilon + nu must be nonnegative, got {}",
            epsilon + nu
        )));
    }
    cluster_rows(batch, 2.0 * (epsilon + nu))
}

fn cluster_rows(batch: &[LabeledSample], radius: f64) -> Result<MaxWindow, SamplingError> {
    if batch.is_empty() {
        return Err(SamplingError::EmptyBatch);
    }
    let n = batch[0].point.dim();
    let eta = batch.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for s in batch {
        let keep = if radius == 0.0 {
            s.value == eta
        } else {
            s.value >= eta - radius
        };
        if keep {
            rows.push(s.point.clone());
            values.push(s.value);
        }
    }
    let x_max = SignMatrix::from_points(n, rows)?;
    Ok(MaxWindow { x_max, values, eta, radius })
}

/// Writes a batch as CSV: `n` sign columns (1 / -1), then the value.
pub fn write_batch_csv(w: &mut impl Write, batch: &[LabeledSample]) -> std::io::Result<()> {
    for s in batch {
        let mut line = String::new();
        for j in 0..s.point.dim() {
            line.push_str(if s.point.sign(j) < 0.0 { "-1," } else { "1," });
        }
        line.push_str(&format!("{}", s.value));
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Parses the CSV layout produced by [`write_batch_csv`].
pub fn read_batch_csv(r: impl BufRead) -> Result<Vec<LabeledSample>, SamplingError> {
    let mut out = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| SamplingError::Csv { line: lineno, reason: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            return Err(SamplingError::Csv {
                line: lineno,
                reason: "expected at least one sign column and a value".into(),
            });
        }
        let (signs, value) = fields.split_at(fields.len() - 1);
        let signs: Vec<f64> = signs
            .iter()
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| SamplingError::Csv {
                    line: lineno,
                    reason: format!("bad sign entry {f:?}: {e}"),
                })
            })
            .collect::<Result<_, _>>()?;
        let value = value[0].trim().parse::<f64>().map_err(|e| SamplingError::Csv {
            line: lineno,
            reason: format!("bad value {:?}: {e}", value[0]),
        })?;
        let point = InputPoint::from_signs(&signs)?;
        out.push(LabeledSample { point, value });
    }
    Ok(out)
}
