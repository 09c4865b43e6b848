//! Restricted L1 minimization over a candidate parity family: basis pursuit
//! with equality constraints and basis pursuit denoising with an L2 ball
//! constraint.
//!
//! The equality program is solved as a linear program on the split
//! `beta = u - v` after reducing the (usually overdetermined) system to an
//! independent row set. The denoising program is solved by bisection over the
//! LASSO path: the penalized solution's residual is monotone in the penalty,
//! so the constrained optimum sits at the penalty whose residual hits the
//! target radius.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fourier::{eval_parity_unchecked, FourierError, LabeledSample, ParitySet};
use crate::simplex::{solve_standard_form, LpResult};

#[derive(Debug, Error)]
pub enum RecoveryError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    /// No point of the candidate span satisfies the data-fit constraint.
    #[error("program is infeasible over the candidate set")]
    Infeasible,
    #[error("solver failed numerically: {0}")]
    Numerical(String),
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

/// The ordered family of candidate parity sets fed to the L1 programs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CandidateSetJson", into = "CandidateSetJson")]
pub struct CandidateSet {
    n: usize,
    sets: Vec<ParitySet>,
}

impl CandidateSet {
    pub fn from_sets(n: usize, sets: Vec<ParitySet>) -> Result<Self, RecoveryError> {
        for s in &sets {
            if s.dim() != n {
                return Err(RecoveryError::DimensionMismatch(format!(
                    "candidate over {} coordinates in a family of dimension {n}",
                    s.dim()
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &sets {
            if !seen.insert(s.clone()) {
                return Err(RecoveryError::Degenerate("duplicate candidate set"));
            }
        }
        Ok(CandidateSet { n, sets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, i: usize) -> &ParitySet {
        &self.sets[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &ParitySet> {
        self.sets.iter()
    }

    pub fn contains(&self, set: &ParitySet) -> bool {
        self.sets.iter().any(|s| s == set)
    }

    pub fn position(&self, set: &ParitySet) -> Option<usize> {
        self.sets.iter().position(|s| s == set)
    }
}

#[derive(Serialize, Deserialize)]
struct CandidateSetJson {
    n: usize,
    sets: Vec<Vec<usize>>,
}

impl TryFrom<CandidateSetJson> for CandidateSet {
    type Error = RecoveryError;

    fn try_from(json: CandidateSetJson) -> Result<Self, RecoveryError> {
        let sets = json
            .sets
            .iter()
            .map(|ones| {
                let zero_based: Vec<usize> =
                    ones.iter().map(|&i| i.checked_sub(1).unwrap_or(usize::MAX)).collect();
                ParitySet::from_indices(json.n, &zero_based).map_err(RecoveryError::from)
            })
            .collect::<Result<Vec<_>, _>>()?;
        CandidateSet::from_sets(json.n, sets)
    }
}

impl From<CandidateSet> for CandidateSetJson {
    fn from(cs: CandidateSet) -> CandidateSetJson {
        CandidateSetJson {
            n: cs.n,
            sets: cs
                .sets
                .iter()
                .map(|s| s.indices().iter().map(|i| i + 1).collect())
                .collect(),
        }
    }
}

/// The measurement matrix: entry `(i, j)` is `chi_{S_j}(x_i)`, so every
/// entry is exactly ±1 and column `j` follows the candidate ordering.
#[derive(Clone, Debug)]
pub struct DesignMatrix {
    m: usize,
    k: usize,
    data: Vec<f64>,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.m
    }

    pub fn n_cols(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.k + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    /// `A beta` over the full row set.
    pub fn apply(&self, beta: &[f64]) -> Vec<f64> {
        assert_eq!(beta.len(), self.k);
        (0..self.m)
            .map(|i| self.row(i).iter().zip(beta).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `A^T r`.
    pub fn apply_transposed(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.m);
        let mut out = vec![0.0; self.k];
        for (i, &w) in r.iter().enumerate() {
            if w != 0.0 {
                for (o, a) in out.iter_mut().zip(self.row(i)) {
                    *o += w * a;
                }
            }
        }
        out
    }
}

/// Builds the design matrix of a sample batch against a candidate family.
pub fn build_design(
    samples: &[LabeledSample],
    candidates: &CandidateSet,
) -> Result<DesignMatrix, RecoveryError> {
    if candidates.is_empty() {
        return Err(RecoveryError::Degenerate("empty candidate set"));
    }
    let k = candidates.len();
    let mut data = Vec::with_capacity(samples.len() * k);
    for sample in samples {
        if sample.point.dim() != candidates.n() {
            return Err(RecoveryError::DimensionMismatch(format!(
                "sample of dimension {} against candidates of dimension {}",
                sample.point.dim(),
                candidates.n()
            )));
        }
        for set in candidates.iter() {
            data.push(eval_parity_unchecked(set, &sample.point));
        }
    }
    Ok(DesignMatrix { m: samples.len(), k, data })
}

/// Label column of a batch.
pub fn values(samples: &[LabeledSample]) -> Vec<f64> {
    samples.iter().map(|s| s.value).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecoveryStatus {
    /// The returned point satisfies the program's constraint at tolerance.
    Feasible,
}

/// Solution of one of the two programs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecoveryResult {
    /// Coefficients over the candidate family, in candidate order.
    pub beta: Vec<f64>,
    /// L1 norm of `beta`.
    pub objective: f64,
    /// Scaled constraint value `sqrt(1/m) * ||A beta - y||_2`.
    pub residual: f64,
    pub status: RecoveryStatus,
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `min ||beta||_1` subject to `A beta = y`, to within a constraint violation
/// of `1e-8 * (1 + ||y||_2)`. Errors with [`RecoveryError::Infeasible`] when
/// `y` is outside the column span.
pub fn basis_pursuit(a: &DesignMatrix, y: &[f64]) -> Result<RecoveryResult, RecoveryError> {
    if a.n_rows() == 0 {
        return Err(RecoveryError::Degenerate("no measurement rows"));
    }
    if y.len() != a.n_rows() {
        return Err(RecoveryError::DimensionMismatch(format!(
            "{} labels against {} rows",
            y.len(),
            a.n_rows()
        )));
    }
    let feas_tol = 1e-8 * (1.0 + l2(y));

    let reduced = reduce_rows(a, y, feas_tol)?;

    // LP over the split beta = u - v, u, v >= 0.
    let k = a.n_cols();
    let lp_rows: Vec<Vec<f64>> = reduced
        .pivot_rows
        .iter()
        .map(|&i| {
            let mut row = Vec::with_capacity(2 * k);
            row.extend_from_slice(a.row(i));
            row.extend(a.row(i).iter().map(|v| -v));
            row
        })
        .collect();
    let lp_rhs: Vec<f64> = reduced.pivot_rows.iter().map(|&i| y[i]).collect();
    let cost = vec![1.0; 2 * k];

    let beta = match solve_standard_form(&lp_rows, &lp_rhs, &cost) {
        LpResult::Optimal { x, .. } => {
            (0..k).map(|j| x[j] - x[j + k]).collect::<Vec<f64>>()
        }
        LpResult::Infeasible => return Err(RecoveryError::Infeasible),
        LpResult::Unbounded => {
            return Err(RecoveryError::Numerical("LP reported unbounded".into()))
        }
    };

    let mut resid = a.apply(&beta);
    for (r, v) in resid.iter_mut().zip(y) {
        *r -= v;
    }
    let violation = l2(&resid);
    if violation > feas_tol {
        return Err(RecoveryError::Numerical(format!(
            "constraint violation {violation} above tolerance {feas_tol}"
        )));
    }
    Ok(RecoveryResult {
        objective: beta.iter().map(|b| b.abs()).sum(),
        residual: violation / (a.n_rows() as f64).sqrt(),
        beta,
        status: RecoveryStatus::Feasible,
    })
}

struct ReducedRows {
    pivot_rows: Vec<usize>,
}

/// Gaussian elimination with partial pivoting over `[A | y]`, tracking the
/// original indices of the pivot rows and checking that every dependent row
/// is consistent.
fn reduce_rows(a: &DesignMatrix, y: &[f64], feas_tol: f64) -> Result<ReducedRows, RecoveryError> {
    let m = a.n_rows();
    let k = a.n_cols();
    let mut work: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(k + 1);
            row.extend_from_slice(a.row(i));
            row.push(y[i]);
            row
        })
        .collect();
    let mut origin: Vec<usize> = (0..m).collect();

    let pivot_tol = 1e-10;
    let mut rank = 0;
    for col in 0..k {
        let Some(best) = (rank..m)
            .max_by(|&p, &q| {
                work[p][col]
                    .abs()
                    .partial_cmp(&work[q][col].abs())
                    .unwrap()
            })
            .filter(|&p| work[p][col].abs() > pivot_tol)
        else {
            continue;
        };
        work.swap(rank, best);
        origin.swap(rank, best);
        let inv = 1.0 / work[rank][col];
        for r in rank + 1..m {
            let factor = work[r][col] * inv;
            if factor != 0.0 {
                let (top, bottom) = work.split_at_mut(r);
                let pivot_row = &top[rank];
                for (dst, src) in bottom[0].iter_mut().zip(pivot_row) {
                    *dst -= factor * src;
                }
                bottom[0][col] = 0.0;
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }

    // Rows below the rank should have cancelled entirely; a surviving rhs
    // means y is not in the column span.
    let per_row_tol = (feas_tol / (m as f64).sqrt()).max(1e-11 * (1.0 + l2(y)));
    for row in work.iter().skip(rank) {
        if row[k].abs() > per_row_tol {
            return Err(RecoveryError::Infeasible);
        }
    }

    Ok(ReducedRows { pivot_rows: origin[..rank].to_vec() })
}

/// `min ||beta||_1` subject to `sqrt(1/m) ||A beta - y||_2 <= delta`.
///
/// `delta = 0` collapses to [`basis_pursuit`]. Errors with `Infeasible` only
/// when `delta` is below the (scaled) distance from `y` to the column span.
pub fn bpdn(a: &DesignMatrix, y: &[f64], delta: f64) -> Result<RecoveryResult, RecoveryError> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(RecoveryError::Degenerate("delta must be nonnegative"));
    }
    if a.n_rows() == 0 {
        return Err(RecoveryError::Degenerate("no measurement rows"));
    }
    if y.len() != a.n_rows() {
        return Err(RecoveryError::DimensionMismatch(format!(
            "{} labels against {} rows",
            y.len(),
            a.n_rows()
        )));
    }
    if delta == 0.0 {
        return basis_pursuit(a, y);
    }

    let m = a.n_rows();
    let k = a.n_cols();
    let sigma = delta * (m as f64).sqrt();
    let y_norm = l2(y);
    if y_norm <= sigma * (1.0 + 1e-9) {
        // Zero is feasible and has the minimal possible L1 norm.
        return Ok(RecoveryResult {
            beta: vec![0.0; k],
            objective: 0.0,
            residual: y_norm / (m as f64).sqrt(),
            status: RecoveryStatus::Feasible,
        });
    }

    // Gram matrix and correlation vector. Entries of A are ±1, so the Gram
    // entries are exact integers and the diagonal is exactly m.
    let mut gram = vec![0.0; k * k];
    for i in 0..m {
        let row = a.row(i);
        for p in 0..k {
            let rp = row[p];
            for q in p..k {
                gram[p * k + q] += rp * row[q];
            }
        }
    }
    for p in 0..k {
        for q in 0..p {
            gram[p * k + q] = gram[q * k + p];
        }
    }
    let h = a.apply_transposed(y);
    let yy = y.iter().map(|v| v * v).sum::<f64>();

    let lambda_max = h.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if lambda_max == 0.0 {
        // y is orthogonal to every column and nonzero beyond sigma.
        return Err(RecoveryError::Infeasible);
    }

    let solver = LassoPath { gram: &gram, h: &h, yy, k, m };

    // Residual at (numerically) zero penalty: the distance to the span.
    let mut beta_ls = vec![0.0; k];
    let min_resid = solver.solve(lambda_max * 1e-13, &mut beta_ls);
    if sigma < min_resid * (1.0 - 1e-7) - 1e-12 {
        return Err(RecoveryError::Infeasible);
    }
    if min_resid >= sigma {
        // The constraint is active at the least-squares point itself.
        return finish_bpdn(a, y, beta_ls, m);
    }

    // Bisect the penalty: residual(lambda) is nondecreasing, the feasible
    // side is below sigma.
    let mut lo = lambda_max * 1e-13;
    let mut hi = lambda_max;
    let mut beta = beta_ls;
    let mut beta_lo = beta.clone();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let resid = solver.solve(mid, &mut beta);
        if resid <= sigma {
            lo = mid;
            beta_lo.copy_from_slice(&beta);
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-13 * lambda_max {
            break;
        }
    }
    // Final polish on the feasible side.
    let _ = solver.solve(lo, &mut beta_lo);
    finish_bpdn(a, y, beta_lo, m)
}

fn finish_bpdn(
    a: &DesignMatrix,
    y: &[f64],
    beta: Vec<f64>,
    m: usize,
) -> Result<RecoveryResult, RecoveryError> {
    let mut resid = a.apply(&beta);
    for (r, v) in resid.iter_mut().zip(y) {
        *r -= v;
    }
    Ok(RecoveryResult {
        objective: beta.iter().map(|b| b.abs()).sum(),
        residual: l2(&resid) / (m as f64).sqrt(),
        beta,
        status: RecoveryStatus::Feasible,
    })
}

/// Cyclic coordinate descent on `0.5 ||A b - y||^2 + lambda ||b||_1` using
/// the precomputed Gram form.
struct LassoPath<'a> {
    gram: &'a [f64],
    h: &'a [f64],
    yy: f64,
    k: usize,
    m: usize,
}

impl LassoPath<'_> {
    /// Minimizes at the given penalty, warm-starting from `beta`; returns
    /// the residual norm `||A beta - y||_2`.
    fn solve(&self, lambda: f64, beta: &mut [f64]) -> f64 {
        let k = self.k;
        let diag = self.m as f64;
        // q = G beta, maintained incrementally.
        let mut q = vec![0.0; k];
        for (j, &bj) in beta.iter().enumerate() {
            if bj != 0.0 {
                for (p, qp) in q.iter_mut().enumerate() {
                    *qp += self.gram[p * k + j] * bj;
                }
            }
        }
        let scale = 1.0 + self.h.iter().map(|v| v.abs()).fold(0.0, f64::max) / diag;
        let tol = 1e-12 * scale;
        for _ in 0..100_000 {
            let mut biggest = 0.0f64;
            for j in 0..k {
                let rho = self.h[j] - q[j] + diag * beta[j];
                let new = soft_threshold(rho, lambda) / diag;
                let delta = new - beta[j];
                if delta != 0.0 {
                    beta[j] = new;
                    for (p, qp) in q.iter_mut().enumerate() {
                        *qp += self.gram[p * k + j] * delta;
                    }
                    biggest = biggest.max(delta.abs());
                }
            }
            if biggest <= tol {
                break;
            }
        }
        let mut rss = self.yy;
        for j in 0..k {
            rss += beta[j] * (q[j] - 2.0 * self.h[j]);
        }
        rss.max(0.0).sqrt()
    }
}

#[inline]
fn soft_threshold(x: f64, lambda: f64) -> f64 {
    if x > lambda {
        x - lambda
    } else if x < -lambda {
        x + lambda
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{InputPoint, SparsePolynomial};
    use crate::sampling::{draw_batch, ExactOracle};

    fn set(n: usize, idx: &[usize]) -> ParitySet {
        ParitySet::from_indices(n, idx).unwrap()
    }

    fn random_batch(n: usize, m: usize, seed: u64) -> Vec<LabeledSample> {
        let oracle = ExactOracle::new(SparsePolynomial::new(n));
        draw_batch(&oracle, m, seed).unwrap()
    }

    #[test]
    fn design_entries() {
        let batch = vec![LabeledSample {
            point: InputPoint::from_signs(&[-1.0, 1.0]).unwrap(),
            value: 0.0,
        }];
        let cs = CandidateSet::from_sets(
            2,
            vec![set(2, &[]), set(2, &[0]), set(2, &[0, 1])],
        )
        .unwrap();
        let a = build_design(&batch, &cs).unwrap();
        assert_eq!(a.row(0), &[1.0, -1.0, -1.0]);
    }

    #[test]
    fn design_column_character_property() {
        let batch = random_batch(6, 32, 3);
        let s = set(6, &[0, 2]);
        let t = set(6, &[2, 4]);
        let cs = CandidateSet::from_sets(6, vec![s.clone(), t.clone(), s.sym_diff(&t)]).unwrap();
        let a = build_design(&batch, &cs).unwrap();
        for i in 0..a.n_rows() {
            assert_eq!(a.at(i, 0) * a.at(i, 1), a.at(i, 2));
        }
    }

    #[test]
    fn duplicate_candidates_rejected() {
        assert!(CandidateSet::from_sets(2, vec![set(2, &[0]), set(2, &[0])]).is_err());
    }

    #[test]
    fn bp_recovers_planted_column() {
        let batch = random_batch(8, 40, 7);
        let cs = CandidateSet::from_sets(
            8,
            vec![set(8, &[]), set(8, &[0]), set(8, &[1]), set(8, &[0, 1])],
        )
        .unwrap();
        let a = build_design(&batch, &cs).unwrap();
        let y: Vec<f64> = (0..a.n_rows()).map(|i| 3.0 * a.at(i, 1)).collect();
        let res = basis_pursuit(&a, &y).unwrap();
        assert!((res.beta[1] - 3.0).abs() < 1e-8);
        for (j, b) in res.beta.iter().enumerate() {
            if j != 1 {
                assert!(b.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn bp_zero_rhs() {
        let batch = random_batch(4, 10, 1);
        let cs = CandidateSet::from_sets(4, vec![set(4, &[0]), set(4, &[1])]).unwrap();
        let a = build_design(&batch, &cs).unwrap();
        let res = basis_pursuit(&a, &[0.0; 10]).unwrap();
        assert!(res.beta.iter().all(|&b| b == 0.0));
        assert_eq!(res.objective, 0.0);
    }

    #[test]
    fn bp_detects_infeasible() {
        let batch = vec![
            LabeledSample {
                point: InputPoint::from_signs(&[1.0]).unwrap(),
                value: 0.0,
            },
            LabeledSample {
                point: InputPoint::from_signs(&[-1.0]).unwrap(),
                value: 0.0,
            },
        ];
        let cs = CandidateSet::from_sets(1, vec![set(1, &[])]).unwrap();
        let a = build_design(&batch, &cs).unwrap();
        assert!(matches!(
            basis_pursuit(&a, &[1.0, -1.0]),
            Err(RecoveryError::Infeasible)
        ));
    }

    #[test]
    fn bp_objective_never_beats_feasible_truth() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for trial in 0..10 {
            let batch = random_batch(10, 60, 100 + trial);
            let sets: Vec<ParitySet> = vec![
                set(10, &[]),
                set(10, &[0]),
                set(10, &[3]),
                set(10, &[1, 2]),
                set(10, &[4, 7]),
                set(10, &[0, 5, 9]),
            ];
            let cs = CandidateSet::from_sets(10, sets).unwrap();
            let a = build_design(&batch, &cs).unwrap();
            let truth: Vec<f64> = (0..cs.len())
                .map(|_| {
                    if rng.random::<f64>() < 0.5 {
                        0.0
                    } else {
                        rng.random_range(-2.0..2.0)
                    }
                })
                .collect();
            let y = a.apply(&truth);
            let res = basis_pursuit(&a, &y).unwrap();
            let truth_l1: f64 = truth.iter().map(|v| v.abs()).sum();
            assert!(res.objective <= truth_l1 * (1.0 + 1e-6) + 1e-9);
        }
    }

    #[test]
    fn bpdn_zero_when_slack_allows() {
        let batch = random_batch(6, 30, 2);
        let cs = CandidateSet::from_sets(6, vec![set(6, &[0]), set(6, &[1])]).unwrap();
        let a = build_design(&batch, &cs).unwrap();
        let y = vec![0.5; 30];
        // ||y||_2 / sqrt(m) = 0.5, so delta = 1.0 admits beta = 0.
        let res = bpdn(&a, &y, 1.0).unwrap();
        assert!(res.beta.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn bpdn_zero_delta_matches_bp() {
        let batch = random_batch(8, 50, 4);
        let cs = CandidateSet::from_sets(
            8,
            vec![set(8, &[0]), set(8, &[2]), set(8, &[1, 3])],
        )
        .unwrap();
        let a = build_design(&batch, &cs).unwrap();
        let y: Vec<f64> = (0..a.n_rows())
            .map(|i| 2.0 * a.at(i, 0) - 0.5 * a.at(i, 2))
            .collect();
        let bp = basis_pursuit(&a, &y).unwrap();
        let dn = bpdn(&a, &y, 0.0).unwrap();
        for (x, z) in bp.beta.iter().zip(&dn.beta) {
            assert!((x - z).abs() < 1e-7);
        }
    }

    #[test]
    fn bpdn_respects_constraint_and_shrinks() {
        let batch = random_batch(10, 200, 8);
        let cs = CandidateSet::from_sets(
            10,
            vec![set(10, &[0]), set(10, &[1]), set(10, &[2, 3]), set(10, &[5])],
        )
        .unwrap();
        let a = build_design(&batch, &cs).unwrap();
        let truth = [1.5, 0.0, -0.75, 0.25];
        let y = a.apply(&truth);
        let delta = 0.2;
        let res = bpdn(&a, &y, delta).unwrap();
        assert!(res.residual <= delta * (1.0 + 1e-6));
        let truth_l1: f64 = truth.iter().map(|v| v.abs()).sum();
        // The constrained solution spends strictly less L1 than the exact one.
        assert!(res.objective < truth_l1 + 1e-9);
    }

    #[test]
    fn bpdn_infeasible_below_span_distance() {
        let batch = vec![
            LabeledSample {
                point: InputPoint::from_signs(&[1.0]).unwrap(),
                value: 0.0,
            },
            LabeledSample {
                point: InputPoint::from_signs(&[-1.0]).unwrap(),
                value: 0.0,
            },
        ];
        let cs = CandidateSet::from_sets(1, vec![set(1, &[])]).unwrap();
        let a = build_design(&batch, &cs).unwrap();
        // y = (1, -1) has distance sqrt(2) from the all-ones column span;
        // scaled distance is 1. delta = 0.5 must be infeasible.
        assert!(matches!(
            bpdn(&a, &[1.0, -1.0], 0.5),
            Err(RecoveryError::Infeasible)
        ));
        // delta = 1.1 is feasible with beta = 0.
        let res = bpdn(&a, &[1.0, -1.0], 1.1).unwrap();
        assert!(res.beta[0].abs() < 1e-9);
    }

    #[test]
    fn candidate_set_json_round_trip() {
        let cs = CandidateSet::from_sets(5, vec![set(5, &[]), set(5, &[0, 4])]).unwrap();
        let json = serde_json::to_string(&cs).unwrap();
        assert_eq!(json, r#"{"n":5,"sets":[[],[1,5]]}"#);
        let back: CandidateSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cs);
    }

    #[test]
    fn result_serializes_with_candidates_for_audit() {
        let batch = random_batch(4, 12, 6);
        let cs = CandidateSet::from_sets(4, vec![set(4, &[0]), set(4, &[1, 2])]).unwrap();
        let a = build_design(&batch, &cs).unwrap();
        let y: Vec<f64> = (0..a.n_rows()).map(|i| 1.5 * a.at(i, 0)).collect();
        let res = basis_pursuit(&a, &y).unwrap();
        let doc = serde_json::json!({ "result": res, "candidates": cs });
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.contains("\"beta\""));
        assert!(text.contains("\"objective\""));
        assert!(text.contains("\"sets\""));
    }
}
