//! Dense two-phase tableau simplex for the small equality-form programs the
//! recovery module produces (rank-reduced rows, at most a few hundred
//! columns). Dantzig pricing with a switch to Bland's rule if the iteration
//! count suggests cycling.

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub(crate) enum LpResult {
    Optimal { x: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// Minimizes `c . x` subject to `A x = b`, `x >= 0`. The rows of `a` should
/// be linearly independent; `b` may have any signs.
pub(crate) fn solve_standard_form(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpResult {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m, "rhs length mismatch");
    if m == 0 {
        return LpResult::Optimal { x: vec![0.0; n] };
    }

    // Tableau columns: n structural, m artificial, then the rhs. Rows are
    // sign-flipped so the rhs is nonnegative and artificials form a basis.
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m];
    for i in 0..m {
        assert_eq!(a[i].len(), n, "row width mismatch");
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimize the artificial sum.
    let phase1_cost: Vec<f64> = (0..n + m).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    match run_phase(&mut t, &mut basis, &phase1_cost, n + m) {
        PhaseOutcome::Optimal(obj) => {
            if obj > 1e-7 * (1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
                return LpResult::Infeasible;
            }
        }
        PhaseOutcome::Unbounded => return LpResult::Infeasible,
        PhaseOutcome::Stalled => return LpResult::Infeasible,
    }

    // Drive residual artificials out of the basis where possible.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[i][j].abs() > PIVOT_TOL) {
                pivot(&mut t, &mut basis, i, j);
            }
        }
    }

    // Phase 2 over the structural columns only.
    let phase2_cost: Vec<f64> = (0..n + m)
        .map(|j| if j < n { c[j] } else { 0.0 })
        .collect();
    match run_phase(&mut t, &mut basis, &phase2_cost, n) {
        PhaseOutcome::Optimal(_) => {}
        PhaseOutcome::Unbounded => return LpResult::Unbounded,
        PhaseOutcome::Stalled => return LpResult::Unbounded,
    }

    let mut x = vec![0.0; n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            x[bi] = t[i][width - 1];
        }
    }
    LpResult::Optimal { x }
}

enum PhaseOutcome {
    Optimal(f64),
    Unbounded,
    Stalled,
}

/// Runs simplex iterations for the given cost vector, considering entering
/// columns below `col_limit`. Returns the final objective value.
fn run_phase(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    col_limit: usize,
) -> PhaseOutcome {
    let m = t.len();
    let width = t[0].len();
    let max_iters = 200 * (col_limit + m);
    let bland_after = 20 * (col_limit + m);

    for iter in 0..max_iters {
        // Reduced costs from the current basis: r_j = c_j - c_B . T[:, j].
        let entering = {
            let reduced = |j: usize| {
                let mut r = cost[j];
                for i in 0..m {
                    let cb = cost[basis[i]];
                    if cb != 0.0 {
                        r -= cb * t[i][j];
                    }
                }
                r
            };
            if iter < bland_after {
                let mut best = None;
                let mut best_r = -COST_TOL;
                for j in 0..col_limit {
                    let r = reduced(j);
                    if r < best_r {
                        best_r = r;
                        best = Some(j);
                    }
                }
                best
            } else {
                (0..col_limit).find(|&j| reduced(j) < -COST_TOL)
            }
        };
        let Some(j) = entering else {
            let mut obj = 0.0;
            for i in 0..m {
                obj += cost[basis[i]] * t[i][width - 1];
            }
            return PhaseOutcome::Optimal(obj);
        };

        // Ratio test; ties go to the lowest basis index (Bland-compatible).
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][j] > PIVOT_TOL {
                let ratio = t[i][width - 1] / t[i][j];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-12
                            || (ratio < lr + 1e-12 && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            return PhaseOutcome::Unbounded;
        };
        pivot(t, basis, i, j);
    }
    PhaseOutcome::Stalled
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let (before, rest) = t.split_at_mut(row);
    let (pivot_row, after) = rest.split_first_mut().unwrap();
    for other in before.iter_mut().chain(after.iter_mut()) {
        let factor = other[col];
        if factor != 0.0 {
            for (dst, src) in other.iter_mut().zip(pivot_row.iter()) {
                *dst -= factor * src;
            }
            other[col] = 0.0;
        }
    }
    basis[row] = col;
}
