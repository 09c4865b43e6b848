//! Bit-packed linear algebra over F2: rank, row reduction, and enumeration of
//! every solution of an affine system `Mp = b`.

use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// The affine system is underdetermined beyond the configured cap, i.e.
    /// there are too few independent rows to pin the solution space down.
    #[error("affine system has 2^{solutions_log2} solutions, exceeding cap {cap}")]
    SolutionCountExceeded { solutions_log2: u32, cap: u64 },
}

/// A vector over F2, packed 64 bits per word. Unused high bits of the last
/// word are kept zero so that equality and hashing work on the raw words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + b)
            })
        })
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of mismatched lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// `<self, other>` over F2, i.e. the parity of the AND.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of mismatched lengths");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Builds a vector of `len` bits from a word source, masking the tail.
    /// Handy for uniform random vectors: pass the RNG's word output.
    pub fn from_word_fn(len: usize, mut next: impl FnMut() -> u64) -> Self {
        let n_words = len.div_ceil(WORD_BITS);
        let mut words: Vec<u64> = (0..n_words).map(|_| next()).collect();
        let tail = len % WORD_BITS;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        BitVector { len, words }
    }
}

impl BitVector {
    /// From raw words; the tail beyond `len` is masked off.
    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        assert_eq!(words.len(), len.div_ceil(WORD_BITS));
        let tail = len % WORD_BITS;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        BitVector { len, words }
    }
}

/// In-place transpose of a 64x64 bit tile: bit `b` of `a[k]` moves to bit
/// `k` of `a[b]` (bit 0 is column 0).
pub(crate) fn transpose64(a: &mut [u64; 64]) {
    let mut j = 32;
    let mut m: u64 = 0x0000_0000_FFFF_FFFF;
    while j != 0 {
        let mut k = 0;
        while k < 64 {
            // Swap row k's high j bits with row k+j's low j bits.
            let t = (a[k] >> j ^ a[k + j]) & m;
            a[k] ^= t << j;
            a[k + j] ^= t;
            k = (k + j + 1) & !j;
        }
        j >>= 1;
        m ^= m << j;
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector[")?;
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        write!(f, "]")
    }
}

/// A matrix over F2 stored as a list of packed rows of equal width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        BitMatrix { cols, rows: Vec::new() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self, Gf2Error> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch(format!(
                "row of width {} in a matrix of width {cols}",
                r.len()
            )));
        }
        Ok(BitMatrix { cols, rows })
    }

    pub fn push_row(&mut self, row: BitVector) {
        assert_eq!(row.len(), self.cols, "row width mismatch");
        self.rows.push(row);
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    /// Rank over F2 by Gaussian elimination on a scratch copy.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        echelon(&mut rows, self.cols).len()
    }
}

/// Forward-eliminates `rows` in place (each of width >= `cols`; columns past
/// `cols` ride along as an augmented part) and returns the pivot columns.
fn echelon(rows: &mut [BitVector], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..cols {
        if next_row >= rows.len() {
            break;
        }
        let Some(pivot) = (next_row..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next_row, pivot);
        let pivot_row = rows[next_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next_row && row.get(col) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    pivots
}

/// All `p` with `Mp = b`, as a particular solution plus the span of the
/// nullspace basis. Returns the empty set when the system is infeasible and
/// errors out (rather than truncating) when the solution count `2^(n - rank)`
/// would exceed `cap`.
///
/// Solutions are emitted in Gray-code order over the free variables, so each
/// successive solution is one basis-vector XOR away from its predecessor.
pub fn solve_affine_all(
    m: &BitMatrix,
    b: &BitVector,
    cap: u64,
) -> Result<Vec<BitVector>, Gf2Error> {
    if b.len() != m.n_rows() {
        return Err(Gf2Error::DimensionMismatch(format!(
            "rhs of length {} against {} rows",
            b.len(),
            m.n_rows()
        )));
    }
    assert!(cap >= 1, "cap must be at least 1");
    let n = m.n_cols();

    // Augment each row with its rhs bit in column n.
    let mut rows: Vec<BitVector> = m
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut aug = BitVector::zeros(n + 1);
            for j in r.ones() {
                aug.set(j, true);
            }
            aug.set(n, b.get(i));
            aug
        })
        .collect();

    let pivots = echelon(&mut rows, n);
    let rank = pivots.len();

    // A zero coefficient row with rhs 1 means no solution.
    for row in rows.iter().skip(rank) {
        if row.get(n) {
            return Ok(Vec::new());
        }
    }

    let free_cols: Vec<usize> = {
        let mut piv = pivots.iter().copied().peekable();
        (0..n)
            .filter(|&c| {
                if piv.peek() == Some(&c) {
                    piv.next();
                    false
                } else {
                    true
                }
            })
            .collect()
    };
    let free = free_cols.len();
    if free >= 63 || (1u64 << free) > cap {
        return Err(Gf2Error::SolutionCountExceeded {
            solutions_log2: free as u32,
            cap,
        });
    }

    // Particular solution: free variables zero. Rows are fully reduced, so
    // each pivot variable reads straight off its row's rhs.
    let mut particular = BitVector::zeros(n);
    for (r, &pc) in pivots.iter().enumerate() {
        particular.set(pc, rows[r].get(n));
    }

    // Nullspace basis: one vector per free column.
    let basis: Vec<BitVector> = free_cols
        .iter()
        .map(|&fc| {
            let mut v = BitVector::zeros(n);
            v.set(fc, true);
            for (r, &pc) in pivots.iter().enumerate() {
                if rows[r].get(fc) {
                    v.set(pc, true);
                }
            }
            v
        })
        .collect();

    let count = 1u64 << free;
    let mut out = Vec::with_capacity(count as usize);
    let mut cur = particular;
    out.push(cur.clone());
    for g in 1..count {
        cur.xor_assign(&basis[g.trailing_zeros() as usize]);
        out.push(cur.clone());
    }
    Ok(out)
}

/// `M v` over F2.
pub fn mat_vec(m: &BitMatrix, v: &BitVector) -> Result<BitVector, Gf2Error> {
    if v.len() != m.n_cols() {
        return Err(Gf2Error::DimensionMismatch(format!(
            "vector of length {} against {} columns",
            v.len(),
            m.n_cols()
        )));
    }
    let mut out = BitVector::zeros(m.n_rows());
    for (i, row) in m.rows().iter().enumerate() {
        out.set(i, row.dot(v));
    }
    Ok(out)
}

/// True iff the stacked vectors have full rank over F2.
pub fn linearly_independent(vectors: &[BitVector]) -> Result<bool, Gf2Error> {
    let Some(first) = vectors.first() else {
        return Ok(true);
    };
    let m = BitMatrix::from_rows(first.len(), vectors.to_vec())?;
    Ok(m.rank() == vectors.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(len: usize, ones: &[usize]) -> BitVector {
        BitVector::from_indices(len, ones)
    }

    #[test]
    fn rank_identity() {
        let m = BitMatrix::from_rows(2, vec![bv(2, &[0]), bv(2, &[1])]).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_zero_matrix() {
        let m = BitMatrix::from_rows(4, vec![bv(4, &[]); 3]).unwrap();
        assert_eq!(m.rank(), 0);
    }

    #[test]
    fn rank_dependent_rows() {
        // Third row is the XOR of the first two.
        let m = BitMatrix::from_rows(
            3,
            vec![bv(3, &[0, 1]), bv(3, &[1, 2]), bv(3, &[0, 2])],
        )
        .unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn solve_unique() {
        let m = BitMatrix::from_rows(2, vec![bv(2, &[0]), bv(2, &[1])]).unwrap();
        let sols = solve_affine_all(&m, &bv(2, &[0, 1]), 16).unwrap();
        assert_eq!(sols, vec![bv(2, &[0, 1])]);
    }

    #[test]
    fn solve_one_row_two_solutions() {
        let m = BitMatrix::from_rows(2, vec![bv(2, &[0, 1])]).unwrap();
        let mut sols = solve_affine_all(&m, &bv(1, &[0]), 16).unwrap();
        sols.sort();
        assert_eq!(sols, vec![bv(2, &[0]), bv(2, &[1])]);
    }

    #[test]
    fn solve_cap_exceeded() {
        let m = BitMatrix::from_rows(2, vec![bv(2, &[0, 1])]).unwrap();
        let err = solve_affine_all(&m, &bv(1, &[0]), 1).unwrap_err();
        match err {
            Gf2Error::SolutionCountExceeded { solutions_log2, cap } => {
                assert_eq!(solutions_log2, 1);
                assert_eq!(cap, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn solve_infeasible_is_empty() {
        // x0 = 0 and x0 = 1 cannot both hold.
        let m = BitMatrix::from_rows(1, vec![bv(1, &[0]), bv(1, &[0])]).unwrap();
        let sols = solve_affine_all(&m, &bv(2, &[1]), 16).unwrap();
        assert!(sols.is_empty());
    }

    #[test]
    fn solutions_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.random_range(1..=10usize);
            let rows = rng.random_range(0..=n + 2);
            let m = BitMatrix::from_rows(
                n,
                (0..rows)
                    .map(|_| BitVector::from_word_fn(n, || rng.random()))
                    .collect(),
            )
            .unwrap();
            let b = BitVector::from_word_fn(rows, || rng.random());

            let mut expected: Vec<BitVector> = (0..1u64 << n)
                .map(|bits| BitVector::from_word_fn(n, || bits))
                .filter(|p| mat_vec(&m, p).unwrap() == b)
                .collect();
            expected.sort();

            let mut got = solve_affine_all(&m, &b, 1 << n).unwrap();
            got.sort();
            assert_eq!(got, expected, "n={n} rows={rows}");
            if !got.is_empty() {
                assert_eq!(got.len(), 1usize << (n - m.rank()));
            }
        }
    }

    #[test]
    fn gray_order_steps_by_one_basis_vector() {
        let m = BitMatrix::from_rows(6, vec![bv(6, &[0, 3]), bv(6, &[1, 4, 5])]).unwrap();
        let sols = solve_affine_all(&m, &bv(2, &[0, 1]), 64).unwrap();
        for pair in sols.windows(2) {
            let mut diff = pair[0].clone();
            diff.xor_assign(&pair[1]);
            // Each step flips exactly one nullspace basis vector.
            assert!(mat_vec(&m, &diff).unwrap().is_zero());
            assert!(!diff.is_zero());
        }
    }

    #[test]
    fn independence_examples() {
        assert!(linearly_independent(&[bv(2, &[0]), bv(2, &[1])]).unwrap());
        assert!(!linearly_independent(&[bv(2, &[0, 1]), bv(2, &[0, 1])]).unwrap());
        assert!(!linearly_independent(&[
            bv(3, &[0, 1]),
            bv(3, &[1, 2]),
            bv(3, &[0, 2])
        ])
        .unwrap());
    }

    #[test]
    fn mat_vec_dimension_checked() {
        let m = BitMatrix::from_rows(3, vec![bv(3, &[0])]).unwrap();
        assert!(mat_vec(&m, &bv(2, &[0])).is_err());
    }

    #[test]
    fn tile_transpose_matches_scalar() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut tile = [0u64; 64];
        for w in tile.iter_mut() {
            *w = rng.random();
        }
        let original = tile;
        transpose64(&mut tile);
        for (r, &row) in original.iter().enumerate() {
            for (c, &col) in tile.iter().enumerate() {
                assert_eq!(col >> r & 1, row >> c & 1, "({r},{c})");
            }
        }
    }
}
