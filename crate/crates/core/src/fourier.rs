//! Polynomials over `{-1,+1}^n`: parity evaluation, the sign/bit
//! correspondence, structural predicates on coefficient vectors, and a
//! brute-force Walsh-Hadamard oracle for small dimensions.
//!
//! Throughout the crate a point `x` is stored q-mapped: bit `j` is set iff
//! `x_j == -1`. The empty parity set denotes the constant character, which is
//! identically `+1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector};

/// Dimension cap for anything that materializes a full `2^n` table.
pub const MAX_TABLE_DIM: usize = 24;
/// Sparsity cap for the `3^s` / `2^s` structural enumerations.
pub const MAX_ENUM_SPARSITY: usize = 20;
/// Coefficients below this magnitude are dropped by the WHT oracle; the
/// double-precision roundoff floor for sums of up to `2^24` terms.
pub const WHT_PRUNE_THRESHOLD: f64 = 1e-12;
/// Default tolerance for the general-position test. The definition is over
/// exact reals; on floats the threshold is a caller-visible knob.
pub const GENERAL_POSITION_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FourierError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("entry {0} is not -1 or +1")]
    InvalidEntry(f64),
    #[error("{what} {got} exceeds supported limit {limit}")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("coefficient {0} is zero or non-finite")]
    InvalidCoefficient(f64),
    #[error("duplicate parity set in term list")]
    DuplicateTerm,
    #[error("parity index {index} out of range for dimension {n} (indices are 1-based)")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("table length {0} is not a power of two")]
    BadTableLength(usize),
}

/// A point of the hypercube, stored q-mapped (bit set iff the coordinate
/// is -1).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct InputPoint {
    bits: BitVector,
}

impl InputPoint {
    /// Builds a point from explicit signs; every entry must be exactly ±1.
    pub fn from_signs(signs: &[f64]) -> Result<Self, FourierError> {
        let mut bits = BitVector::zeros(signs.len());
        for (j, &v) in signs.iter().enumerate() {
            if v == -1.0 {
                bits.set(j, true);
            } else if v != 1.0 {
                return Err(FourierError::InvalidEntry(v));
            }
        }
        Ok(InputPoint { bits })
    }

    pub fn from_bits(bits: BitVector) -> Self {
        InputPoint { bits }
    }

    pub fn all_ones(n: usize) -> Self {
        InputPoint {
            bits: BitVector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn sign(&self, j: usize) -> f64 {
        if self.bits.get(j) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn signs(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.sign(j)).collect()
    }

    /// The q-image of the point: 1 where the coordinate is -1.
    pub fn bits(&self) -> &BitVector {
        &self.bits
    }
}

impl std::fmt::Debug for InputPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for j in 0..self.dim() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", if self.bits.get(j) { "-1" } else { "+1" })?;
        }
        write!(f, ")")
    }
}

/// A subset of coordinates as an F2 indicator vector. The all-zero vector is
/// the empty set and denotes the constant parity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParitySet {
    bits: BitVector,
}

impl ParitySet {
    pub fn empty(n: usize) -> Self {
        ParitySet {
            bits: BitVector::zeros(n),
        }
    }

    /// From 0-based coordinate indices.
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self, FourierError> {
        let mut bits = BitVector::zeros(n);
        for &i in indices {
            if i >= n {
                return Err(FourierError::IndexOutOfRange { index: i + 1, n });
            }
            bits.set(i, true);
        }
        Ok(ParitySet { bits })
    }

    pub fn from_bits(bits: BitVector) -> Self {
        ParitySet { bits }
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    pub fn is_constant(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn size(&self) -> usize {
        self.bits.count_ones()
    }

    /// 0-based member indices, ascending.
    pub fn indices(&self) -> Vec<usize> {
        self.bits.ones().collect()
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    /// Symmetric difference; the product character `chi_S * chi_T`.
    pub fn sym_diff(&self, other: &ParitySet) -> ParitySet {
        let mut bits = self.bits.clone();
        bits.xor_assign(&other.bits);
        ParitySet { bits }
    }
}

impl std::fmt::Debug for ParitySet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.bits.ones().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

// Canonical set order: lexicographic on the ascending index list, so the JSON
// term order and the deterministic evaluation order agree.
impl Ord for ParitySet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits
            .ones()
            .cmp(other.bits.ones())
            .then(self.bits.len().cmp(&other.bits.len()))
    }
}

impl PartialOrd for ParitySet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A joint sign assignment of an ordered list of parities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignPattern {
    signs: Vec<i8>,
}

impl SignPattern {
    pub fn new(signs: Vec<i8>) -> Result<Self, FourierError> {
        if let Some(&bad) = signs.iter().find(|&&v| v != 1 && v != -1) {
            return Err(FourierError::InvalidEntry(bad as f64));
        }
        Ok(SignPattern { signs })
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `sum_i c_i a_i` for this pattern `a`.
    pub fn weighted_sum(&self, coeffs: &[f64]) -> Result<f64, FourierError> {
        if coeffs.len() != self.signs.len() {
            return Err(FourierError::DimensionMismatch(format!(
                "{} coefficients against pattern of length {}",
                coeffs.len(),
                self.signs.len()
            )));
        }
        Ok(self
            .signs
            .iter()
            .zip(coeffs)
            .map(|(&a, &c)| c * a as f64)
            .sum())
    }
}

/// A labeled sample `<f(x), x>`.
#[derive(Clone, Debug)]
pub struct LabeledSample {
    pub point: InputPoint,
    pub value: f64,
}

/// A stack of hypercube points, one per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SignMatrix {
    n: usize,
    rows: Vec<InputPoint>,
}

impl SignMatrix {
    pub fn from_points(n: usize, rows: Vec<InputPoint>) -> Result<Self, FourierError> {
        if let Some(r) = rows.iter().find(|r| r.dim() != n) {
            return Err(FourierError::DimensionMismatch(format!(
                "row of dimension {} in a matrix of width {n}",
                r.dim()
            )));
        }
        Ok(SignMatrix { n, rows })
    }

    pub fn from_signs(rows: &[Vec<f64>]) -> Result<Self, FourierError> {
        let n = rows.first().map_or(0, |r| r.len());
        let points = rows
            .iter()
            .map(|r| {
                if r.len() != n {
                    return Err(FourierError::DimensionMismatch(
                        "ragged sign matrix".into(),
                    ));
                }
                InputPoint::from_signs(r)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SignMatrix { n, rows: points })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[InputPoint] {
        &self.rows
    }

    /// Column `j` as a packed bit column (bit `r` set iff entry `(r, j)` is
    /// -1). Used to find identical columns without forming the full Gram
    /// matrix. Transposes 64x64 tiles at a time.
    pub fn packed_columns(&self) -> Vec<BitVector> {
        let n = self.n;
        let n_rows = self.rows.len();
        let col_words = n_rows.div_ceil(64);
        let mut cols: Vec<Vec<u64>> = vec![vec![0u64; col_words]; n];
        for (block, row_chunk) in self.rows.chunks(64).enumerate() {
            for w in 0..n.div_ceil(64) {
                let mut tile = [0u64; 64];
                for (i, row) in row_chunk.iter().enumerate() {
                    tile[i] = row.bits().words().get(w).copied().unwrap_or(0);
                }
                crate::gf2::transpose64(&mut tile);
                let col_base = w * 64;
                for (j, &word) in tile.iter().enumerate().take(n.saturating_sub(col_base).min(64)) {
                    if word != 0 {
                        cols[col_base + j][block] = word;
                    }
                }
            }
        }
        cols.into_iter()
            .map(|words| BitVector::from_words(n_rows, words))
            .collect()
    }
}

/// `q`: sign matrix -> F2 matrix, elementwise `-1 -> 1`, `+1 -> 0`.
pub fn q_map(x: &SignMatrix) -> BitMatrix {
    let mut m = BitMatrix::new(x.n());
    for row in x.rows() {
        m.push_row(row.bits().clone());
    }
    m
}

/// Inverse of [`q_map`].
pub fn q_inv(y: &BitMatrix) -> SignMatrix {
    SignMatrix {
        n: y.n_cols(),
        rows: y.rows().iter().map(|r| InputPoint::from_bits(r.clone())).collect(),
    }
}

/// `chi_S(x)`, the product of the coordinates indexed by `S`. The empty set
/// gives the empty product, +1.
pub fn eval_parity(s: &ParitySet, x: &InputPoint) -> Result<f64, FourierError> {
    if s.dim() != x.dim() {
        return Err(FourierError::DimensionMismatch(format!(
            "parity over {} coordinates at a point of dimension {}",
            s.dim(),
            x.dim()
        )));
    }
    Ok(eval_parity_unchecked(s, x))
}

#[inline]
pub(crate) fn eval_parity_unchecked(s: &ParitySet, x: &InputPoint) -> f64 {
    if s.bits.dot(x.bits()) {
        -1.0
    } else {
        1.0
    }
}

/// A sparse polynomial as a map from parity sets to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct SparsePolynomial {
    n: usize,
    terms: BTreeMap<ParitySet, f64>,
}

impl SparsePolynomial {
    pub fn new(n: usize) -> Self {
        SparsePolynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (ParitySet, f64)>,
    ) -> Result<Self, FourierError> {
        let mut poly = SparsePolynomial::new(n);
        for (set, coeff) in terms {
            if set.dim() != n {
                return Err(FourierError::DimensionMismatch(format!(
                    "term over {} coordinates in a polynomial of dimension {n}",
                    set.dim()
                )));
            }
            if coeff == 0.0 || !coeff.is_finite() {
                return Err(FourierError::InvalidCoefficient(coeff));
            }
            if poly.terms.insert(set, coeff).is_some() {
                return Err(FourierError::DuplicateTerm);
            }
        }
        Ok(poly)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored (nonzero) terms.
    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, set: &ParitySet) -> f64 {
        self.terms.get(set).copied().unwrap_or(0.0)
    }

    /// Terms in canonical set order.
    pub fn terms(&self) -> impl Iterator<Item = (&ParitySet, f64)> {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn support(&self) -> impl Iterator<Item = &ParitySet> {
        self.terms.keys()
    }

    /// Adds `delta` to the coefficient of `set`, dropping the term if it
    /// cancels to exactly zero.
    pub fn add_to(&mut self, set: ParitySet, delta: f64) {
        assert_eq!(set.dim(), self.n, "term dimension mismatch");
        let entry = self.terms.entry(set.clone()).or_insert(0.0);
        *entry += delta;
        if *entry == 0.0 {
            self.terms.remove(&set);
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// `f(x)`, summed in canonical term order so repeated evaluations are
    /// bit-identical.
    pub fn eval(&self, x: &InputPoint) -> Result<f64, FourierError> {
        if x.dim() != self.n {
            return Err(FourierError::DimensionMismatch(format!(
                "point of dimension {} against polynomial of dimension {}",
                x.dim(),
                self.n
            )));
        }
        Ok(self
            .terms
            .iter()
            .map(|(s, &c)| c * eval_parity_unchecked(s, x))
            .sum())
    }

    /// Largest absolute coefficient difference against `other`, over the
    /// union of supports.
    pub fn max_coeff_distance(&self, other: &SparsePolynomial) -> f64 {
        let mut worst: f64 = 0.0;
        for (s, c) in self.terms() {
            worst = worst.max((c - other.coeff(s)).abs());
        }
        for (s, c) in other.terms() {
            worst = worst.max((c - self.coeff(s)).abs());
        }
        worst
    }

    /// L2 distance between coefficient vectors, over the union of supports.
    pub fn coeff_l2_distance(&self, other: &SparsePolynomial) -> f64 {
        let mut acc = 0.0;
        for (s, c) in self.terms() {
            let d = c - other.coeff(s);
            acc += d * d;
        }
        for (s, c) in other.terms() {
            if self.terms.contains_key(s) {
                continue;
            }
            acc += c * c;
        }
        acc.sqrt()
    }
}

/// `f(x)` as the spec-level operation name.
pub fn eval_poly(f: &SparsePolynomial, x: &InputPoint) -> Result<f64, FourierError> {
    f.eval(x)
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    set: Vec<usize>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    n: usize,
    terms: Vec<TermJson>,
}

impl TryFrom<PolyJson> for SparsePolynomial {
    type Error = FourierError;

    fn try_from(json: PolyJson) -> Result<Self, FourierError> {
        let mut terms = Vec::with_capacity(json.terms.len());
        for t in &json.terms {
            // JSON indices are 1-based.
            let mut zero_based = Vec::with_capacity(t.set.len());
            for &i in &t.set {
                if i == 0 || i > json.n {
                    return Err(FourierError::IndexOutOfRange { index: i, n: json.n });
                }
                zero_based.push(i - 1);
            }
            let set = ParitySet::from_indices(json.n, &zero_based)?;
            if set.size() != t.set.len() {
                return Err(FourierError::DuplicateTerm);
            }
            terms.push((set, t.coeff));
        }
        SparsePolynomial::from_terms(json.n, terms)
    }
}

impl From<SparsePolynomial> for PolyJson {
    fn from(poly: SparsePolynomial) -> PolyJson {
        PolyJson {
            n: poly.n,
            terms: poly
                .terms
                .iter()
                .map(|(s, &c)| TermJson {
                    set: s.indices().iter().map(|i| i + 1).collect(),
                    coeff: c,
                })
                .collect(),
        }
    }
}

/// Exact Fourier coefficients of a full evaluation table: `c_S = 2^-n *
/// sum_x f(x) chi_S(x)`, keeping coefficients above [`WHT_PRUNE_THRESHOLD`].
///
/// Table index `i` encodes the point with `x_j = -1` iff bit `j` of `i` is
/// set (the q convention), so index 0 is the all-plus-one point.
pub fn brute_force_wht(table: &[f64]) -> Result<SparsePolynomial, FourierError> {
    if !table.len().is_power_of_two() {
        return Err(FourierError::BadTableLength(table.len()));
    }
    let n = table.len().trailing_zeros() as usize;
    if n > MAX_TABLE_DIM {
        return Err(FourierError::TooLarge {
            what: "table dimension",
            got: n,
            limit: MAX_TABLE_DIM,
        });
    }
    let mut buf = table.to_vec();
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
    let scale = 1.0 / buf.len() as f64;
    let mut poly = SparsePolynomial::new(n);
    for (idx, &v) in buf.iter().enumerate() {
        let c = v * scale;
        if c.abs() >= WHT_PRUNE_THRESHOLD {
            let set = ParitySet::from_bits(BitVector::from_word_fn(n, || idx as u64));
            poly.terms.insert(set, c);
        }
    }
    Ok(poly)
}

/// Full evaluation table of `f`, indexed by the same q convention as
/// [`brute_force_wht`].
pub fn eval_table(f: &SparsePolynomial) -> Result<Vec<f64>, FourierError> {
    if f.n() > MAX_TABLE_DIM {
        return Err(FourierError::TooLarge {
            what: "table dimension",
            got: f.n(),
            limit: MAX_TABLE_DIM,
        });
    }
    (0..1usize << f.n())
        .map(|idx| {
            let x = InputPoint::from_bits(BitVector::from_word_fn(f.n(), || idx as u64));
            f.eval(&x)
        })
        .collect()
}

/// DFS over `b in {0,1,-1}^s` with at least one nonzero entry; true iff some
/// combination satisfies `|sum_i c_i b_i| <= threshold`. Each leaf sum is
/// rebuilt along the path, so no roundoff accumulates across combinations.
fn some_combination_within(coeffs: &[f64], threshold: f64) -> Result<bool, FourierError> {
    if coeffs.len() > MAX_ENUM_SPARSITY {
        return Err(FourierError::TooLarge {
            what: "coefficient count",
            got: coeffs.len(),
            limit: MAX_ENUM_SPARSITY,
        });
    }
    fn walk(coeffs: &[f64], depth: usize, partial: f64, any_nonzero: bool, thr: f64) -> bool {
        if depth == coeffs.len() {
            return any_nonzero && partial.abs() <= thr;
        }
        let c = coeffs[depth];
        walk(coeffs, depth + 1, partial, any_nonzero, thr)
            || walk(coeffs, depth + 1, partial + c, true, thr)
            || walk(coeffs, depth + 1, partial - c, true, thr)
    }
    Ok(walk(coeffs, 0, 0.0, false, threshold))
}

/// True iff no nonzero `{0,1,-1}` combination of the coefficients has
/// magnitude at most `tol`.
pub fn is_general_position(coeffs: &[f64], tol: f64) -> Result<bool, FourierError> {
    Ok(!some_combination_within(coeffs, tol)?)
}

/// True iff every nonzero `{0,1,-1}` combination of the coefficients has
/// magnitude strictly above `mu`.
pub fn is_mu_separated(coeffs: &[f64], mu: f64) -> Result<bool, FourierError> {
    Ok(!some_combination_within(coeffs, mu)?)
}

/// Whether the maximum of `sum_i c_i a_i` over the realizable sign patterns
/// of `f`'s parities is attained by exactly one pattern.
///
/// Realizable patterns form the image of the F2-linear map `x -> (<p_i, x>)_i`
/// and are enumerated through a basis of that image, `2^rank` patterns rather
/// than `2^s`. Ties are detected with a relative tolerance of 1e-9.
pub fn has_unique_sign_property(f: &SparsePolynomial) -> Result<bool, FourierError> {
    let s = f.sparsity();
    if s > MAX_ENUM_SPARSITY {
        return Err(FourierError::TooLarge {
            what: "sparsity",
            got: s,
            limit: MAX_ENUM_SPARSITY,
        });
    }
    if s == 0 {
        return Ok(true);
    }
    let coeffs: Vec<f64> = f.terms().map(|(_, c)| c).collect();

    // Column j of the parity matrix, packed into s bits; keep a basis of the
    // column space indexed by leading bit.
    let mut by_leading = [0u32; 32];
    for j in 0..f.n() {
        let mut col = 0u32;
        for (i, (set, _)) in f.terms().enumerate() {
            if set.bits().get(j) {
                col |= 1 << i;
            }
        }
        while col != 0 {
            let lead = (31 - col.leading_zeros()) as usize;
            if by_leading[lead] == 0 {
                by_leading[lead] = col;
                break;
            }
            col ^= by_leading[lead];
        }
    }
    let basis: Vec<u32> = by_leading.iter().copied().filter(|&b| b != 0).collect();

    let tol = 1e-9 * (1.0 + coeffs.iter().map(|c| c.abs()).sum::<f64>());
    let mut best = f64::NEG_INFINITY;
    let mut ties = 0usize;
    let mut mask = 0u32;
    for g in 0..1u64 << basis.len() {
        if g > 0 {
            mask ^= basis[g.trailing_zeros() as usize];
        }
        let value: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if mask >> i & 1 == 1 { -c } else { c })
            .sum();
        if value > best {
            ties = if value - best <= tol { ties + 1 } else { 1 };
            best = value;
        } else if best - value <= tol {
            ties += 1;
        }
    }
    Ok(ties == 1)
}
