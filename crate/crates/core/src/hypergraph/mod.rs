//! Hypergraph model, the cut-complement oracle, and the multilinear
//! expansion of the cut-complement function.

mod reconstruct;
mod sketch;

pub use reconstruct::{
    consistent_hypergraphs, edges_from_polynomial, edges_from_polynomial_capped, ReconstructError,
};
pub use sketch::{
    estimate_d, gram_matrix, learn_graph, round_to_grid, GraphConfig, Gram, SketchDiagnostics,
    SketchError, SketchResult,
};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fourier::{FourierError, InputPoint, ParitySet, SparsePolynomial};
use crate::gf2::BitVector;
use crate::sampling::SampleOracle;

/// Largest edge size the multilinear expansion will materialize (`2^(d-1)`
/// parities per edge).
pub const MAX_EDGE_SIZE: usize = 20;

#[derive(Debug, Error)]
pub enum HypergraphError {
    #[error("vertex {vertex} out of range for {n} vertices (vertices are 1-based)")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge of size {0} (singletons and empty edges are not representable)")]
    EdgeTooSmall(usize),
    #[error("edge of size {got} exceeds supported size {limit}")]
    EdgeTooLarge { got: usize, limit: usize },
    #[error("duplicate edge")]
    DuplicateEdge,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

/// A ±1 assignment of the vertices; the +1 side is the cut.
pub type CutAssignment = InputPoint;

/// A simple hypergraph: `n` vertices and a set of distinct edges, each a
/// vertex subset of size at least 2. Singleton edges are excluded because
/// the cut-complement query counts them unconditionally, masking them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HypergraphJson", into = "HypergraphJson")]
pub struct Hypergraph {
    n: usize,
    edges: Vec<BitVector>,
}

impl Hypergraph {
    pub fn empty(n: usize) -> Self {
        Hypergraph { n, edges: Vec::new() }
    }

    /// Builds from 0-based vertex lists. Edges are stored in a canonical
    /// order; duplicates and edges of size < 2 are rejected.
    pub fn from_edges(n: usize, edges: &[Vec<usize>]) -> Result<Self, HypergraphError> {
        let mut masks = Vec::with_capacity(edges.len());
        for e in edges {
            let mut mask = BitVector::zeros(n);
            for &v in e {
                if v >= n {
                    return Err(HypergraphError::VertexOutOfRange { vertex: v + 1, n });
                }
                mask.set(v, true);
            }
            let size = mask.count_ones();
            if size < 2 {
                return Err(HypergraphError::EdgeTooSmall(size));
            }
            masks.push(mask);
        }
        masks.sort_by(|a, b| a.ones().cmp(b.ones()));
        if masks.windows(2).any(|w| w[0] == w[1]) {
            return Err(HypergraphError::DuplicateEdge);
        }
        Ok(Hypergraph { n, edges: masks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge count `s`.
    pub fn s(&self) -> usize {
        self.edges.len()
    }

    /// Maximum edge size `d` (0 for the empty hypergraph).
    pub fn d(&self) -> usize {
        self.edges.iter().map(|e| e.count_ones()).max().unwrap_or(0)
    }

    /// Number of relevant vertices (those in at least one edge).
    pub fn k(&self) -> usize {
        self.relevant_vertices().count_ones()
    }

    pub fn relevant_vertices(&self) -> BitVector {
        let mut union = BitVector::zeros(self.n);
        for e in &self.edges {
            for v in e.ones() {
                union.set(v, true);
            }
        }
        union
    }

    pub fn edge_masks(&self) -> &[BitVector] {
        &self.edges
    }

    /// Edges as sorted 0-based vertex lists, in canonical order.
    pub fn edge_lists(&self) -> Vec<Vec<usize>> {
        self.edges.iter().map(|e| e.ones().collect()).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct HypergraphJson {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<HypergraphJson> for Hypergraph {
    type Error = HypergraphError;

    fn try_from(json: HypergraphJson) -> Result<Self, HypergraphError> {
        let zero_based: Vec<Vec<usize>> = json
            .edges
            .iter()
            .map(|e| {
                e.iter()
                    .map(|&v| {
                        if v == 0 || v > json.n {
                            Err(HypergraphError::VertexOutOfRange { vertex: v, n: json.n })
                        } else {
                            Ok(v - 1)
                        }
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Hypergraph::from_edges(json.n, &zero_based)
    }
}

impl From<Hypergraph> for HypergraphJson {
    fn from(g: Hypergraph) -> HypergraphJson {
        HypergraphJson {
            n: g.n,
            edges: g
                .edge_lists()
                .into_iter()
                .map(|e| e.into_iter().map(|v| v + 1).collect())
                .collect(),
        }
    }
}

/// Number of edges left uncut (monochromatic) by the assignment: the edge
/// count minus the cut value.
pub fn c_cut_value(g: &Hypergraph, x: &CutAssignment) -> Result<u32, HypergraphError> {
    if x.dim() != g.n {
        return Err(HypergraphError::DimensionMismatch(format!(
            "assignment of dimension {} on {} vertices",
            x.dim(),
            g.n
        )));
    }
    let xw = x.bits().words();
    let mut count = 0;
    for e in &g.edges {
        let ew = e.words();
        let mut all = true; // every edge vertex assigned -1
        let mut none = true; // every edge vertex assigned +1
        for (a, b) in ew.iter().zip(xw) {
            let hit = a & b;
            if hit != *a {
                all = false;
            }
            if hit != 0 {
                none = false;
            }
            if !all && !none {
                break;
            }
        }
        if all || none {
            count += 1;
        }
    }
    Ok(count)
}

/// Exact Fourier expansion of the cut-complement function: each edge `I`
/// contributes `2^(1-|I|) * chi_J` for every even-size `J` of `I`, including
/// the empty set. All coefficients are positive dyadics, so sparsity is at
/// most `s * 2^(d-1)` nonconstant terms plus the constant.
pub fn c_cut_polynomial(g: &Hypergraph) -> Result<SparsePolynomial, HypergraphError> {
    let mut poly = SparsePolynomial::new(g.n);
    for e in &g.edges {
        let verts: Vec<usize> = e.ones().collect();
        let t = verts.len();
        if t > MAX_EDGE_SIZE {
            return Err(HypergraphError::EdgeTooLarge { got: t, limit: MAX_EDGE_SIZE });
        }
        let coeff = 0.5f64.powi(t as i32 - 1);
        for mask in 0..1usize << t {
            if mask.count_ones() % 2 != 0 {
                continue;
            }
            let members: Vec<usize> = (0..t).filter(|&i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
            let set = ParitySet::from_indices(g.n, &members)?;
            poly.add_to(set, coeff);
        }
    }
    Ok(poly)
}

/// A cut-complement query oracle over a fixed hypergraph.
#[derive(Clone, Debug)]
pub struct CutOracle {
    graph: Hypergraph,
}

impl CutOracle {
    pub fn new(graph: Hypergraph) -> Self {
        CutOracle { graph }
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }
}

impl SampleOracle for CutOracle {
    fn dim(&self) -> usize {
        self.graph.n()
    }

    fn label(&self, x: &InputPoint, _rng: &mut ChaCha8Rng) -> f64 {
        c_cut_value(&self.graph, x).expect("oracle dimension mismatch") as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{eval_table, ParitySet};

    fn pt(signs: &[f64]) -> InputPoint {
        InputPoint::from_signs(signs).unwrap()
    }

    fn set(n: usize, idx: &[usize]) -> ParitySet {
        ParitySet::from_indices(n, idx).unwrap()
    }

    #[test]
    fn c_cut_examples() {
        let g = Hypergraph::from_edges(2, &[vec![0, 1]]).unwrap();
        assert_eq!(c_cut_value(&g, &pt(&[1.0, 1.0])).unwrap(), 1);
        assert_eq!(c_cut_value(&g, &pt(&[1.0, -1.0])).unwrap(), 0);
    }

    #[test]
    fn all_plus_attains_edge_count() {
        let g = Hypergraph::from_edges(
            6,
            &[vec![0, 1], vec![1, 2, 3], vec![4, 5]],
        )
        .unwrap();
        let all_plus = InputPoint::all_ones(6);
        assert_eq!(c_cut_value(&g, &all_plus).unwrap(), 3);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Hypergraph::from_edges(3, &[vec![0]]).is_err());
        assert!(Hypergraph::from_edges(3, &[vec![]]).is_err());
        assert!(Hypergraph::from_edges(3, &[vec![0, 3]]).is_err());
        assert!(Hypergraph::from_edges(3, &[vec![0, 1], vec![1, 0]]).is_err());
    }

    #[test]
    fn pair_edge_expansion() {
        let g = Hypergraph::from_edges(2, &[vec![0, 1]]).unwrap();
        let p = c_cut_polynomial(&g).unwrap();
        assert_eq!(p.sparsity(), 2);
        assert_eq!(p.coeff(&set(2, &[])), 0.5);
        assert_eq!(p.coeff(&set(2, &[0, 1])), 0.5);
    }

    #[test]
    fn triple_edge_expansion() {
        let g = Hypergraph::from_edges(3, &[vec![0, 1, 2]]).unwrap();
        let p = c_cut_polynomial(&g).unwrap();
        assert_eq!(p.sparsity(), 4);
        for s in [set(3, &[]), set(3, &[0, 1]), set(3, &[0, 2]), set(3, &[1, 2])] {
            assert_eq!(p.coeff(&s), 0.25);
        }
    }

    #[test]
    fn expansion_matches_queries_exhaustively() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let n = rng.random_range(2..=9usize);
            let s = rng.random_range(0..=3usize);
            let mut edges = Vec::new();
            for _ in 0..s {
                let size = rng.random_range(2..=n.min(5));
                let mut verts: Vec<usize> = (0..n).collect();
                for i in 0..size {
                    let j = rng.random_range(i..n);
                    verts.swap(i, j);
                }
                edges.push(verts[..size].to_vec());
            }
            edges.sort();
            edges.dedup();
            let g = Hypergraph::from_edges(n, &edges).unwrap();
            let p = c_cut_polynomial(&g).unwrap();
            let table = eval_table(&p).unwrap();
            for (idx, &v) in table.iter().enumerate() {
                let x = InputPoint::from_bits(crate::gf2::BitVector::from_word_fn(n, || {
                    idx as u64
                }));
                assert_eq!(v, c_cut_value(&g, &x).unwrap() as f64);
            }
            assert!(p.sparsity() <= g.s() * (1 << g.d().saturating_sub(1)) + 1);
            // Maximum over the cube is the edge count, at the all-plus point.
            let max = table.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(max, g.s() as f64);
            assert_eq!(table[0], g.s() as f64);
        }
    }

    #[test]
    fn constant_term_is_edge_size_sum() {
        let g = Hypergraph::from_edges(5, &[vec![0, 1], vec![1, 2, 3]]).unwrap();
        let p = c_cut_polynomial(&g).unwrap();
        let expected: f64 = 0.5 + 0.25;
        assert_eq!(p.coeff(&set(5, &[])), expected);
    }

    #[test]
    fn all_coefficients_positive_dyadic_and_unique_sign() {
        let g = Hypergraph::from_edges(
            7,
            &[vec![0, 1, 2], vec![2, 3], vec![4, 5, 6]],
        )
        .unwrap();
        let p = c_cut_polynomial(&g).unwrap();
        let grid = (1u64 << (g.d() - 1)) as f64;
        for (_, c) in p.terms() {
            assert!(c > 0.0);
            let scaled = c * grid;
            assert_eq!(scaled, scaled.round());
        }
        assert!(crate::fourier::has_unique_sign_property(&p).unwrap());
    }

    #[test]
    fn hypergraph_json_round_trip() {
        let g = Hypergraph::from_edges(4, &[vec![2, 0], vec![1, 2, 3]]).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"n":4,"edges":[[1,3],[2,3,4]]}"#);
        let back: Hypergraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
}
