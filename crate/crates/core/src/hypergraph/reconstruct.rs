//! Inverting the cut-complement expansion: given a polynomial, find the
//! unique singleton-free hypergraph whose expansion matches it.
//!
//! Each edge contributes a fixed positive bundle of coefficients, so within a
//! connected component of the support's co-occurrence graph the edge set can
//! be found by a depth-first search that always covers the largest remaining
//! support set. The constant term is shared across components and is checked
//! globally at the end.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Hypergraph, HypergraphError};
use crate::fourier::SparsePolynomial;

pub const DEFAULT_COMPONENT_CAP: usize = 24;

/// Matching tolerance; recovered polynomials carry exact dyadic coefficients,
/// so this only absorbs harmless representation noise.
const TOL: f64 = 1e-9;

const SEARCH_NODE_BUDGET: usize = 2_000_000;

#[derive(Debug, Error)]
pub enum ReconstructError {
    #[error("no singleton-free hypergraph matches the polynomial")]
    NoConsistentHypergraph,
    #[error("more than one hypergraph matches the polynomial")]
    AmbiguousHypergraph,
    #[error("support component of size {size} exceeds cap {cap}")]
    ComponentTooLarge { size: usize, cap: usize },
    #[error("reconstruction aborted: {0}")]
    Invalid(String),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

/// [`edges_from_polynomial_capped`] with the default component cap.
pub fn edges_from_polynomial(
    p: &SparsePolynomial,
    d: usize,
) -> Result<Hypergraph, ReconstructError> {
    edges_from_polynomial_capped(p, d, DEFAULT_COMPONENT_CAP)
}

/// Recovers the unique hypergraph with edges of sizes `2..=d` whose
/// cut-complement polynomial equals `p`. Components of the support's
/// co-occurrence graph are searched exhaustively and independently; a
/// mismatched or non-unique decomposition is reported, never guessed.
///
/// Non-unique decompositions genuinely exist: distinct edge families can
/// share an expansion, e.g. {014, 0234, 034, 13} and {0234, 134, 04, 013}
/// over five vertices match term for term, constant included.
pub fn edges_from_polynomial_capped(
    p: &SparsePolynomial,
    d: usize,
    k_cap: usize,
) -> Result<Hypergraph, ReconstructError> {
    let mut matches = consistent_hypergraphs(p, d, k_cap, 2)?;
    match matches.len() {
        0 => Err(ReconstructError::NoConsistentHypergraph),
        1 => Ok(matches.pop().unwrap()),
        _ => Err(ReconstructError::AmbiguousHypergraph),
    }
}

/// Every hypergraph (up to `limit` of them) with edges of sizes `2..=d`
/// whose expansion equals `p`. This is the exhaustive search behind
/// [`edges_from_polynomial`], exposed so callers can distinguish a unique
/// inverse from a genuine ambiguity.
pub fn consistent_hypergraphs(
    p: &SparsePolynomial,
    d: usize,
    k_cap: usize,
    limit: usize,
) -> Result<Vec<Hypergraph>, ReconstructError> {
    if d < 2 {
        return Err(ReconstructError::Invalid(format!(
            "edge size bound {d} below 2"
        )));
    }
    let n = p.n();
    let constant = p.coeff(&crate::fourier::ParitySet::empty(n));

    // Union-find over the vertices of the nonconstant support.
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<usize, usize>, v: usize) -> usize {
        let p = parent[&v];
        if p == v {
            return v;
        }
        let root = find(parent, p);
        parent.insert(v, root);
        root
    }
    let mut supports: Vec<(Vec<usize>, f64)> = Vec::new();
    for (set, coeff) in p.terms() {
        if set.is_constant() {
            continue;
        }
        let verts = set.indices();
        for &v in &verts {
            parent.entry(v).or_insert(v);
        }
        for w in verts.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent.insert(a, b);
            }
        }
        supports.push((verts, coeff));
    }

    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let keys: Vec<usize> = parent.keys().copied().collect();
    for v in keys {
        let root = find(&mut parent, v);
        components.entry(root).or_default().push(v);
    }

    // Solve each component separately.
    let mut per_component: Vec<Vec<(Vec<Vec<usize>>, f64)>> = Vec::new();
    for (root, verts) in &components {
        if verts.len() > k_cap {
            return Err(ReconstructError::ComponentTooLarge {
                size: verts.len(),
                cap: k_cap,
            });
        }
        // Local masks over the sorted component vertex list.
        let local_index: BTreeMap<usize, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut residual: BTreeMap<u32, f64> = BTreeMap::new();
        for (sup, coeff) in &supports {
            if find(&mut parent, sup[0]) != *root {
                continue;
            }
            let mask = sup
                .iter()
                .map(|v| 1u32 << local_index[v])
                .fold(0u32, |a, b| a | b);
            residual.insert(mask, *coeff);
        }

        let mut solutions = Vec::new();
        let mut budget = SEARCH_NODE_BUDGET;
        component_search(
            &mut residual,
            verts.len(),
            d,
            &mut Vec::new(),
            &mut solutions,
            &mut budget,
        )?;
        solutions.sort();
        solutions.dedup();
        if solutions.is_empty() {
            return Err(ReconstructError::NoConsistentHypergraph);
        }
        if solutions.len() > 8 {
            return Err(ReconstructError::AmbiguousHypergraph);
        }
        per_component.push(
            solutions
                .into_iter()
                .map(|edges| {
                    let implied: f64 = edges
                        .iter()
                        .map(|e: &u32| 0.5f64.powi(e.count_ones() as i32 - 1))
                        .sum();
                    let global: Vec<Vec<usize>> = edges
                        .iter()
                        .map(|e| {
                            (0..verts.len())
                                .filter(|&i| e >> i & 1 == 1)
                                .map(|i| verts[i])
                                .collect()
                        })
                        .collect();
                    (global, implied)
                })
                .collect(),
        );
    }

    // Keep the combinations of per-component solutions whose implied
    // constants sum to the polynomial's constant term.
    let combos: usize = per_component.iter().map(|s| s.len()).product();
    if combos > 4096 {
        return Err(ReconstructError::AmbiguousHypergraph);
    }
    let mut matches: Vec<Hypergraph> = Vec::new();
    for combo in 0..combos.max(1) {
        let mut rest = combo;
        let mut edges: Vec<Vec<usize>> = Vec::new();
        let mut implied = 0.0;
        for options in &per_component {
            let pick = rest % options.len();
            rest /= options.len();
            implied += options[pick].1;
            edges.extend(options[pick].0.iter().cloned());
        }
        if (implied - constant).abs() <= TOL {
            matches.push(Hypergraph::from_edges(n, &edges)?);
            if matches.len() >= limit {
                break;
            }
        }
    }
    Ok(matches)
}

/// DFS: cover the largest remaining support mask with some edge containing
/// it, subtract that edge's bundle, recurse. Collects every distinct edge
/// set that zeroes the residual.
fn component_search(
    residual: &mut BTreeMap<u32, f64>,
    comp_size: usize,
    d: usize,
    chosen: &mut Vec<u32>,
    solutions: &mut Vec<Vec<u32>>,
    budget: &mut usize,
) -> Result<(), ReconstructError> {
    if *budget == 0 {
        return Err(ReconstructError::Invalid(
            "search budget exhausted; polynomial is far from a cut-complement form".into(),
        ));
    }
    *budget -= 1;

    let Some(&target) = residual
        .keys()
        .max_by_key(|m| (m.count_ones(), **m))
    else {
        let mut sol = chosen.clone();
        sol.sort_unstable();
        solutions.push(sol);
        return Ok(());
    };
    let t = target.count_ones() as usize;
    if !t.is_multiple_of(2) || t > d {
        return Ok(()); // not coverable by any edge bundle
    }

    // Candidate edges: target plus up to d - t extra component vertices.
    let others: Vec<u32> = (0..comp_size as u32)
        .filter(|i| target >> i & 1 == 0)
        .collect();
    let extras = subsets_up_to(&others, d - t);

    for extra in extras {
        let edge = target | extra;
        let size = edge.count_ones() as usize;
        if size < 2 || size > d {
            continue;
        }
        if let Some(removed) = try_subtract(residual, edge) {
            chosen.push(edge);
            component_search(residual, comp_size, d, chosen, solutions, budget)?;
            chosen.pop();
            undo_subtract(residual, &removed);
        }
    }
    Ok(())
}

/// All subsets of `bits` with at most `max_size` members, as masks.
fn subsets_up_to(bits: &[u32], max_size: usize) -> Vec<u32> {
    fn rec(bits: &[u32], start: usize, left: usize, cur: u32, out: &mut Vec<u32>) {
        if left == 0 {
            return;
        }
        for i in start..bits.len() {
            let next = cur | 1u32 << bits[i];
            out.push(next);
            rec(bits, i + 1, left - 1, next, out);
        }
    }
    let mut out = vec![0u32];
    rec(bits, 0, max_size, 0, &mut out);
    out
}

/// Subtracts the bundle of `edge` (coefficient `2^(1-|e|)` on every even
/// submask) from the residual if it stays nonnegative; returns the applied
/// deltas for undo, or None if the subtraction would go negative.
fn try_subtract(residual: &mut BTreeMap<u32, f64>, edge: u32) -> Option<Vec<(u32, f64)>> {
    let size = edge.count_ones() as i32;
    let coeff = 0.5f64.powi(size - 1);
    // Walk even nonempty submasks of the edge.
    let mut submasks = Vec::new();
    let mut sub = edge;
    loop {
        if sub != 0 && sub.count_ones().is_multiple_of(2) {
            submasks.push(sub);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & edge;
    }
    for &m in &submasks {
        let have = residual.get(&m).copied().unwrap_or(0.0);
        if have < coeff - TOL {
            return None;
        }
    }
    let mut applied = Vec::with_capacity(submasks.len());
    for &m in &submasks {
        let have = residual.get(&m).copied().unwrap_or(0.0);
        let left = have - coeff;
        applied.push((m, coeff));
        if left.abs() <= TOL {
            residual.remove(&m);
        } else {
            residual.insert(m, left);
        }
    }
    Some(applied)
}

fn undo_subtract(residual: &mut BTreeMap<u32, f64>, applied: &[(u32, f64)]) {
    for &(m, coeff) in applied {
        *residual.entry(m).or_insert(0.0) += coeff;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::ParitySet;
    use crate::hypergraph::c_cut_polynomial;

    fn poly(n: usize, terms: &[(&[usize], f64)]) -> SparsePolynomial {
        SparsePolynomial::from_terms(
            n,
            terms
                .iter()
                .map(|(idx, c)| (ParitySet::from_indices(n, idx).unwrap(), *c)),
        )
        .unwrap()
    }

    #[test]
    fn inverts_single_pair() {
        let p = poly(4, &[(&[], 0.5), (&[0, 1], 0.5)]);
        let g = edges_from_polynomial(&p, 3).unwrap();
        assert_eq!(g, Hypergraph::from_edges(4, &[vec![0, 1]]).unwrap());
    }

    #[test]
    fn inverts_triangle_edge() {
        let p = poly(
            5,
            &[
                (&[], 0.25),
                (&[0, 1], 0.25),
                (&[0, 2], 0.25),
                (&[1, 2], 0.25),
            ],
        );
        let g = edges_from_polynomial(&p, 4).unwrap();
        assert_eq!(g, Hypergraph::from_edges(5, &[vec![0, 1, 2]]).unwrap());
    }

    #[test]
    fn inverts_nested_pair_and_triple() {
        // {{1,2}, {1,2,3}}: 0.75 + 0.75 chi12 + 0.25 chi13 + 0.25 chi23.
        let p = poly(
            6,
            &[
                (&[], 0.75),
                (&[0, 1], 0.75),
                (&[0, 2], 0.25),
                (&[1, 2], 0.25),
            ],
        );
        let g = edges_from_polynomial(&p, 3).unwrap();
        assert_eq!(
            g,
            Hypergraph::from_edges(6, &[vec![0, 1], vec![0, 1, 2]]).unwrap()
        );
    }

    #[test]
    fn empty_polynomial_is_empty_graph() {
        let p = SparsePolynomial::new(7);
        let g = edges_from_polynomial(&p, 4).unwrap();
        assert_eq!(g, Hypergraph::empty(7));
    }

    #[test]
    fn constant_mismatch_is_inconsistent() {
        // Right parity structure but wrong constant.
        let p = poly(4, &[(&[], 0.75), (&[0, 1], 0.5)]);
        assert!(matches!(
            edges_from_polynomial(&p, 3),
            Err(ReconstructError::NoConsistentHypergraph)
        ));
    }

    #[test]
    fn odd_support_is_inconsistent() {
        let p = poly(4, &[(&[], 0.5), (&[0, 1, 2], 0.5)]);
        assert!(matches!(
            edges_from_polynomial(&p, 4),
            Err(ReconstructError::NoConsistentHypergraph)
        ));
    }

    #[test]
    fn component_cap_enforced() {
        let g = Hypergraph::from_edges(8, &[vec![0, 1, 2, 3, 4]]).unwrap();
        let p = c_cut_polynomial(&g).unwrap();
        assert!(matches!(
            edges_from_polynomial_capped(&p, 5, 4),
            Err(ReconstructError::ComponentTooLarge { size: 5, cap: 4 })
        ));
    }

    #[test]
    fn round_trips_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut ambiguous = 0;
        for _ in 0..60 {
            let n = rng.random_range(4..=12usize);
            let s = rng.random_range(1..=4usize);
            let d = rng.random_range(2..=5usize);
            let mut edges = Vec::new();
            for _ in 0..s {
                let size = rng.random_range(2..=d.min(n));
                let mut verts: Vec<usize> = (0..n).collect();
                for i in 0..size {
                    let j = rng.random_range(i..n);
                    verts.swap(i, j);
                }
                let mut e = verts[..size].to_vec();
                e.sort_unstable();
                edges.push(e);
            }
            edges.sort();
            edges.dedup();
            let g = Hypergraph::from_edges(n, &edges).unwrap();
            let p = c_cut_polynomial(&g).unwrap();
            let d_call = d.max(g.d());
            match edges_from_polynomial(&p, d_call) {
                Ok(back) => assert_eq!(back, g, "edges {edges:?}"),
                // Distinct edge families can share an expansion. When that
                // happens the error must be genuine: the truth among >= 2
                // exhaustively-found matches.
                Err(ReconstructError::AmbiguousHypergraph) => {
                    let matches =
                        consistent_hypergraphs(&p, d_call, DEFAULT_COMPONENT_CAP, 8).unwrap();
                    assert!(matches.len() >= 2, "claimed ambiguity not substantiated");
                    assert!(matches.contains(&g), "truth missing from {matches:?}");
                    ambiguous += 1;
                }
                Err(e) => panic!("round trip failed for {edges:?}: {e}"),
            }
        }
        // Tangles dense enough to be ambiguous are the rare exception even
        // on these tiny vertex sets.
        assert!(ambiguous <= 6, "{ambiguous} of 60 trials ambiguous");
    }

    #[test]
    fn detects_genuinely_ambiguous_expansion() {
        // {014, 0234, 034, 13} and {0234, 134, 04, 013} expand identically.
        let a = Hypergraph::from_edges(
            5,
            &[vec![0, 1, 4], vec![0, 2, 3, 4], vec![0, 3, 4], vec![1, 3]],
        )
        .unwrap();
        let b = Hypergraph::from_edges(
            5,
            &[vec![0, 2, 3, 4], vec![1, 3, 4], vec![0, 4], vec![0, 1, 3]],
        )
        .unwrap();
        let pa = c_cut_polynomial(&a).unwrap();
        let pb = c_cut_polynomial(&b).unwrap();
        assert_eq!(pa, pb);
        assert!(matches!(
            edges_from_polynomial(&pa, 4),
            Err(ReconstructError::AmbiguousHypergraph)
        ));
        let matches = consistent_hypergraphs(&pa, 4, DEFAULT_COMPONENT_CAP, 8).unwrap();
        assert!(matches.contains(&a));
        assert!(matches.contains(&b));
    }
}
