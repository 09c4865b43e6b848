//! Property tests over the algebraic invariants: character multiplicativity,
//! the q bijection, GF(2) rank behavior, solution-set cardinality, the
//! separation predicates, and serialization round trips.

use proptest::prelude::*;

use boolsketch::fourier::{
    brute_force_wht, eval_parity, eval_table, has_unique_sign_property, is_general_position,
    is_mu_separated, q_inv, q_map, InputPoint, ParitySet, SignMatrix, SparsePolynomial,
};
use boolsketch::gf2::{self, BitMatrix, BitVector};

fn point_strategy(n: usize) -> impl Strategy<Value = InputPoint> {
    proptest::collection::vec(prop_oneof![Just(1.0), Just(-1.0)], n)
        .prop_map(|signs| InputPoint::from_signs(&signs).unwrap())
}

fn set_strategy(n: usize) -> impl Strategy<Value = ParitySet> {
    proptest::collection::vec(any::<bool>(), n).prop_map(|bits| {
        let idx: Vec<usize> = bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect();
        ParitySet::from_indices(bits.len(), &idx).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn characters_multiply((x, s, t) in (4usize..12).prop_flat_map(|n| {
        (point_strategy(n), set_strategy(n), set_strategy(n))
    })) {
        let lhs = eval_parity(&s, &x).unwrap() * eval_parity(&t, &x).unwrap();
        let rhs = eval_parity(&s.sym_diff(&t), &x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn q_round_trips(rows in (1usize..8, 1usize..10).prop_flat_map(|(m, n)| {
        proptest::collection::vec(point_strategy(n), m)
    })) {
        let n = rows[0].dim();
        let x = SignMatrix::from_points(n, rows).unwrap();
        prop_assert_eq!(q_inv(&q_map(&x)), x);
    }

    #[test]
    fn rank_invariant_under_row_ops(
        (rows, swap_a, swap_b, xor_a, xor_b) in (2usize..7, 2usize..10).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(
                    proptest::collection::vec(any::<bool>(), n),
                    m,
                ),
                0..m, 0..m, 0..m, 0..m,
            )
        })
    ) {
        let n = rows[0].len();
        let to_bv = |bits: &Vec<bool>| {
            let idx: Vec<usize> = bits.iter().enumerate().filter_map(|(i, &b)| b.then_some(i)).collect();
            BitVector::from_indices(n, &idx)
        };
        let base: Vec<BitVector> = rows.iter().map(to_bv).collect();
        let m0 = BitMatrix::from_rows(n, base.clone()).unwrap();

        let mut permuted = base.clone();
        permuted.swap(swap_a, swap_b);
        let m1 = BitMatrix::from_rows(n, permuted).unwrap();
        prop_assert_eq!(m0.rank(), m1.rank());

        if xor_a != xor_b {
            let mut xored = base.clone();
            let src = xored[xor_b].clone();
            xored[xor_a].xor_assign(&src);
            let m2 = BitMatrix::from_rows(n, xored).unwrap();
            prop_assert_eq!(m0.rank(), m2.rank());
        }
    }

    #[test]
    fn solution_count_is_zero_or_full_coset(
        (rows, rhs) in (1usize..6, 1usize..9).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), m),
                proptest::collection::vec(any::<bool>(), m),
            )
        })
    ) {
        let n = rows[0].len();
        let to_bv = |bits: &[bool]| {
            let idx: Vec<usize> = bits.iter().enumerate().filter_map(|(i, &b)| b.then_some(i)).collect();
            BitVector::from_indices(bits.len(), &idx)
        };
        let m = BitMatrix::from_rows(n, rows.iter().map(|r| to_bv(r)).collect()).unwrap();
        let b = to_bv(&rhs);
        let sols = gf2::solve_affine_all(&m, &b, 1 << n).unwrap();
        if !sols.is_empty() {
            prop_assert_eq!(sols.len(), 1usize << (n - m.rank()));
        }
        for p in &sols {
            prop_assert_eq!(&gf2::mat_vec(&m, p).unwrap(), &b);
        }
    }

    #[test]
    fn general_position_implies_separation(
        coeffs in proptest::collection::vec(-5.0f64..5.0, 1..6),
        mu_scale in 0.0f64..1.0,
    ) {
        let tol = 1e-9;
        if is_general_position(&coeffs, tol).unwrap() {
            prop_assert!(is_mu_separated(&coeffs, tol).unwrap());
        }
        // Monotone decreasing in mu.
        let lo = mu_scale;
        let hi = mu_scale + 0.5;
        if is_mu_separated(&coeffs, hi).unwrap() {
            prop_assert!(is_mu_separated(&coeffs, lo).unwrap());
        }
    }

    #[test]
    fn wht_round_trips(table in proptest::collection::vec(-8.0f64..8.0, 64)) {
        let poly = brute_force_wht(&table).unwrap();
        let back = eval_table(&poly).unwrap();
        for (a, b) in table.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn polynomial_json_round_trips(
        (n, picks) in (2usize..10).prop_flat_map(|n| {
            (Just(n), proptest::collection::btree_map(0usize..(1 << n), -4.0f64..4.0, 1..5))
        })
    ) {
        let terms: Vec<(ParitySet, f64)> = picks
            .into_iter()
            .filter(|(_, c)| c.abs() > 1e-6)
            .map(|(mask, c)| {
                let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                (ParitySet::from_indices(n, &idx).unwrap(), c)
            })
            .collect();
        prop_assume!(!terms.is_empty());
        let poly = SparsePolynomial::from_terms(n, terms).unwrap();
        let json = serde_json::to_string(&poly).unwrap();
        let back: SparsePolynomial = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, poly);
    }
}

// The three sufficient conditions each force the unique sign property on
// randomized small instances.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unique_sign_follows_from_the_three_conditions(
        (n, masks, raw) in (3usize..8).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::btree_set(1usize..(1 << n), 1..4),
                proptest::collection::vec(0.1f64..3.0, 4),
            )
        }),
        flip in proptest::collection::vec(any::<bool>(), 4),
    ) {
        let sets: Vec<ParitySet> = masks
            .iter()
            .map(|&mask| {
                let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                ParitySet::from_indices(n, &idx).unwrap()
            })
            .collect();
        let s = sets.len();

        // (c) all positive.
        let positive = SparsePolynomial::from_terms(
            n,
            sets.iter().cloned().zip(raw.iter().copied()),
        )
        .unwrap();
        prop_assert!(has_unique_sign_property(&positive).unwrap());

        // (a) signed but in general position.
        let signed: Vec<f64> = raw
            .iter()
            .zip(&flip)
            .map(|(&c, &f)| if f { -c } else { c })
            .take(s)
            .collect();
        if is_general_position(&signed, 1e-9).unwrap() {
            let general = SparsePolynomial::from_terms(
                n,
                sets.iter().cloned().zip(signed.iter().copied()),
            )
            .unwrap();
            prop_assert!(has_unique_sign_property(&general).unwrap());
        }

        // (b) independent parities, arbitrary signs.
        let vectors: Vec<BitVector> = sets.iter().map(|p| p.bits().clone()).collect();
        if gf2::linearly_independent(&vectors).unwrap() {
            let independent = SparsePolynomial::from_terms(
                n,
                sets.iter().cloned().zip(signed.iter().copied()),
            )
            .unwrap();
            prop_assert!(has_unique_sign_property(&independent).unwrap());
        }
    }
}
