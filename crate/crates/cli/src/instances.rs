//! Seeded planted-instance generators shared by `gen`, `bench`, and the
//! test suites. The three coefficient families mirror the learner's three
//! sufficient conditions: perturbed coefficients, independent parities, and
//! all-positive coefficients.

use rand::SeedableRng;
use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha8Rng;

use boolsketch::fourier::{ParitySet, SparsePolynomial};
use boolsketch::gf2::{linearly_independent, BitVector};
use boolsketch::hypergraph::Hypergraph;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientFamily {
    /// Integer bases plus a small Gaussian perturbation; in general position
    /// almost surely.
    GeneralPosition,
    /// Arbitrary nonzero integer coefficients on linearly independent
    /// parities.
    IndependentParities,
    /// All-positive coefficients on arbitrary distinct parities.
    Positive,
}

impl std::str::FromStr for CoefficientFamily {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "general" | "perturbed" => Ok(CoefficientFamily::GeneralPosition),
            "independent" => Ok(CoefficientFamily::IndependentParities),
            "positive" => Ok(CoefficientFamily::Positive),
            other => Err(CliError::Usage(format!(
                "unknown condition {other:?} (expected general, independent, or positive)"
            ))),
        }
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn range(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n.max(1) as u64) as usize
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; clamp the log argument away from zero.
    let u1 = unit(rng).max(1e-300);
    let u2 = unit(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn random_parity(rng: &mut ChaCha8Rng, n: usize) -> ParitySet {
    ParitySet::from_bits(BitVector::from_word_fn(n, || rng.next_u64()))
}

/// A planted `s`-sparse polynomial over `{-1,+1}^n` in the given family.
pub fn gen_polynomial(
    n: usize,
    s: usize,
    family: CoefficientFamily,
    rng: &mut ChaCha8Rng,
) -> SparsePolynomial {
    assert!(s >= 1 && n >= 1);
    let parities: Vec<ParitySet> = loop {
        let mut draw: Vec<ParitySet> = (0..s).map(|_| random_parity(rng, n)).collect();
        draw.sort();
        draw.dedup();
        if draw.len() < s {
            continue;
        }
        if family == CoefficientFamily::IndependentParities {
            let vs: Vec<BitVector> = draw.iter().map(|p| p.bits().clone()).collect();
            if !linearly_independent(&vs).unwrap() {
                continue;
            }
        }
        break draw;
    };

    let coeffs: Vec<f64> = (0..s)
        .map(|_| match family {
            CoefficientFamily::GeneralPosition => {
                let base = (1 + range(rng, 3)) as f64;
                let sign = if unit(rng) < 0.5 { -1.0 } else { 1.0 };
                sign * base + 0.3 * gaussian(rng)
            }
            CoefficientFamily::IndependentParities => {
                let base = (1 + range(rng, 3)) as f64;
                let sign = if unit(rng) < 0.5 { -1.0 } else { 1.0 };
                sign * base
            }
            CoefficientFamily::Positive => 0.5 + 2.5 * unit(rng),
        })
        .map(|c| if c == 0.0 { 0.5 } else { c })
        .collect();

    SparsePolynomial::from_terms(n, parities.into_iter().zip(coeffs)).unwrap()
}

/// A random singleton-free hypergraph with exactly `s` distinct edges of
/// sizes in `2..=d`.
pub fn gen_hypergraph(n: usize, s: usize, d: usize, rng: &mut ChaCha8Rng) -> Hypergraph {
    assert!(n >= 2 && d >= 2 && d <= n);
    loop {
        let mut edges: Vec<Vec<usize>> = Vec::with_capacity(s);
        for _ in 0..s {
            let size = 2 + range(rng, d - 1);
            let mut pool: Vec<usize> = (0..n).collect();
            for i in 0..size {
                let j = i + range(rng, n - i);
                pool.swap(i, j);
            }
            let mut e = pool[..size].to_vec();
            e.sort_unstable();
            edges.push(e);
        }
        edges.sort();
        edges.dedup();
        if edges.len() == s {
            return Hypergraph::from_edges(n, &edges).unwrap();
        }
    }
}

/// Convenience: a fresh ChaCha8 stream for an instance.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
