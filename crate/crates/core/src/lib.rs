//! Learning sparse real-valued polynomials over the Boolean hypercube `{-1,+1}^n`
//! from uniform random labeled samples, and sketching sparse hypergraphs from
//! random cut queries.
//!
//! The pipeline: collect the samples attaining the maximum observed value,
//! solve two affine systems over F2 to shortlist candidate parities, then run
//! a restricted L1-minimization program over that shortlist to recover the
//! coefficients. The hypergraph sketcher specializes the same idea to the
//! cut-complement function, whose Fourier expansion has dyadic coefficients
//! that can be snapped to an exact grid.

pub mod exec;
pub mod fourier;
pub mod gf2;
pub mod hypergraph;
pub mod ingest;
pub mod learn;
pub mod recovery;
pub mod sampling;

mod simplex;

pub use fourier::{InputPoint, LabeledSample, ParitySet, SignMatrix, SparsePolynomial};
pub use gf2::{BitMatrix, BitVector};
pub use hypergraph::Hypergraph;
pub use learn::{LearnConfig, LearnOutcome};
pub use recovery::{CandidateSet, DesignMatrix, RecoveryResult};
pub use sampling::{MaxWindow, NoiseSpec, SampleOracle};
