//! Simulation library for a quantum memory built from a hybrid cluster state:
//! GKP qubits interspersed with momentum-squeezed vacuum modes on the
//! Raussendorf (RHG) lattice.
//!
//! The pipeline mirrors how such a memory is decoded in practice:
//!
//! 1. [`lattice`] builds the RHG cluster geometry, its six-body X stabilizers
//!    and an X correlation surface.
//! 2. [`noise`] assigns GKP / p-squeezed states to nodes, propagates the
//!    initial Gaussian noise through the CZ entangling pattern and samples
//!    momentum-homodyne outcomes.
//! 3. [`inner`] converts real-valued homodyne outcomes to qubit bits, either
//!    by plain binning or by a correlation-aware neighborhood decoder around
//!    isolated squeezed modes, and derives per-qubit error probabilities.
//! 4. [`outer`] runs the qubit-level decoder: decoding graph, Dijkstra
//!    shortest paths, minimum-weight perfect matching and recovery.
//! 5. [`experiment`] wires the steps into Monte Carlo memory trials,
//!    failure-rate estimates and threshold fits ([`fit`]).
//!
//! [`mux`] is a small standalone calculator for multiplexed heralded state
//! sources, and [`cli`] exposes everything as subcommands for scripted runs.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod inner;
pub mod lattice;
pub mod matching;
pub mod mux;
pub mod noise;
pub mod outer;
pub mod plot;
pub mod rng;

pub use error::Error;

/// Lattice spacing of the GKP grid in quadrature units.
pub const ROOT_PI: f64 = 1.772_453_850_905_516;

/// Convert a squeezing figure in dB to the noise variance parameter.
pub fn delta_from_db(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

/// Convert a noise variance parameter to its dB squeezing figure.
pub fn db_from_delta(delta: f64) -> f64 {
    -10.0 * delta.log10()
}
