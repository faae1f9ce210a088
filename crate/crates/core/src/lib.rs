//! Approximate equivalence checking of an ideal quantum circuit against a
//! noisy implementation.
//!
//! The distance measure is the Jamiolkowski fidelity between the ideal
//! unitary and the noisy super-operator, computed by contracting
//! miter-style tensor networks over a tensor-decision-diagram engine.
//! Two algorithms are provided: a per-Kraus-term trace loop with optional
//! early exit, and a doubled-circuit contraction that evaluates all terms
//! at once.

pub mod circuit;
pub mod dense;
pub mod error;
pub mod fidelity;
pub mod gates;
pub mod network;
pub mod noise;
pub mod oracle;
pub mod tdd;

pub use circuit::{gen_bv, gen_qft, insert_noise, parse_circuit, parse_noise_spec, Circuit};
pub use error::{Error, Result};
pub use fidelity::{
    check_equivalence, fidelity_collective, fidelity_individual, Algorithm, FidelityOptions,
    FidelityReport, Verdict,
};
pub use noise::{channel, ChannelKind, NoiseChannel};
