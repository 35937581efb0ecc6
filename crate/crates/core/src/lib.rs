//! Simulation toolkit for turbo product codes whose cells hold `b` bits.
//!
//! The pipeline this crate models: a square product code built from a
//! Reed-Solomon (or binary) component code, transmitted with ASK/QAM symbols
//! over a channel with a correlated (Gauss-Markov) noise process, preprocessed
//! into per-cell probability vectors, and decoded iteratively with a
//! soft-output guess-ordered list decoder run on the rows and columns.
//! Alongside the decoder chain, [`inforate`] estimates the achievable
//! information rates of the mismatched (bitwise / symbolwise) and matched
//! (groupwise) preprocessing schemes by Monte Carlo integration.
//!
//! # Module map
//!
//! - [`gf`] — GF(2^b) arithmetic and the bit view of field elements
//! - [`codes`] — component codes and their binary parity-check images
//! - [`product`] — square product-code construction over b-bit cells
//! - [`channel`] — constellations, modulation, ISI and Gauss-Markov channels
//! - [`belief`] — groupwise/bitwise/symbolwise posteriors and cell beliefs
//! - [`sogrand`] — soft-output guess-ordered list decoding of one component word
//! - [`turbo`] — iterative row/column decoding in group or bit mode
//! - [`inforate`] — achievable-rate and endogenous-gap estimators
//!
//! Probability-domain code is generic over the scalar type through [`real::Real`]
//! (`f32` or `f64`); the `*64` aliases below pick `f64`, which is what the
//! command-line tool uses.

pub mod belief;
pub mod bits;
pub mod channel;
pub mod codes;
pub mod error;
pub mod gf;
pub mod inforate;
pub mod math;
pub mod product;
pub mod real;
pub mod rng;
pub mod sogrand;
pub mod turbo;

pub use error::Error;
pub use math::{log_sum_exp, normalize_log};
pub use num_complex::Complex;
pub use real::Real;

/// Per-cell belief over retained bit-group values, at f64.
pub type CellBelief64 = belief::CellBelief<f64>;
/// Group posterior over a window of symbols, at f64.
pub type GroupPosterior64 = belief::GroupPosterior<f64>;
/// Constellation at f64.
pub type Constellation64 = channel::Constellation<f64>;
/// Channel parameters at f64.
pub type ChannelParams64 = channel::ChannelParams<f64>;
/// Component-decoder soft output at f64.
pub type SoftOutput64 = sogrand::SoftOutput<f64>;
/// Component-decoder settings at f64.
pub type SisoParams64 = sogrand::SisoParams<f64>;
/// Iterative-decoder settings at f64.
pub type TurboParams64 = turbo::TurboParams<f64>;
/// Monte Carlo rate estimate at f64.
pub type RateEstimate64 = inforate::RateEstimate<f64>;
