//! Library behind the `tpc` binary: experiment configuration and the
//! deterministic Monte-Carlo drivers. The integration suite uses this crate
//! directly to run the same experiments the command line exposes.

pub mod config;
pub mod experiments;
