//! Forward-error-correction workbench for BCH codes.
//!
//! The crate implements Chase-2 and ORBGRAND soft-decision decoding of
//! BCH(255,239,2) on top of a table-based GF(2^8) bounded-distance core,
//! three input-distribution-aware (IDA) parallelism selectors (IDA, M-IDA,
//! MD-IDA) in single- and multi-threshold form, a seeded Monte-Carlo
//! trial engine with per-trial oracle records, and an offline threshold
//! tuner that sweeps selector thresholds against recorded trials without
//! re-decoding.
//!
//! Most capabilities have a runnable demo under `examples/`; the `fecw`
//! binary wires the same library calls into reproducible experiment runs.

pub mod bch;
pub mod chase;
pub mod config;
pub mod galois;
pub mod orbgrand;
pub mod policy;
pub mod report;
pub mod runner;
pub mod sim;
pub mod tuner;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
