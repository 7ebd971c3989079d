//! Benchmark harness, file formats and command line for aggregated density
//! estimation, built on `agg-density-core`.
//!
//! Experiments are described by JSON [`config::ExperimentConfig`] files and
//! produce a results table (`estimator,n,mise,stderr,seed`), plot data and a
//! self-describing JSON report. Monte-Carlo replications run on a rayon pool
//! and are reduced in replication order, so reports do not depend on the
//! number of threads.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod config;
mod error;
pub mod io;
pub mod mc;
pub mod report;

pub use agg_density_core as core;
pub use error::{BenchError, Result};
