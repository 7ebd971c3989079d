//! Parallel Monte-Carlo drivers. Replications are keyed by index and collected
//! in index order, so results do not depend on the number of threads.

use std::time::Instant;

use agg_density_core::risk::{self, DensityEstimate, IseMethod, MiseReport, OracleReport};
use agg_density_core::{DensityModel, KernelSpec, SamplePoints, SeedProvenance};
use rayon::prelude::*;

use crate::error::{BenchError, Result};

/// Environment variable that fixes the worker thread count.
pub const THREADS_ENV: &str = "AGG_DENSITY_THREADS";

pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|&n| n > 0)
}

/// Runs `f` on a pool with `threads` workers (rayon's default when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
    }
}

/// `f(0..r)` in parallel, results in index order.
pub fn par_replications<T, F>(r: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> agg_density_core::Result<T> + Sync,
{
    (0..r).into_par_iter().map(&f).collect::<agg_density_core::Result<Vec<T>>>().map_err(BenchError::from)
}

/// Parallel counterpart of [`risk::mise_mc`] with identical results.
pub fn par_mise<B, E>(
    label: &str,
    builder: &B,
    truth: &DensityModel,
    n: usize,
    r: usize,
    method: &IseMethod,
    seed: SeedProvenance,
) -> Result<MiseReport>
where
    B: Fn(&SamplePoints, SeedProvenance) -> agg_density_core::Result<E> + Sync + ?Sized,
    E: DensityEstimate,
{
    let start = Instant::now();
    let ises = par_replications(r, |rep| risk::replication_ise(builder, truth, n, method, seed, rep))?;
    let mut report = MiseReport::from_ises(label, truth.name(), n, seed.master, ises)?;
    report.wall_time_secs = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

/// Parallel counterpart of [`risk::oracle_risk`].
pub fn par_oracle(
    grid: &[f64],
    kernel: &KernelSpec,
    truth: &DensityModel,
    n: usize,
    r: usize,
    method: &IseMethod,
    seed: SeedProvenance,
) -> Result<OracleReport> {
    let start = Instant::now();
    let rows = par_replications(r, |rep| risk::oracle_replication(grid, kernel, truth, n, method, seed, rep))?;
    let mut report = OracleReport::from_replications(grid, kernel, truth, n, seed.master, &rows)?;
    report.best.wall_time_secs = Some(start.elapsed().as_secs_f64());
    Ok(report)
}
