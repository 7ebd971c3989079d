//! Experiment orchestration: results tables, split-sensitivity sweeps and the
//! Pinsker minimax experiment.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use agg_density_core::aggregation::{multi_kernel_pool, EstimatorPool};
use agg_density_core::kde::{fourier_mise_for, sobolev_functional};
use agg_density_core::kernels::pinsker_family;
use agg_density_core::risk::{nrd, nrd0, ucv_select, DensityEstimate, IseMethod, MiseReport};
use agg_density_core::{
    averaged_aggregate, bandwidth_grid, AggregateMode, DensityModel, InnerProductBackend, KdeEstimator, KernelSpec,
    MinimaxQuantities, SamplePoints, SeedProvenance, SplitScheme,
};
use serde::Serialize;

use crate::config::{EstimatorSpec, ExperimentConfig, MinimaxSpec, SweepSpec};
use crate::error::{BenchError, Result};
use crate::mc::{par_mise, par_oracle};
use crate::report::{emit_numeric_csv, emit_plot_data, emit_table, write_json, write_text, TableRow};

pub type BoxedEstimate = Box<dyn DensityEstimate>;
pub type Builder = Box<dyn Fn(&SamplePoints, SeedProvenance) -> agg_density_core::Result<BoxedEstimate> + Send + Sync>;

/// Estimator for a non-oracle roster entry.
pub fn estimator_builder(
    spec: &EstimatorSpec,
    kernel: &KernelSpec,
    grid: &[f64],
    scheme: SplitScheme,
    splits: usize,
) -> Option<Builder> {
    let kernel = kernel.clone();
    let grid = grid.to_vec();
    Some(match spec.clone() {
        EstimatorSpec::Oracle => return None,
        s @ (EstimatorSpec::AggPure | EstimatorSpec::AggLinear) => {
            let mode = s.aggregate_mode().expect("aggregate entry");
            let pool = EstimatorPool::single_kernel(kernel, &grid);
            Box::new(move |x: &SamplePoints, seed| {
                let agg = averaged_aggregate(x, &pool, scheme, splits, mode, InnerProductBackend::Auto, seed)?;
                Ok(Box::new(agg) as BoxedEstimate)
            })
        }
        EstimatorSpec::Ucv => Box::new(move |x: &SamplePoints, _| {
            let pts = Arc::new(x.clone());
            let h = ucv_select(&pts, &kernel, &grid, InnerProductBackend::Auto)?;
            Ok(Box::new(KdeEstimator::fit(pts, h, kernel.clone())?) as BoxedEstimate)
        }),
        EstimatorSpec::Nrd0 => Box::new(move |x: &SamplePoints, _| {
            Ok(Box::new(KdeEstimator::fit(x.clone(), nrd0(x)?, kernel.clone())?) as BoxedEstimate)
        }),
        EstimatorSpec::Nrd => Box::new(move |x: &SamplePoints, _| {
            Ok(Box::new(KdeEstimator::fit(x.clone(), nrd(x)?, kernel.clone())?) as BoxedEstimate)
        }),
        EstimatorSpec::Kde { h } => Box::new(move |x: &SamplePoints, _| {
            Ok(Box::new(KdeEstimator::fit(x.clone(), h, kernel.clone())?) as BoxedEstimate)
        }),
    })
}

/// Seed shared by every estimator at sample size `n`, so all roster entries see
/// the same samples.
pub fn cell_seed(master: u64, n: usize) -> SeedProvenance {
    SeedProvenance::from_master(master).child(n as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub estimator: String,
    pub n: usize,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellStatus {
    Ok {
        mise: f64,
        stderr: f64,
        replications: usize,
        seed: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        best_h: Option<f64>,
        wall_time_secs: Option<f64>,
        ises: Vec<f64>,
    },
    Failed {
        reason: String,
    },
}

impl Cell {
    fn from_report(estimator: String, r: &MiseReport, best_h: Option<f64>) -> Self {
        Cell {
            estimator,
            n: r.n,
            status: CellStatus::Ok {
                mise: r.mean,
                stderr: r.stderr,
                replications: r.replications,
                seed: r.seed,
                best_h,
                wall_time_secs: r.wall_time_secs,
                ises: r.ises.clone().unwrap_or_default(),
            },
        }
    }

    pub fn mise(&self) -> Option<(f64, f64)> {
        match self.status {
            CellStatus::Ok { mise, stderr, .. } => Some((mise, stderr)),
            CellStatus::Failed { .. } => None,
        }
    }
}

/// MISE as a function of the bandwidth at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCurve {
    pub n: usize,
    /// `(h, mise, stderr)`
    pub points: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub splits: usize,
    pub train_fraction: f64,
    pub mise: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaxRow {
    pub n: usize,
    pub h_star: f64,
    pub mise: f64,
    pub stderr: f64,
    /// Exact MISE from the Fourier representation.
    pub exact_mise: f64,
    /// `C* n^{-2β/(2β+1)}`
    pub bound: f64,
    pub ratio: f64,
    pub exact_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregate_mise: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregate_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregate_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaxReport {
    pub density: String,
    pub beta: f64,
    pub q: f64,
    /// Sobolev functional of the truth.
    pub q_truth: f64,
    pub c_star: f64,
    pub d_star: f64,
    pub replications: usize,
    pub seed: u64,
    pub rows: Vec<MinimaxRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Runtime {
    pub threads: usize,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub name: String,
    pub version: &'static str,
    pub fast: bool,
    pub config: serde_json::Value,
    pub cells: Vec<Cell>,
    pub oracle_curves: Vec<OracleCurve>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepCell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimax: Option<MinimaxReport>,
    pub runtime: Runtime,
}

impl BenchReport {
    pub fn all_ok(&self) -> bool {
        self.cells.iter().all(|c| c.mise().is_some())
    }

    pub fn cell(&self, estimator: &str, n: usize) -> Option<&Cell> {
        self.cells.iter().find(|c| c.estimator == estimator && c.n == n)
    }

    pub fn table_rows(&self) -> Vec<TableRow> {
        self.cells
            .iter()
            .filter_map(|c| match &c.status {
                CellStatus::Ok { mise, stderr, seed, .. } => {
                    Some(TableRow { estimator: c.estimator.clone(), n: c.n, mise: *mise, stderr: *stderr, seed: *seed })
                }
                CellStatus::Failed { .. } => None,
            })
            .collect()
    }
}

/// Runs every configured cell. Per-cell failures are recorded, not raised.
pub fn run_experiment(cfg: &ExperimentConfig, base: Option<&Path>) -> Result<BenchReport> {
    let start = Instant::now();
    let (truth, kernel) = cfg.validate(base)?;
    let r = cfg.effective_replications();
    let method = cfg.ise.method();
    let mut cells = Vec::new();
    let mut oracle_curves = Vec::new();
    for &n in &cfg.sample_sizes {
        let grid = cfg.grid.values(n, truth.dim())?;
        let seed = cell_seed(cfg.seed, n);
        for spec in &cfg.estimators {
            let label = spec.label();
            let outcome = match estimator_builder(spec, &kernel, &grid, cfg.split.scheme.scheme(), cfg.split.count) {
                None => par_oracle(&grid, &kernel, &truth, n, r, &method, seed).map(|o| {
                    oracle_curves.push(OracleCurve {
                        n,
                        points: o.curve.iter().map(|(h, m)| [*h, m.mean, m.stderr]).collect(),
                    });
                    Cell::from_report(label.clone(), &o.best, Some(o.best_h))
                }),
                Some(b) => par_mise(&label, &*b, &truth, n, r, &method, seed).map(|m| Cell::from_report(label.clone(), &m, None)),
            };
            cells.push(outcome.unwrap_or_else(|e| Cell { estimator: label, n, status: CellStatus::Failed { reason: e.to_string() } }));
        }
    }
    let sweep = match &cfg.split_sensitivity {
        Some(s) => Some(split_sensitivity(cfg, base, s)?),
        None => None,
    };
    let minimax = match &cfg.minimax {
        Some(m) => Some(minimax_experiment(&truth, m, &cfg.sample_sizes, r, cfg.seed)?),
        None => None,
    };
    Ok(BenchReport {
        name: cfg.name.clone(),
        version: env!("CARGO_PKG_VERSION"),
        fast: cfg.fast,
        config: cfg.resolved(&truth),
        cells,
        oracle_curves,
        sweep,
        minimax,
        runtime: Runtime { threads: rayon::current_num_threads(), wall_time_secs: start.elapsed().as_secs_f64() },
    })
}

/// Convex-aggregate MISE over (split count × training fraction), at the first
/// configured sample size, with common samples across cells.
pub fn split_sensitivity(cfg: &ExperimentConfig, base: Option<&Path>, sweep: &SweepSpec) -> Result<Vec<SweepCell>> {
    let (truth, kernel) = cfg.validate(base)?;
    let n = cfg.sample_sizes[0];
    let grid = cfg.grid.values(n, truth.dim())?;
    let r = cfg.effective_replications();
    let seed = cell_seed(cfg.seed, n);
    let method = cfg.ise.method();
    let mut out = Vec::new();
    for &count in &sweep.split_counts {
        for &f in &sweep.train_fractions {
            let b = estimator_builder(&EstimatorSpec::AggPure, &kernel, &grid, SplitScheme::TrainingFraction(f), count)
                .expect("aggregate builder");
            let m = par_mise("AggPure", &*b, &truth, n, r, &method, seed)?;
            out.push(SweepCell { splits: count, train_fraction: f, mise: m.mean, stderr: m.stderr });
        }
    }
    Ok(out)
}

/// Pinsker KDE at `h*(n)` (and optionally the aggregate over a Pinsker pool)
/// against `C* n^{-2β/(2β+1)}`.
pub fn minimax_experiment(
    truth: &DensityModel,
    spec: &MinimaxSpec,
    sample_sizes: &[usize],
    r: usize,
    master: u64,
) -> Result<MinimaxReport> {
    if truth.dim() != 1 {
        return Err(BenchError::Config("the minimax experiment is one-dimensional".into()));
    }
    let q_truth = sobolev_functional(truth, spec.beta)?;
    let q = spec.q.unwrap_or(q_truth);
    if q_truth > q * (1.0 + 1e-12) {
        return Err(BenchError::Config(format!(
            "Sobolev functional of '{}' is {q_truth}, above Q = {q}",
            truth.name()
        )));
    }
    let mq = MinimaxQuantities::new(spec.beta, q, 1)?;
    let kernel = KernelSpec::pinsker(spec.beta, 1)?;
    let method = IseMethod::Fourier;
    let mut rows = Vec::new();
    for &n in sample_sizes {
        let h = mq.optimal_bandwidth(n);
        let seed = cell_seed(master, n);
        let k = kernel.clone();
        let builder = move |x: &SamplePoints, _| KdeEstimator::fit(x.clone(), h, k.clone());
        let m = par_mise("Pinsker", &builder, truth, n, r, &method, seed)?;
        let exact = fourier_mise_for(&kernel, h, n, truth)?;
        let bound = mq.risk_bound(n);
        let mut row = MinimaxRow {
            n,
            h_star: h,
            mise: m.mean,
            stderr: m.stderr,
            exact_mise: exact,
            bound,
            ratio: m.mean / bound,
            exact_ratio: exact / bound,
            aggregate_mise: None,
            aggregate_stderr: None,
            aggregate_ratio: None,
        };
        if let Some(a) = spec.aggregate.as_ref().filter(|a| n <= a.max_n) {
            let pool = multi_kernel_pool(&pinsker_family(a.kernels, 1)?, bandwidth_grid(n, 1, a.a0)?.values())?;
            let builder = move |x: &SamplePoints, s| {
                averaged_aggregate(x, &pool, SplitScheme::Asymptotic, 1, AggregateMode::Convex, InnerProductBackend::Auto, s)
            };
            let am = par_mise("PinskerAgg", &builder, truth, n, a.replications, &method, seed.child(1))?;
            row.aggregate_mise = Some(am.mean);
            row.aggregate_stderr = Some(am.stderr);
            row.aggregate_ratio = Some(am.mean / bound);
        }
        rows.push(row);
    }
    Ok(MinimaxReport {
        density: truth.name().to_string(),
        beta: spec.beta,
        q,
        q_truth,
        c_star: mq.c_star,
        d_star: mq.d_star,
        replications: r,
        seed: master,
        rows,
    })
}

/// Writes `table.csv`, `plot_data.csv`, `report.json` and, when present,
/// `sweep.csv` and `minimax.csv` into `dir`.
pub fn write_outputs(report: &BenchReport, dir: &Path) -> Result<()> {
    write_text(&dir.join("table.csv"), &emit_table(&report.table_rows()))?;
    let plot: Vec<Vec<f64>> = report
        .oracle_curves
        .iter()
        .flat_map(|c| c.points.iter().map(move |p| vec![p[0], p[1], c.n as f64]))
        .collect();
    write_text(&dir.join("plot_data.csv"), &emit_plot_data(&plot))?;
    if let Some(s) = &report.sweep {
        let rows: Vec<Vec<f64>> = s.iter().map(|c| vec![c.splits as f64, c.train_fraction, c.mise, c.stderr]).collect();
        write_text(&dir.join("sweep.csv"), &emit_numeric_csv(&["splits", "train_fraction", "mise", "stderr"], &rows))?;
    }
    if let Some(m) = &report.minimax {
        write_text(&dir.join("minimax.csv"), &minimax_csv(m))?;
    }
    write_json(&dir.join("report.json"), report)
}

pub fn minimax_csv(m: &MinimaxReport) -> String {
    let rows: Vec<Vec<f64>> = m
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n as f64,
                r.h_star,
                r.mise,
                r.stderr,
                r.exact_mise,
                r.bound,
                r.ratio,
                r.exact_ratio,
                r.aggregate_mise.unwrap_or(f64::NAN),
                r.aggregate_ratio.unwrap_or(f64::NAN),
            ]
        })
        .collect();
    emit_numeric_csv(
        &["n", "h_star", "mise", "stderr", "exact_mise", "bound", "ratio", "exact_ratio", "aggregate_mise", "aggregate_ratio"],
        &rows,
    )
}
