#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use agg_density::bench::{minimax_csv, minimax_experiment, run_experiment, write_outputs};
use agg_density::config::{ExperimentConfig, GridSpec, MinimaxSpec, SchemeSpec};
use agg_density::io::{read_sample, resolve_density};
use agg_density::mc::{par_oracle, threads_from_env, with_threads};
use agg_density::report::{emit_numeric_csv, write_json, write_text};
use agg_density_core::aggregation::EstimatorPool;
use agg_density_core::risk::IseMethod;
use agg_density_core::{
    averaged_aggregate, bandwidth_grid, split_sizes, AggregateMode, InnerProductBackend, KernelSpec, SamplePoints,
    SeedProvenance,
};
use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "agg-density", version, about = "Aggregation of kernel density estimators under L2 risk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Cap replications at 50.
        #[arg(long)]
        fast: bool,
        /// Output directory (overrides the config's `out_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a split-averaged aggregate to a sample file and evaluate it on a grid.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "convex")]
        mode: Mode,
        #[arg(long, default_value_t = 10)]
        splits: usize,
        /// equal, asymptotic or a training fraction in (0, 1).
        #[arg(long, default_value = "equal")]
        scheme: String,
        /// paper7, section5 or comma-separated bandwidths.
        #[arg(long, default_value = "paper7")]
        grid: String,
        #[arg(long, default_value = "gaussian")]
        kernel: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Evaluation grid `lo:hi:count`; defaults to the sample range padded by 10%.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// CSV of (x, density); the weights go to the same path with a .json extension.
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-bandwidth MISE curve of single-bandwidth KDEs.
    Risk {
        #[arg(long, default_value = "gaussian")]
        density: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        replications: usize,
        #[arg(long, default_value = "paper7")]
        grid: String,
        #[arg(long, default_value = "gaussian")]
        kernel: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the geometric bandwidth grid and split sizes for a sample size.
    Grid {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        a0: f64,
    },
    /// Pinsker-kernel MISE at the optimal bandwidth against the minimax bound.
    Minimax {
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// Sobolev radius; defaults to the density's own functional.
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1000,10000")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        replications: usize,
        #[arg(long, default_value = "gaussian")]
        density: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Linear,
    Convex,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_threads(threads_from_env(), || run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Bench { config, fast, out } => {
            let (mut cfg, base) = ExperimentConfig::load(&config)?;
            cfg.fast |= fast;
            if fast {
                eprintln!("--fast: replications capped at {}", agg_density::config::FAST_REPLICATIONS);
            }
            let report = run_experiment(&cfg, base.as_deref())?;
            let dir = out.or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
            write_outputs(&report, &dir)?;
            print!("{}", agg_density::report::emit_table(&report.table_rows()));
            for c in report.cells.iter().filter(|c| c.mise().is_none()) {
                eprintln!("cell {} n={} failed: {:?}", c.estimator, c.n, c.status);
            }
            eprintln!("wrote {}", dir.display());
            Ok(report.all_ok())
        }
        Command::Estimate { input, mode, splits, scheme, grid, kernel, seed, at, out } => {
            let sample = read_sample(&input)?;
            let kernel = KernelSpec::parse(&kernel, sample.dim())?;
            let bandwidths = GridSpec::parse(&grid)?.values(sample.n(), sample.dim())?;
            let mode = match mode {
                Mode::Linear => AggregateMode::Linear,
                Mode::Convex => AggregateMode::Convex,
            };
            let pool = EstimatorPool::single_kernel(kernel, &bandwidths);
            let agg = averaged_aggregate(
                &sample,
                &pool,
                SchemeSpec::parse(&scheme)?.scheme(),
                splits,
                mode,
                InnerProductBackend::Auto,
                SeedProvenance::from_master(seed),
            )?;
            if sample.dim() != 1 {
                bail!("grid evaluation output is one-dimensional");
            }
            let xs = eval_grid(at.as_deref(), &sample)?;
            let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, agg.eval(&[x])]).collect();
            write_text(&out, &emit_numeric_csv(&["x", "density"], &rows))?;
            let sidecar = serde_json::json!({
                "input": input,
                "mode": mode.tag(),
                "kernel": pool.kernels[0].name(),
                "bandwidths": bandwidths,
                "seed": seed,
                "splits": agg.splits.iter().map(|s| serde_json::json!({
                    "id": s.id,
                    "train": s.split.train.len(),
                    "validation": s.split.validation.len(),
                    "weights": s.aggregate.weights.lambda,
                    "objective": s.aggregate.weights.objective,
                    "kkt_residual": s.aggregate.weights.kkt_residual,
                })).collect::<Vec<_>>(),
            });
            write_json(&out.with_extension("json"), &sidecar)?;
            Ok(true)
        }
        Command::Risk { density, n, replications, grid, kernel, seed, out } => {
            let truth = resolve_density(&density, None)?;
            let kernel = KernelSpec::parse(&kernel, truth.dim())?;
            let grid = GridSpec::parse(&grid)?.values(n, truth.dim())?;
            let o = par_oracle(&grid, &kernel, &truth, n, replications, &IseMethod::Auto, SeedProvenance::from_master(seed))?;
            let rows: Vec<Vec<f64>> = o.curve.iter().map(|(h, m)| vec![*h, m.mean, m.stderr]).collect();
            emit(&emit_numeric_csv(&["h", "mise", "stderr"], &rows), out.as_deref())?;
            Ok(true)
        }
        Command::Grid { n, dim, a0 } => {
            let g = bandwidth_grid(n, dim, a0)?;
            let (m_eq, l_eq) = split_sizes(n, agg_density_core::SplitScheme::EqualHalves)?;
            let (m_as, l_as) = split_sizes(n, agg_density_core::SplitScheme::Asymptotic)?;
            let v = serde_json::json!({
                "n": n, "dim": dim, "a0": a0, "h0": g.h0, "a_n": g.a_n, "size": g.len(), "values": g.values(),
                "split_equal": [m_eq, l_eq], "split_asymptotic": [m_as, l_as],
            });
            println!("{}", serde_json::to_string_pretty(&v)?);
            Ok(true)
        }
        Command::Minimax { beta, q, n, replications, density, seed, out } => {
            let truth = resolve_density(&density, None)?;
            let spec = MinimaxSpec { beta, q, aggregate: None };
            let m = minimax_experiment(&truth, &spec, &n, replications, seed)?;
            emit(&minimax_csv(&m), out.as_deref())?;
            Ok(true)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => write_text(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn eval_grid(spec: Option<&str>, sample: &SamplePoints) -> anyhow::Result<Vec<f64>> {
    let (lo, hi, count) = match spec {
        Some(s) => {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                bail!("--at expects lo:hi:count, got '{s}'");
            }
            (parts[0].parse()?, parts[1].parse()?, parts[2].parse().context("grid count")?)
        }
        None => {
            let xs = sample.as_slice();
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let pad = 0.1 * (hi - lo).max(1e-3);
            (lo - pad, hi + pad, 512usize)
        }
    };
    if count < 2 || !(hi > lo) {
        bail!("evaluation grid needs lo < hi and at least two points");
    }
    Ok((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect())
}
