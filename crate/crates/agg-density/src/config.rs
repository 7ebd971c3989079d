//! JSON experiment configuration.

use std::fs;
use std::path::{Path, PathBuf};

use agg_density_core::aggregation::DEFAULT_RANK_TOL;
use agg_density_core::kde::bandwidth_grid;
use agg_density_core::risk::{QuadratureSpec, DEFAULT_ISE_NODES};
use agg_density_core::simplex_qp::{DEFAULT_KKT_TOL, DEFAULT_MAX_ITER};
use agg_density_core::{AggregateMode, DensityModel, KernelSpec, SplitScheme};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::io::resolve_density;

/// Replication count used by `--fast`.
pub const FAST_REPLICATIONS: usize = 50;
/// The six-bandwidth grid of the simulation study.
pub const PAPER7_GRID: [f64; 6] = [0.001, 0.005, 0.01, 0.05, 0.1, 0.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    /// Catalog id or fixture path.
    pub density: String,
    pub sample_sizes: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_kernel")]
    pub kernel: String,
    #[serde(default)]
    pub split: SplitSpec,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub ise: IseSpec,
    #[serde(default)]
    pub fast: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_sensitivity: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimax: Option<MinimaxSpec>,
}

fn default_name() -> String {
    "experiment".into()
}
fn default_replications() -> usize {
    200
}
fn default_estimators() -> Vec<EstimatorSpec> {
    vec![EstimatorSpec::AggPure, EstimatorSpec::Oracle]
}
fn default_kernel() -> String {
    "gaussian".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorSpec {
    /// Averaged convex aggregate over the bandwidth grid.
    AggPure,
    /// Averaged linear aggregate over the bandwidth grid.
    AggLinear,
    /// Best single bandwidth of the grid by MISE.
    Oracle,
    Ucv,
    Nrd0,
    Nrd,
    Kde { h: f64 },
}

impl EstimatorSpec {
    pub fn label(&self) -> String {
        match self {
            EstimatorSpec::AggPure => "AggPure".into(),
            EstimatorSpec::AggLinear => "AggLinear".into(),
            EstimatorSpec::Oracle => "Oracle".into(),
            EstimatorSpec::Ucv => "UCV".into(),
            EstimatorSpec::Nrd0 => "Nrd0".into(),
            EstimatorSpec::Nrd => "Nrd".into(),
            EstimatorSpec::Kde { h } => format!("KDE(h={h})"),
        }
    }

    pub fn aggregate_mode(&self) -> Option<AggregateMode> {
        match self {
            EstimatorSpec::AggPure => Some(AggregateMode::Convex),
            EstimatorSpec::AggLinear => Some(AggregateMode::Linear),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GridSpec {
    /// {0.001, 0.005, 0.01, 0.05, 0.1, 0.5}
    #[default]
    Paper7,
    /// Geometric grid from `(n log n)^{-1/d}` to 1 with ratio `1 + a0/log n`.
    Section5 { a0: f64 },
    Explicit(Vec<f64>),
}

impl GridSpec {
    pub fn values(&self, n: usize, dim: usize) -> Result<Vec<f64>> {
        match self {
            GridSpec::Paper7 => Ok(PAPER7_GRID.to_vec()),
            GridSpec::Section5 { a0 } => Ok(bandwidth_grid(n, dim, *a0)?.values().to_vec()),
            GridSpec::Explicit(v) => {
                if v.is_empty() || v.iter().any(|h| !(*h > 0.0)) {
                    return Err(BenchError::Config("explicit grid needs positive bandwidths".into()));
                }
                Ok(v.clone())
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "paper7" => Ok(GridSpec::Paper7),
            "section5" => Ok(GridSpec::Section5 { a0: 1.0 }),
            other => other
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| BenchError::Config(format!("grid '{other}': {e}"))))
                .collect::<Result<Vec<_>>>()
                .map(GridSpec::Explicit),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeSpec {
    Equal,
    Asymptotic,
    Fraction(f64),
}

impl SchemeSpec {
    pub fn scheme(self) -> SplitScheme {
        match self {
            SchemeSpec::Equal => SplitScheme::EqualHalves,
            SchemeSpec::Asymptotic => SplitScheme::Asymptotic,
            SchemeSpec::Fraction(f) => SplitScheme::TrainingFraction(f),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(SchemeSpec::Equal),
            "asymptotic" => Ok(SchemeSpec::Asymptotic),
            other => other
                .parse::<f64>()
                .map(SchemeSpec::Fraction)
                .map_err(|_| BenchError::Config(format!("unknown split scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub scheme: SchemeSpec,
    pub count: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { scheme: SchemeSpec::Equal, count: 10 }
    }
}

/// How each replication's ISE is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IseSpec {
    #[default]
    Auto,
    Exact,
    Fourier,
    Quadrature,
}

impl IseSpec {
    pub fn method(self) -> agg_density_core::risk::IseMethod {
        use agg_density_core::risk::IseMethod;
        match self {
            IseSpec::Auto => IseMethod::Auto,
            IseSpec::Exact => IseMethod::Exact,
            IseSpec::Fourier => IseMethod::Fourier,
            IseSpec::Quadrature => IseMethod::Quadrature(None),
        }
    }
}

/// MISE over a (split count × training fraction) matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub split_counts: Vec<usize>,
    pub train_fractions: Vec<f64>,
}

/// Pinsker-kernel risk against the minimax bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimaxSpec {
    pub beta: f64,
    /// Radius of the Sobolev ball; defaults to the truth's own functional.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregate: Option<MinimaxAggregateSpec>,
}

/// Aggregation over a Pinsker family and the geometric grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimaxAggregateSpec {
    pub kernels: usize,
    #[serde(default = "default_a0")]
    pub a0: f64,
    /// Only sample sizes up to this are aggregated.
    pub max_n: usize,
    pub replications: usize,
}

fn default_a0() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| BenchError::Json { path: path.to_path_buf(), source })
    }

    pub fn load(path: &Path) -> Result<(Self, Option<PathBuf>)> {
        let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Ok((Self::from_json(&text, path)?, path.parent().map(Path::to_path_buf)))
    }

    /// Replications after `--fast`.
    pub fn effective_replications(&self) -> usize {
        if self.fast {
            self.replications.min(FAST_REPLICATIONS)
        } else {
            self.replications
        }
    }

    /// Checks every reference before any computation.
    pub fn validate(&self, base: Option<&Path>) -> Result<(DensityModel, KernelSpec)> {
        let truth = resolve_density(&self.density, base)?;
        let kernel = KernelSpec::parse(&self.kernel, truth.dim())?;
        if self.effective_replications() < 2 {
            return Err(BenchError::Config("replications must be at least 2".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&n| n < 3) {
            return Err(BenchError::Config("sample sizes must be at least 3".into()));
        }
        if self.split.count == 0 {
            return Err(BenchError::Config("split count must be positive".into()));
        }
        if self.estimators.is_empty() && self.split_sensitivity.is_none() && self.minimax.is_none() {
            return Err(BenchError::Config("no estimators configured".into()));
        }
        for &n in &self.sample_sizes {
            self.grid.values(n, truth.dim())?;
            agg_density_core::split_sizes(n, self.split.scheme.scheme())?;
        }
        if let Some(s) = &self.split_sensitivity {
            if s.split_counts.is_empty() || s.train_fractions.is_empty() || s.split_counts.contains(&0) {
                return Err(BenchError::Config("sweep needs positive split counts and fractions".into()));
            }
            if s.train_fractions.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
                return Err(BenchError::Config("training fractions must lie in (0, 1)".into()));
            }
        }
        Ok((truth, kernel))
    }

    /// Config echo with every default made explicit.
    pub fn resolved(&self, truth: &DensityModel) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        let q = QuadratureSpec::for_truth(truth);
        let obj = v.as_object_mut().expect("object");
        obj.insert("effective_replications".into(), self.effective_replications().into());
        obj.insert(
            "grids".into(),
            self.sample_sizes
                .iter()
                .map(|&n| (n.to_string(), serde_json::json!(self.grid.values(n, truth.dim()).unwrap_or_default())))
                .collect::<serde_json::Map<_, _>>()
                .into(),
        );
        obj.insert(
            "numerics".into(),
            serde_json::json!({
                "rank_tol": DEFAULT_RANK_TOL,
                "qp_kkt_tol": DEFAULT_KKT_TOL,
                "qp_max_iter": DEFAULT_MAX_ITER,
                "quadrature_window": q.window,
                "quadrature_nodes": DEFAULT_ISE_NODES,
                "quadrature_rule": "trapezoid",
                "truth_breakpoints": q.breakpoints,
            }),
        );
        v
    }
}
