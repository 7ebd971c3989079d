//! Sample text files and density fixture JSON.

use std::fs;
use std::path::Path;

use agg_density_core::densities::GaussianMixture;
use agg_density_core::{DensityModel, SamplePoints};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Parses a sample: one point per line, coordinates separated by whitespace
/// or commas. Blank lines and `#` comments are skipped.
pub fn parse_sample(text: &str, path: &Path) -> Result<SamplePoints> {
    let mut dim = None;
    let mut data = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| BenchError::Parse { path: path.to_path_buf(), line: k + 1, message };
        let coords = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|e| err(format!("'{s}': {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => return Err(err(format!("expected {d} coordinates, found {}", coords.len()))),
            _ => {}
        }
        data.extend(coords);
    }
    let dim = dim.ok_or_else(|| BenchError::Parse { path: path.to_path_buf(), line: 0, message: "no points".into() })?;
    Ok(SamplePoints::new(dim, data)?)
}

pub fn read_sample(path: &Path) -> Result<SamplePoints> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    parse_sample(&text, path)
}

/// One point per line, coordinates separated by a space, full precision.
pub fn format_sample(points: &SamplePoints) -> String {
    let mut out = String::with_capacity(points.n() * 24);
    for x in points.iter() {
        let row: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_sample(path: &Path, points: &SamplePoints) -> Result<()> {
    fs::write(path, format_sample(points)).map_err(|e| BenchError::io(path, e))
}

/// A ground-truth density described in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFixture {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    #[serde(flatten)]
    pub kind: FixtureKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixtureKind {
    UnivariateGaussianMixture { weights: Vec<f64>, means: Vec<f64>, sds: Vec<f64> },
    GaussianMixture { weights: Vec<f64>, means: Vec<Vec<f64>>, variances: Vec<Vec<f64>> },
    Exponential { rate: f64 },
    BlockOscillator { blocks: usize, gaussian_weight: f64 },
    Catalog { id: String },
}

impl DensityFixture {
    pub fn to_model(&self) -> Result<DensityModel> {
        use agg_density_core::densities::DensityKind;
        Ok(match &self.kind {
            FixtureKind::UnivariateGaussianMixture { weights, means, sds } => DensityModel::new(
                self.name.clone(),
                DensityKind::GaussianMixture(GaussianMixture::univariate(weights, means, sds)?),
            ),
            FixtureKind::GaussianMixture { weights, means, variances } => DensityModel::new(
                self.name.clone(),
                DensityKind::GaussianMixture(GaussianMixture::new(weights.clone(), means.clone(), variances.clone())?),
            ),
            FixtureKind::Exponential { rate } => {
                DensityModel::new(self.name.clone(), DensityModel::exponential(*rate)?.kind().clone())
            }
            FixtureKind::BlockOscillator { blocks, gaussian_weight } => {
                DensityModel::block_oscillator(self.name.clone(), *blocks, *gaussian_weight)?
            }
            FixtureKind::Catalog { id } => DensityModel::new(self.name.clone(), DensityModel::catalog(id)?.kind().clone()),
        })
    }
}

pub fn read_fixture(path: &Path) -> Result<DensityFixture> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| BenchError::Json { path: path.to_path_buf(), source })
}

/// A catalog id, or a path to a fixture when it ends in `.json` (relative
/// paths resolve against `base`).
pub fn resolve_density(spec: &str, base: Option<&Path>) -> Result<DensityModel> {
    if spec.ends_with(".json") {
        let p = Path::new(spec);
        let p = match base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p.to_path_buf(),
        };
        read_fixture(&p)?.to_model()
    } else {
        Ok(DensityModel::catalog(spec)?)
    }
}
