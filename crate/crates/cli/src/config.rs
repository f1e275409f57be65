use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use inls_core::dynamics::EvolutionConfig;
use inls_core::groundstate::{default_map, Method, SolverOpts};
use inls_core::model::{ModelParams, Sign};
use inls_core::radial::{GridMap, RadialGrid};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lambda {
    Focusing,
    Defocusing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub dim: u32,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    #[serde(default = "focusing")]
    pub lambda: Lambda,
}

fn focusing() -> Lambda {
    Lambda::Focusing
}

impl ModelBlock {
    pub fn params(&self) -> inls_core::Result<ModelParams> {
        let sign = match self.lambda {
            Lambda::Focusing => Sign::Focusing,
            Lambda::Defocusing => Sign::Defocusing,
        };
        ModelParams::new(self.dim, self.a, self.b, self.alpha, sign)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// Clustered at the origin when the nonlinear weight is singular there, uniform otherwise.
    Auto,
    Uniform,
    Clustered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridBlock {
    pub points: usize,
    pub r_max: f64,
    pub map: MapKind,
    pub kappa: f64,
    pub ell: f64,
}

impl Default for GridBlock {
    fn default() -> Self {
        let d = SolverOpts::default();
        GridBlock {
            points: d.points,
            r_max: d.r_max,
            map: MapKind::Auto,
            kappa: 200.0,
            ell: 0.5,
        }
    }
}

impl GridBlock {
    pub fn map_for(&self, params: &ModelParams) -> GridMap {
        match self.map {
            MapKind::Auto => default_map(params),
            MapKind::Uniform => GridMap::Uniform,
            MapKind::Clustered => GridMap::Clustered {
                kappa: self.kappa,
                ell: self.ell,
            },
        }
    }

    pub fn build(&self, params: &ModelParams) -> inls_core::Result<Arc<RadialGrid>> {
        Ok(Arc::new(RadialGrid::new(
            params.dim,
            self.points,
            self.r_max,
            self.map_for(params),
        )?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverBlock {
    pub method: Method,
    pub tol: f64,
    pub max_iter: Option<usize>,
    pub polish: bool,
    pub tau: f64,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let d = SolverOpts::default();
        SolverBlock {
            method: d.method,
            tol: d.tol,
            max_iter: d.max_iter,
            polish: d.polish,
            tau: d.tau,
        }
    }
}

impl SolverBlock {
    pub fn opts(&self, grid: &GridBlock, params: &ModelParams) -> SolverOpts {
        SolverOpts {
            method: self.method,
            tol: self.tol,
            max_iter: self.max_iter,
            points: grid.points,
            r_max: grid.r_max,
            map: Some(grid.map_for(params)),
            polish: self.polish,
            tau: self.tau,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `A exp(-r^2 / (2 w^2))`.
    Gaussian { amplitude: f64, width: f64 },
    /// `A r^{-rho} exp(-r^2 / (2 w^2))`, smooth in the regular variable.
    RegularGaussian { amplitude: f64, width: f64 },
    /// `c Q` on the ground-state grid.
    ScaledGroundState { scale: f64 },
    /// A field in the radial text format; its own grid is used.
    FromFile { path: PathBuf },
}

impl InitialData {
    pub fn amplitude(&self) -> Option<f64> {
        match self {
            InitialData::Gaussian { amplitude, .. }
            | InitialData::RegularGaussian { amplitude, .. } => Some(*amplitude),
            InitialData::ScaledGroundState { scale } => Some(*scale),
            InitialData::FromFile { .. } => None,
        }
    }

    pub fn with_amplitude(&self, value: f64) -> Option<InitialData> {
        Some(match self {
            InitialData::Gaussian { width, .. } => InitialData::Gaussian {
                amplitude: value,
                width: *width,
            },
            InitialData::RegularGaussian { width, .. } => InitialData::RegularGaussian {
                amplitude: value,
                width: *width,
            },
            InitialData::ScaledGroundState { .. } => {
                InitialData::ScaledGroundState { scale: value }
            }
            InitialData::FromFile { .. } => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairsBlock {
    /// Construction names; empty means every construction whose hypotheses hold.
    pub constructions: Vec<String>,
    pub theta: f64,
    pub eps: f64,
    pub max_halvings: u32,
}

impl Default for PairsBlock {
    fn default() -> Self {
        PairsBlock {
            constructions: Vec::new(),
            theta: 1e-3,
            eps: 1e-3,
            max_halvings: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyBlock {
    /// Also run the evolution and compare with the prediction.
    pub evolve: bool,
    /// Margin used for the intercritical coercivity gap, as a fraction of the distance to the
    /// mass-energy level.
    pub delta_fraction: f64,
}

impl Default for ClassifyBlock {
    fn default() -> Self {
        ClassifyBlock {
            evolve: true,
            delta_fraction: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepBlock {
    /// Axis name (`a`, `b`, `alpha`, `amplitude`) to values.
    pub axes: BTreeMap<String, Vec<f64>>,
    pub cap: usize,
    pub workers: Option<usize>,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock {
            axes: BTreeMap::new(),
            cap: 10_000,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    pub initial_data: Option<InitialData>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub pairs: PairsBlock,
    #[serde(default)]
    pub classify: ClassifyBlock,
    pub sweep: Option<SweepBlock>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.model.params().map_err(|e| format!("[model]: {e}"))?;
        cfg.evolution
            .validate()
            .map_err(|e| format!("[evolution]: {e}"))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        // relative data paths are taken from the config's directory
        let mut cfg = Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if let Some(InitialData::FromFile { path: p }) = &mut cfg.initial_data {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn params(&self) -> ModelParams {
        self.model.params().expect("validated on load")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[model]
dim = 3
a = 0.5
b = 0.5
alpha = 2.0
"#;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = RunConfig::parse(BASE).unwrap();
        assert_eq!(cfg.model.lambda, Lambda::Focusing);
        assert_eq!(cfg.grid.points, SolverOpts::default().points);
        assert_eq!(cfg.evolution, EvolutionConfig::default());
        assert!(cfg.initial_data.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let err =
            RunConfig::parse(&format!("{BASE}\n[grid]\npoints = 100\nrmax = 3.0\n")).unwrap_err();
        assert!(err.contains("rmax") && err.contains("line"), "{err}");
        let err = RunConfig::parse(&format!("{BASE}\n[evolution]\ndtt = 0.1\n")).unwrap_err();
        assert!(err.contains("dtt"), "{err}");
    }

    #[test]
    fn initial_data_variants() {
        let cfg = RunConfig::parse(&format!(
            "{BASE}\n[initial_data]\nkind = \"scaled_ground_state\"\nscale = 0.5\n"
        ))
        .unwrap();
        assert_eq!(
            cfg.initial_data,
            Some(InitialData::ScaledGroundState { scale: 0.5 })
        );
        let cfg = RunConfig::parse(&format!(
            "{BASE}\n[initial_data]\nkind = \"gaussian\"\namplitude = 2.0\nwidth = 1.0\n"
        ))
        .unwrap();
        assert_eq!(
            cfg.initial_data
                .unwrap()
                .with_amplitude(3.0)
                .unwrap()
                .amplitude(),
            Some(3.0)
        );
        assert!(RunConfig::parse(&format!(
            "{BASE}\n[initial_data]\nkind = \"gaussian\"\namplitude = 2.0\n"
        ))
        .is_err());
    }

    #[test]
    fn invalid_model_is_a_config_error() {
        let err =
            RunConfig::parse("[model]\ndim = 3\na = -1.0\nb = 0.5\nalpha = 2.0\n").unwrap_err();
        assert!(err.contains("[model]"), "{err}");
    }
}
