//! Experiment configuration, read from JSON.

use std::path::{Path, PathBuf};

use lindyn_core::criteria::{CompactWindow, SegalContext};
use lindyn_core::funcspace::{Grid, GridFunction, GridSpec, Homeo, NormKind, PiecewiseMap, Weight};
use lindyn_core::measure::AtomicMeasure;
use lindyn_core::operator::CompositionOperator;
use lindyn_core::presets::preset;
use serde::Deserialize;

/// Problems in the configuration or command line; these exit with code 2.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] lindyn_core::Error),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OperatorRef {
    Preset(String),
    Inline(CompositionOperator),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpaceKind {
    L2,
    C0,
    Segal {
        tau: PiecewiseMap,
        #[serde(default = "half")]
        epsilon: f64,
        #[serde(default = "tail_tol")]
        tail_tol: f64,
        #[serde(default = "invariance_tol")]
        invariance_tol: f64,
    },
}

fn half() -> f64 {
    0.5
}
fn tail_tol() -> f64 {
    1e-9
}
fn invariance_tol() -> f64 {
    1e-12
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: f64,
    pub radius: f64,
    #[serde(default = "one")]
    pub height: f64,
}

fn one() -> f64 {
    1.0
}

impl BumpSpec {
    pub fn sample(&self, grid: Grid) -> GridFunction {
        GridFunction::bump(grid, self.center, self.radius, self.height)
    }
}

impl Default for BumpSpec {
    fn default() -> Self {
        BumpSpec {
            center: 0.0,
            radius: 1.0,
            height: 1.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitConfig {
    pub seed_fn: BumpSpec,
    pub targets: Vec<BumpSpec>,
    pub horizon: Option<u64>,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig {
            seed_fn: BumpSpec::default(),
            targets: Vec::new(),
            horizon: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Scene {
    Corollary,
    Theorem,
    Singleton,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PorosityConfig {
    pub scene: Scene,
    /// Largest `n` for the corollary check.
    pub horizon: u64,
    /// Number of random scenes for the theorem constructions.
    pub scenes: u64,
    pub lambda: f64,
    pub delta: f64,
    pub outer: usize,
    pub inner: usize,
}

impl Default for PorosityConfig {
    fn default() -> Self {
        PorosityConfig {
            scene: Scene::Corollary,
            horizon: 100,
            scenes: 1,
            lambda: 0.5,
            delta: 0.1,
            outer: 64,
            inner: 64,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdjointConfig {
    pub mu: AtomicMeasure,
    pub nu: AtomicMeasure,
    pub window: f64,
}

impl Default for AdjointConfig {
    fn default() -> Self {
        AdjointConfig {
            mu: AtomicMeasure::dirac(0.0),
            nu: AtomicMeasure::dirac(0.0),
            window: 1.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operator: Option<OperatorRef>,
    pub space: SpaceKind,
    pub grid: GridSpec,
    /// Half-width `m` of the window `K = [-m, m]`.
    pub window: f64,
    pub horizon: u64,
    pub tol: f64,
    /// Horizon and tolerance for the Cesàro and hypercyclic kinds, whose
    /// quantities decay like `1/n` at best.
    pub slow_horizon: u64,
    pub slow_tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub orbit: OrbitConfig,
    pub porosity: PorosityConfig,
    pub adjoint: AdjointConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            operator: None,
            space: SpaceKind::L2,
            grid: GridSpec {
                half_width: 64.0,
                step: 0.25,
            },
            window: 2.0,
            horizon: 200,
            tol: 1e-6,
            slow_horizon: 2000,
            slow_tol: 1e-2,
            seed: 0,
            out: None,
            orbit: OrbitConfig::default(),
            porosity: PorosityConfig::default(),
            adjoint: AdjointConfig::default(),
        }
    }
}

/// A checked configuration with its operator and grid built.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub operator: CompositionOperator,
    /// Preset id, or `"inline"`.
    pub operator_name: String,
    pub grid: Grid,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Builds the operator (`preset` overrides the config's), the grid, and
    /// checks the remaining fields.
    pub fn resolve(self, preset_override: Option<&str>, inverse: bool) -> Result<Experiment, ConfigError> {
        let reference = match preset_override {
            Some(id) => Some(OperatorRef::Preset(id.to_owned())),
            None => self.operator.clone(),
        };
        let (operator, name) = match reference {
            Some(OperatorRef::Preset(id)) => {
                let p = preset(&id).map_err(|_| ConfigError::Invalid(format!("unknown preset {id:?}")))?;
                (p.operator, id)
            }
            Some(OperatorRef::Inline(op)) => (op, "inline".to_owned()),
            None => (
                CompositionOperator::new(Homeo::translation(-1.0)?, Weight::constant(2.0))?,
                "doubling".to_owned(),
            ),
        };
        let operator = if inverse { operator.inverse() } else { operator };
        let grid = Grid::new(self.grid.half_width, self.grid.step)?;
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.window) || self.window > grid.half_width() {
            return Err(ConfigError::Invalid(format!(
                "window half-width {} must be positive and inside the grid",
                self.window
            )));
        }
        if self.horizon == 0 || self.slow_horizon == 0 {
            return Err(ConfigError::Invalid("horizons must be at least 1".into()));
        }
        if !positive(self.tol) || !positive(self.slow_tol) {
            return Err(ConfigError::Invalid("tolerances must be positive".into()));
        }
        if let SpaceKind::Segal { tau, invariance_tol, .. } = &self.space {
            let deviation = operator.segal_deviation(tau, &grid);
            if deviation > *invariance_tol {
                return Err(lindyn_core::Error::SegalIncompatible { deviation }.into());
            }
        }
        let p = &self.porosity;
        if !(p.lambda > 0.0 && p.lambda < 1.0) || !positive(p.delta) || p.outer == 0 || p.horizon == 0 {
            return Err(ConfigError::Invalid("porosity needs 0 < lambda < 1, delta > 0, outer >= 1, horizon >= 1".into()));
        }
        Ok(Experiment {
            config: self,
            operator,
            operator_name: name,
            grid,
        })
    }
}

impl Experiment {
    /// The norm measuring orbits in this space.
    pub fn norm_kind(&self) -> NormKind {
        match &self.config.space {
            SpaceKind::L2 => NormKind::L2,
            SpaceKind::C0 => NormKind::Sup,
            SpaceKind::Segal { tau, tail_tol, .. } => NormKind::segal(tau.clone(), *tail_tol),
        }
    }

    pub fn window(&self) -> Result<CompactWindow, ConfigError> {
        let w = CompactWindow::on_grid(self.config.window, &self.grid);
        Ok(match &self.config.space {
            SpaceKind::Segal {
                tau,
                epsilon,
                invariance_tol,
                ..
            } => w.with_segal(SegalContext {
                tau: tau.clone(),
                epsilon: *epsilon,
                invariance_tol: *invariance_tol,
                grid: self.grid,
            })?,
            _ => w,
        })
    }
}
