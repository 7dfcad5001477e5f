//! TOML configuration: model, path, discretizer, grid, rl and experiment
//! sections. The model and path sections may hold the definition inline or
//! point at another file with `file = "..."`, resolved against the
//! directory of the file that references it.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constraints::{Constraints, KinematicLimits, MotorSpec, TorqueLimits};
use crate::discretize::DiscretizeParams;
use crate::dynamics::{DynamicsModel, GenericModel, GenericModelSpec, PlanarTwoLink, PointMass};
use crate::error::{Error, Result};
use crate::path::{BumpPath, JointPath, PolyPath, PolySegment};
use crate::rl::{Algorithm, RLConfig};
use crate::scenarios::Problem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DynamicsSpec {
    PointMass(PointMass),
    TwoLink(PlanarTwoLink),
    Generic(GenericModelSpec),
}

impl DynamicsSpec {
    pub fn build(&self) -> Result<Arc<dyn DynamicsModel>> {
        Ok(match self {
            DynamicsSpec::PointMass(m) => Arc::new(m.clone()),
            DynamicsSpec::TwoLink(m) => Arc::new(m.clone()),
            DynamicsSpec::Generic(spec) => Arc::new(GenericModel::from_spec(spec)?),
        })
    }
}

/// Dynamics plus the joint limits that go with the robot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub dynamics: DynamicsSpec,
    pub qdot_max: Vec<f64>,
    #[serde(default)]
    pub qddot_max: Option<Vec<f64>>,
    /// Constant symmetric torque limits. Exclusive with `motors`.
    #[serde(default)]
    pub torque_max: Option<Vec<f64>>,
    #[serde(default)]
    pub motors: Option<Vec<MotorSpec>>,
}

impl ModelSpec {
    pub fn constraints(&self) -> Result<Constraints> {
        let qddot = self
            .qddot_max
            .clone()
            .unwrap_or_else(|| vec![f64::INFINITY; self.qdot_max.len()]);
        let kinematic = KinematicLimits::symmetric(&self.qdot_max, &qddot)?;
        match (&self.torque_max, &self.motors) {
            (Some(tau), None) => Constraints::constant(kinematic, tau),
            (None, Some(motors)) => {
                let motors = motors.iter().map(MotorSpec::build).collect::<Result<Vec<_>>>()?;
                Constraints::new(kinematic, TorqueLimits::Motors(motors))
            }
            _ => Err(Error::config("model needs exactly one of torque_max or motors")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PathSpec {
    Line { from: Vec<f64>, to: Vec<f64> },
    Bump(BumpPath),
    Poly { segments: Vec<PolySegment> },
}

impl PathSpec {
    pub fn build(&self) -> Result<Arc<dyn JointPath>> {
        Ok(match self {
            PathSpec::Line { from, to } => Arc::new(PolyPath::line(from, to)?),
            PathSpec::Bump(b) => Arc::new(BumpPath::new(
                b.from.clone(),
                b.to.clone(),
                b.amplitude.clone(),
                b.center,
                b.width,
            )?),
            PathSpec::Poly { segments } => Arc::new(PolyPath::new(segments.clone())?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Velocity levels per grid; every experiment study runs each entry.
    pub m: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RlSection {
    pub iql: RLConfig,
    pub iavrl: RLConfig,
}

impl RlSection {
    pub fn for_algorithm(&self, algo: Algorithm) -> &RLConfig {
        match algo {
            Algorithm::Iql => &self.iql,
            Algorithm::Iavrl => &self.iavrl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub repetitions: usize,
    /// Overrides every algorithm's `rng_seed`.
    pub seed: u64,
    pub output_dir: PathBuf,
    pub algorithms: Vec<Algorithm>,
    pub study_a: bool,
    pub study_b: bool,
    pub study_c: bool,
    /// Grid used for the discretization comparison.
    pub study_a_m: usize,
    /// Interior resamples per segment for the overshoot metric.
    pub overshoot_samples: usize,
    /// Grids for the prior ablation; the `[grid]` list when absent.
    pub study_c_m: Option<Vec<usize>>,
    pub oracle: bool,
    /// Write measured wall-clock times to `timing.json`.
    pub record_timing: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            repetitions: 10,
            seed: 0,
            output_dir: PathBuf::from("out"),
            algorithms: vec![Algorithm::Iql, Algorithm::Iavrl],
            study_a: true,
            study_b: true,
            study_c: true,
            study_a_m: 400,
            overshoot_samples: 20,
            study_c_m: None,
            oracle: true,
            record_timing: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub path: PathSpec,
    pub discretizer: DiscretizeParams,
    pub grid: GridSection,
    pub rl: RlSection,
    pub experiment: ExperimentSection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: toml::Value,
    path: toml::Value,
    discretizer: DiscretizeParams,
    grid: GridSection,
    #[serde(default)]
    rl: RlSection,
    #[serde(default)]
    experiment: ExperimentSection,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T: DeserializeOwned>(text: &str, origin: &Path) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })
}

/// Inline table, or a `file` key naming a document with the same content.
fn section<T: DeserializeOwned>(value: toml::Value, base: &Path, origin: &Path) -> Result<T> {
    let file = value.get("file").and_then(|f| f.as_str()).map(|f| base.join(f));
    match file {
        Some(file) => {
            if value.as_table().is_some_and(|t| t.len() > 1) {
                return Err(Error::Parse {
                    path: origin.to_path_buf(),
                    message: "a section with `file` must not define anything else".into(),
                });
            }
            parse(&read(&file)?, &file)
        }
        None => value.try_into().map_err(|e: toml::de::Error| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        }),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, path)
    }

    /// Parses `text`; file references resolve against `base`.
    pub fn parse(text: &str, base: &Path, origin: &Path) -> Result<Self> {
        let raw: RawConfig = parse(text, origin)?;
        let cfg = Self {
            model: section(raw.model, base, origin)?,
            path: section(raw.path, base, origin)?,
            discretizer: raw.discretizer,
            grid: raw.grid,
            rl: raw.rl,
            experiment: raw.experiment,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.discretizer.validate()?;
        self.rl.iql.validate()?;
        self.rl.iavrl.validate()?;
        let e = &self.experiment;
        if e.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        if self.grid.m.is_empty() || self.grid.m.iter().any(|&m| m < 2) {
            return Err(Error::config("grid.m needs at least one entry, each ≥ 2"));
        }
        if e.study_a_m < 2 || e.study_c_m.as_ref().is_some_and(|v| v.iter().any(|&m| m < 2)) {
            return Err(Error::config("grid sizes must be ≥ 2"));
        }
        if e.algorithms.is_empty() {
            return Err(Error::config("experiment.algorithms must not be empty"));
        }
        let dof = self.model.qdot_max.len();
        let (model, path) = (self.model.dynamics.build()?, self.path.build()?);
        if model.dof() != dof || path.dof() != dof {
            return Err(Error::Dimension {
                what: "model, path and limits",
                expected: dof,
                got: if model.dof() != dof { model.dof() } else { path.dof() },
            });
        }
        self.model.constraints()?;
        Ok(())
    }

    pub fn problem(&self) -> Result<Problem> {
        Ok(Problem {
            model: self.model.dynamics.build()?,
            path: self.path.build()?,
            constraints: self.model.constraints()?,
            discretizer: self.discretizer,
        })
    }

    /// Per-algorithm settings with the experiment seed applied.
    pub fn rl_for(&self, algo: Algorithm) -> RLConfig {
        RLConfig {
            rng_seed: self.experiment.seed,
            ..*self.rl.for_algorithm(algo)
        }
    }

    pub fn study_c_grids(&self) -> &[usize] {
        self.experiment.study_c_m.as_deref().unwrap_or(&self.grid.m)
    }
}
