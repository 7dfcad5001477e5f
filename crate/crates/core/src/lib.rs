//! Time-optimal path tracking on a discretized phase plane.
//!
//! A joint-space path is discretized, projected onto the path parameter and
//! gridded in `(s, ṡ)`. Trajectories are then planned by a forward/backward
//! sweep (`nigm`), by tabular reinforcement learning (`rl`), or exactly by
//! dynamic programming on small grids (`oracle`).

// Negated comparisons double as NaN rejection in the input checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod constraints;
pub mod discretize;
pub mod dynamics;
pub mod env;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod io;
pub mod nigm;
pub mod oracle;
pub mod par;
pub mod path;
pub mod rl;
pub mod scenarios;
pub mod trajectory;

pub use constraints::{AccelInterval, ConstraintMode, Constraints, KinematicLimits, MotorCharacteristic, TorqueLimits};
pub use discretize::{discretize, DiscretePath, DiscretizeParams};
pub use dynamics::{DynamicsModel, ParamCoefficients, PlanarTwoLink, PointMass};
pub use env::PhaseEnv;
pub use error::{Error, Result};
pub use grid::{build_grid, GridState, PhaseGrid, RowRange};
pub use path::{JointPath, PolyPath};
pub use rl::{Algorithm, RLConfig};
pub use trajectory::Trajectory;
