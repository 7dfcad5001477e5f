//! Planning problems: a model, a path, its constraints and discretizer
//! settings. Two are built in.

use std::sync::Arc;

use crate::constraints::{ConstraintMode, Constraints, KinematicLimits, MotorCharacteristic, TorqueLimits};
use crate::discretize::{discretize, DiscretePath, DiscretizeParams};
use crate::dynamics::{DynamicsModel, PlanarTwoLink, PointMass};
use crate::env::PhaseEnv;
use crate::error::Result;
use crate::grid::build_grid;
use crate::path::{BumpPath, JointPath, PolyPath};

#[derive(Clone)]
pub struct Problem {
    pub model: Arc<dyn DynamicsModel>,
    pub path: Arc<dyn JointPath>,
    /// Full constraint set; velocity-dependent when motors are given.
    pub constraints: Constraints,
    pub discretizer: DiscretizeParams,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("dof", &self.model.dof())
            .field("constraints", &self.constraints)
            .field("discretizer", &self.discretizer)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn discretize(&self) -> Result<DiscretePath> {
        discretize(self.model.as_ref(), self.path.as_ref(), &self.discretizer)
    }

    pub fn uniform(&self, n: usize) -> Result<DiscretePath> {
        DiscretePath::uniform(self.model.as_ref(), self.path.as_ref(), n)
    }

    pub fn constraints_for(&self, mode: ConstraintMode) -> Constraints {
        self.constraints.for_mode(mode)
    }

    pub fn env(&self, dp: &DiscretePath, mode: ConstraintMode, m: usize) -> Result<PhaseEnv> {
        let constraints = self.constraints_for(mode);
        let grid = build_grid(dp, &constraints, m)?;
        Ok(PhaseEnv::new(grid, dp.clone(), constraints))
    }
}

/// Motor envelope with a flat region up to `knee` and a linear drop to
/// `tail_fraction` of the peak at `max_speed` (motor side).
pub fn knee_motor(peak: f64, knee: f64, max_speed: f64, tail_fraction: f64, gear: f64) -> Result<MotorCharacteristic> {
    MotorCharacteristic::new(
        vec![(0.0, peak), (knee, peak), (max_speed, peak * tail_fraction)],
        knee,
        gear,
    )
}

/// Vertical-plane two-link arm tracking a line with a localized bump, driven
/// by geared motors with a torque knee.
pub fn two_link() -> Problem {
    let model = PlanarTwoLink {
        link_lengths: [0.5, 0.4],
        link_masses: [4.0, 2.5],
        gravity: 9.81,
        viscous: [0.5, 0.3],
        coulomb: [0.2, 0.1],
    };
    let path = BumpPath::new(vec![-0.4, 1.2], vec![0.5, 0.3], vec![0.15, -0.25], 0.55, 0.12)
        .expect("built-in path is valid");
    let motors = vec![
        knee_motor(0.85, 60.0, 150.0, 0.4, 50.0).expect("built-in motor is valid"),
        knee_motor(0.425, 70.0, 175.0, 0.4, 50.0).expect("built-in motor is valid"),
    ];
    let kinematic = KinematicLimits::velocity_only(&[3.0, 3.5]).expect("built-in limits are valid");
    Problem {
        model: Arc::new(model),
        path: Arc::new(path),
        constraints: Constraints::new(kinematic, TorqueLimits::Motors(motors)).expect("built-in constraints are valid"),
        discretizer: DiscretizeParams {
            eps: 0.05,
            sigma: 1.0,
            ds_max: 0.04,
            candidates: 4001,
        },
    }
}

/// Unit point mass on a straight unit path with `|τ| ≤ 1` and `q̇ ≤ qdot_max`.
pub fn bang_bang(qdot_max: f64) -> Problem {
    let kinematic = KinematicLimits::velocity_only(&[qdot_max]).expect("positive speed limit");
    Problem {
        model: Arc::new(PointMass::unit()),
        path: Arc::new(PolyPath::line(&[0.0], &[1.0]).expect("line path is valid")),
        constraints: Constraints::constant(kinematic, &[1.0]).expect("unit torque limits are valid"),
        discretizer: DiscretizeParams {
            eps: 0.01,
            sigma: 0.1,
            ds_max: 0.005,
            candidates: 2001,
        },
    }
}
