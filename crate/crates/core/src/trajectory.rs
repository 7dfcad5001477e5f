//! Grid trajectories and their derived quantities.

use nalgebra::DVector;

use crate::constraints::Constraints;
use crate::discretize::DiscretePath;
use crate::dynamics::{parametric_torque, DynamicsModel};
use crate::error::{Error, Result};
use crate::grid::{implied_sddot, segment_time, PhaseGrid};
use crate::path::JointPath;

/// Relative tolerance when checking an executed `s̈` against its interval.
pub const SDDOT_TOL: f64 = 1e-9;

/// One row per column. `sddot[k]` is the constant pseudo-acceleration on
/// segment `k`; the last point holds still (`s̈ = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rows: Vec<usize>,
    pub s: Vec<f64>,
    pub sdot: Vec<f64>,
    pub sddot: Vec<f64>,
    pub dt: Vec<f64>,
    pub torques: Vec<DVector<f64>>,
    pub return_value: f64,
    pub exec_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Audit {
    /// Largest torque excess over all points (0 when within limits).
    pub max_torque_excess: f64,
    /// Largest `ṡ − bound` over all points (≤ 0 when within limits).
    pub max_velocity_excess: f64,
}

impl Audit {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_torque_excess <= tol && self.max_velocity_excess <= tol
    }
}

impl Trajectory {
    pub fn from_rows(grid: &PhaseGrid, dp: &DiscretePath, rows: Vec<usize>) -> Result<Self> {
        let n = grid.columns();
        if rows.len() != n || dp.len() != n {
            return Err(Error::Dimension {
                what: "trajectory rows",
                expected: n,
                got: rows.len(),
            });
        }
        if rows[0] != 0 || rows[n - 1] != 0 {
            return Err(Error::config("trajectory must start and end at rest"));
        }
        let s = dp.s_values();
        let sdot: Vec<f64> = rows.iter().map(|&r| grid.level(r)).collect();
        let mut sddot = Vec::with_capacity(n);
        let mut dt = Vec::with_capacity(n - 1);
        for k in 0..n - 1 {
            let ds = grid.ds(k);
            sddot.push(implied_sddot(sdot[k], sdot[k + 1], ds));
            dt.push(segment_time(sdot[k], sdot[k + 1], ds)?);
        }
        sddot.push(0.0);
        let torques = (0..n)
            .map(|k| parametric_torque(&dp.point(k).co, sdot[k], sddot[k]))
            .collect();
        Ok(Self {
            return_value: sdot.iter().sum(),
            exec_time: dt.iter().sum(),
            rows,
            s,
            sdot,
            sddot,
            dt,
            torques,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
    pub fn row_sum(&self) -> usize {
        self.rows.iter().sum()
    }

    /// Per-point verdict: `true` when the state is infeasible or the executed
    /// `s̈` lies outside that state's interval.
    pub fn violations(&self, dp: &DiscretePath, constraints: &Constraints) -> Vec<bool> {
        (0..self.len())
            .map(|k| {
                let p = dp.point(k);
                if !constraints.check_state(&p.co, &p.dq, &p.ddq, self.sdot[k]) {
                    return true;
                }
                let interval = constraints.accel_bounds(&p.co, &p.dq, &p.ddq, self.sdot[k]);
                let tol = SDDOT_TOL * self.sddot[k].abs().max(1.0);
                !interval.contains(self.sddot[k], tol)
            })
            .collect()
    }

    /// Pointwise torque and velocity check at every column.
    pub fn audit(&self, dp: &DiscretePath, constraints: &Constraints) -> Audit {
        let mut audit = Audit {
            max_torque_excess: 0.0,
            max_velocity_excess: f64::NEG_INFINITY,
        };
        for k in 0..self.len() {
            let p = dp.point(k);
            let excess = constraints.torque_excess(&p.co, &p.dq, self.sdot[k], self.sddot[k]);
            audit.max_torque_excess = audit.max_torque_excess.max(excess);
            let bound = constraints.velocity_bound(&p.dq);
            audit.max_velocity_excess = audit.max_velocity_excess.max(self.sdot[k] - bound);
        }
        audit
    }

    /// Worst torque excess between grid points. Each segment is resampled at
    /// `samples` interior points, holding its `s̈` and following
    /// `ṡ² = ṡ_k² + 2 s̈_k (s − s_k)`.
    pub fn inter_point_overshoot(
        &self,
        dp: &DiscretePath,
        model: &dyn DynamicsModel,
        path: &dyn JointPath,
        constraints: &Constraints,
        samples: usize,
    ) -> Result<f64> {
        let mut s_values = vec![0.0];
        let mut states = vec![(self.sdot[0], self.sddot[0])];
        for k in 0..self.len() - 1 {
            let (s0, ds) = (dp.s(k), dp.ds(k));
            for j in 1..=samples {
                let off = ds * j as f64 / (samples + 1) as f64;
                let sq = self.sdot[k] * self.sdot[k] + 2.0 * self.sddot[k] * off;
                s_values.push(s0 + off);
                states.push((sq.max(0.0).sqrt(), self.sddot[k]));
            }
            s_values.push(dp.s(k + 1));
            states.push((self.sdot[k + 1], self.sddot[k + 1]));
        }
        let fine = DiscretePath::from_s_values(model, path, &s_values)?;
        Ok(fine
            .points()
            .iter()
            .zip(&states)
            .map(|(p, &(sdot, sddot))| constraints.torque_excess(&p.co, &p.dq, sdot, sddot))
            .fold(0.0, f64::max))
    }
}
