//! Grid-mode sweep planner: a backward pass at maximum deceleration from
//! the goal, then a forward pass at maximum acceleration capped by it.

use crate::constraints::Constraints;
use crate::discretize::DiscretePath;
use crate::env::PhaseEnv;
use crate::error::{Error, Result};
use crate::grid::{action_range, reachable_sdot, GridState};
use crate::rl::terminal::TerminalPolyline;
use crate::trajectory::Trajectory;

/// Rows reached by always taking the highest feasible row the current
/// state's maximum acceleration can reach.
pub fn forward_pass(env: &PhaseEnv) -> Result<Vec<usize>> {
    let n = env.columns();
    if !env.feasible(GridState::new(0, 0)) {
        return Err(Error::DeadState { column: 0 });
    }
    let mut rows = vec![0usize; n];
    for k in 0..n - 1 {
        let state = GridState::new(k, rows[k]);
        let range = action_range(env.grid(), env.path(), env.constraints(), state).ok_or(Error::DeadState { column: k })?;
        rows[k + 1] = range
            .rows()
            .rev()
            .find(|&r| env.feasible(GridState::new(k + 1, r)))
            .ok_or(Error::DeadState { column: k + 1 })?;
    }
    Ok(rows)
}

/// Highest rows from which the sweep can still brake to the row found for
/// the next column, starting at rest on the last column.
pub fn backward_pass(env: &PhaseEnv) -> Result<Vec<usize>> {
    let n = env.columns();
    let grid = env.grid();
    let last = GridState::new(n - 1, 0);
    if !env.feasible(last) {
        return Err(Error::DeadState { column: n - 1 });
    }
    let mut rows = vec![0usize; n];
    for k in (0..n - 1).rev() {
        let cap = rows[k + 1];
        let next = env.path().point(k + 1);
        let sdot_next = grid.level(cap);
        let interval = env.constraints().accel_bounds(&next.co, &next.dq, &next.ddq, sdot_next);
        // Braking at the later point's s̈_min, run backwards.
        let guess = if interval.is_empty() || !interval.min.is_finite() {
            grid.m()
        } else {
            grid.snap_down(reachable_sdot(sdot_next, -interval.min, grid.ds(k)).sdot)?
        };
        let top = grid.max_row(k);
        let guess = guess.min(top);
        let valid = |r: usize| can_brake_to(env, GridState::new(k, r), cap);
        let mut r = (0..=guess)
            .rev()
            .chain(guess + 1..=top)
            .find(|&r| valid(r))
            .ok_or(Error::DeadState { column: k })?;
        while r < top && valid(r + 1) {
            r += 1;
        }
        rows[k] = r;
    }
    Ok(rows)
}

fn can_brake_to(env: &PhaseEnv, state: GridState, cap: usize) -> bool {
    env.actions(state).is_some_and(|a| a.min <= cap)
}

/// Forward sweep at maximum acceleration, capped by the backward profile.
/// Wherever the pointwise minimum of the two sweeps is itself reachable this
/// coincides with it; elsewhere it stays on reachable rows.
pub fn plan(env: &PhaseEnv) -> Result<Trajectory> {
    let backward = backward_pass(env)?;
    let n = env.columns();
    let mut rows = vec![0usize; n];
    for k in 0..n - 1 {
        let range = env.actions(GridState::new(k, rows[k])).ok_or(Error::DeadState { column: k })?;
        let top = range.max.min(backward[k + 1]);
        rows[k + 1] = (range.min..=top)
            .rev()
            .find(|&a| k + 2 == n || can_brake_to(env, GridState::new(k + 1, a), backward[k + 2]))
            .ok_or(Error::DeadState { column: k + 1 })?;
    }
    Trajectory::from_rows(env.grid(), env.path(), rows)
}

/// Verdicts of a prior trajectory against (usually stricter) constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorClassification {
    pub verdicts: Vec<bool>,
    pub terminal: TerminalPolyline,
}

impl PriorClassification {
    pub fn violation_count(&self) -> usize {
        self.verdicts.iter().filter(|v| **v).count()
    }
}

/// Marks each point of `traj` that violates `constraints` and takes the
/// longest clean suffix as the terminal polyline. When even the endpoint
/// violates, the terminal is the endpoint alone.
pub fn classify_prior(traj: &Trajectory, dp: &DiscretePath, constraints: &Constraints) -> PriorClassification {
    let verdicts = traj.violations(dp, constraints);
    let n = traj.len();
    let start = verdicts.iter().rposition(|v| *v).map_or(0, |i| i + 1).min(n - 1);
    let terminal = TerminalPolyline::from_trajectory(traj, start);
    PriorClassification { verdicts, terminal }
}
