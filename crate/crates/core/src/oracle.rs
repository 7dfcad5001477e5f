//! Exact maximizer of `Σ ṡ_k` over all grid trajectories, by backward value
//! iteration over columns. Used to verify the planners on small instances.

use crate::env::PhaseEnv;
use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::trajectory::Trajectory;

/// Largest `N·M` the oracle accepts.
pub const ORACLE_CAP: usize = 100_000;

pub fn dp_oracle(env: &PhaseEnv) -> Result<Trajectory> {
    let n = env.columns();
    let rows = env.rows();
    let states = n * (rows - 1);
    if states > ORACLE_CAP {
        return Err(Error::OracleCap { states, cap: ORACLE_CAP });
    }
    // Value in integer row units keeps comparisons exact.
    let mut value = vec![None::<u64>; n * rows];
    let mut choice = vec![0usize; n * rows];
    value[(n - 1) * rows] = env.feasible(GridState::new(n - 1, 0)).then_some(0);
    for k in (0..n - 1).rev() {
        for r in 0..rows {
            let Some(range) = env.actions(GridState::new(k, r)) else {
                continue;
            };
            let mut best: Option<(u64, usize)> = None;
            for a in range.rows() {
                if let Some(v) = value[(k + 1) * rows + a] {
                    if best.is_none_or(|(bv, _)| v >= bv) {
                        best = Some((v, a));
                    }
                }
            }
            if let Some((v, a)) = best {
                value[k * rows + r] = Some(v + r as u64);
                choice[k * rows + r] = a;
            }
        }
    }
    if value[0].is_none() {
        return Err(Error::Infeasible);
    }
    let mut path = vec![0usize];
    for k in 0..n - 1 {
        let r = *path.last().unwrap();
        path.push(choice[k * rows + r]);
    }
    Trajectory::from_rows(env.grid(), env.path(), path)
}
