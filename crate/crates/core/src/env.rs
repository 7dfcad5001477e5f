//! Precomputed phase-plane environment shared by the planners.
//!
//! On top of the raw action range two traversal rules apply: a state at rest
//! may not stay at rest (the segment would take forever), and the last column
//! only admits row 0.

use crate::constraints::Constraints;
use crate::discretize::DiscretePath;
use crate::grid::{action_range, GridState, PhaseGrid, RowRange};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
struct StateInfo {
    feasible: bool,
    actions: Option<RowRange>,
}

#[derive(Debug, Clone)]
pub struct PhaseEnv {
    grid: PhaseGrid,
    dp: DiscretePath,
    constraints: Constraints,
    table: Vec<StateInfo>,
}

/// Action range at `state` after the traversal rules.
pub fn traversable_range(grid: &PhaseGrid, dp: &DiscretePath, constraints: &Constraints, state: GridState) -> Option<RowRange> {
    let mut range = action_range(grid, dp, constraints, state)?;
    if state.row == 0 {
        range.min = range.min.max(1);
    }
    if state.col + 2 == grid.columns() {
        range.max = 0;
    }
    (range.min <= range.max).then_some(range)
}

impl PhaseEnv {
    pub fn new(grid: PhaseGrid, dp: DiscretePath, constraints: Constraints) -> Self {
        let rows = grid.rows();
        let columns = par::map_range(grid.columns(), |col| {
            let p = dp.point(col);
            (0..rows)
                .map(|row| {
                    let state = GridState::new(col, row);
                    let feasible = row <= grid.max_row(col)
                        && constraints.check_state(&p.co, &p.dq, &p.ddq, grid.level(row));
                    let actions = if feasible {
                        traversable_range(&grid, &dp, &constraints, state)
                    } else {
                        None
                    };
                    StateInfo { feasible, actions }
                })
                .collect::<Vec<_>>()
        });
        let table = columns.into_iter().flatten().collect();
        Self {
            grid,
            dp,
            constraints,
            table,
        }
    }

    fn info(&self, state: GridState) -> &StateInfo {
        &self.table[state.col * self.grid.rows() + state.row]
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }
    pub fn path(&self) -> &DiscretePath {
        &self.dp
    }
    pub fn constraints(&self) -> &Constraints {
        &self.constraints
    }
    pub fn columns(&self) -> usize {
        self.grid.columns()
    }
    pub fn rows(&self) -> usize {
        self.grid.rows()
    }
    pub fn last_col(&self) -> usize {
        self.grid.columns() - 1
    }
    pub fn level(&self, row: usize) -> f64 {
        self.grid.level(row)
    }
    pub fn state_count(&self) -> usize {
        self.table.len()
    }

    /// Velocity bound respected and the `s̈` interval nonempty.
    pub fn feasible(&self, state: GridState) -> bool {
        self.info(state).feasible
    }

    pub fn actions(&self, state: GridState) -> Option<RowRange> {
        self.info(state).actions
    }

    /// A state from which the episode can continue (or the goal itself).
    pub fn alive(&self, state: GridState) -> bool {
        if state.col == self.last_col() {
            state.row == 0 && self.feasible(state)
        } else {
            self.actions(state).is_some()
        }
    }
}
