//! Phase-plane lattice over `(s, ṡ)` and the uniformly-accelerated motion
//! rules that connect adjacent columns.

use crate::constraints::Constraints;
use crate::discretize::DiscretePath;
use crate::error::{Error, Result};

/// Relative tolerance used when a velocity lands on a grid level.
const LEVEL_TOL: f64 = 1e-9;

/// `N` columns (the discrete path) × `M + 1` velocity levels `0, h, …, Mh`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    s: Vec<f64>,
    h: f64,
    m: usize,
    col_bound: Vec<f64>,
    col_max_row: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridState {
    pub col: usize,
    pub row: usize,
}

impl GridState {
    pub fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

/// Inclusive row interval at the next column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowRange {
    pub min: usize,
    pub max: usize,
}

impl RowRange {
    pub fn contains(&self, row: usize) -> bool {
        self.min <= row && row <= self.max
    }
    pub fn len(&self) -> usize {
        self.max - self.min + 1
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn rows(&self) -> std::ops::RangeInclusive<usize> {
        self.min..=self.max
    }
}

pub fn build_grid(dp: &DiscretePath, constraints: &Constraints, m: usize) -> Result<PhaseGrid> {
    if m < 2 {
        return Err(Error::config("grid needs M ≥ 2 velocity divisions"));
    }
    let col_bound: Vec<f64> = dp.points().iter().map(|p| constraints.velocity_bound(&p.dq)).collect();
    let global = col_bound.iter().copied().filter(|b| b.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    if !(global > 0.0) || !global.is_finite() {
        return Err(Error::config(
            "maximum pseudo-velocity bound along the path must be finite and positive",
        ));
    }
    PhaseGrid::new(dp.s_values(), col_bound, global, m)
}

impl PhaseGrid {
    /// Grid with an explicit top level `top = M·h`.
    pub fn new(s: Vec<f64>, col_bound: Vec<f64>, top: f64, m: usize) -> Result<Self> {
        if s.len() != col_bound.len() || s.len() < 2 {
            return Err(Error::config("grid needs at least two columns with one bound each"));
        }
        if !(top > 0.0) || !top.is_finite() || m < 2 {
            return Err(Error::config("grid needs a finite positive top level and M ≥ 2"));
        }
        let h = top / m as f64;
        let mut grid = Self {
            s,
            h,
            m,
            col_bound,
            col_max_row: Vec::new(),
        };
        grid.col_max_row = grid
            .col_bound
            .iter()
            .map(|b| if b.is_finite() { grid.snap_value(*b) } else { m })
            .collect();
        Ok(grid)
    }

    pub fn columns(&self) -> usize {
        self.s.len()
    }
    /// Number of velocity divisions `M`; rows run `0..=M`.
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn rows(&self) -> usize {
        self.m + 1
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn s(&self, col: usize) -> f64 {
        self.s[col]
    }
    pub fn ds(&self, col: usize) -> f64 {
        self.s[col + 1] - self.s[col]
    }
    pub fn level(&self, row: usize) -> f64 {
        row as f64 * self.h
    }
    pub fn top(&self) -> f64 {
        self.level(self.m)
    }
    pub fn column_bound(&self, col: usize) -> f64 {
        self.col_bound[col]
    }
    /// Highest row at or below the column's velocity bound.
    pub fn max_row(&self, col: usize) -> usize {
        self.col_max_row[col]
    }

    fn snap_value(&self, sdot: f64) -> usize {
        let raw = (sdot / self.h).floor();
        if raw >= self.m as f64 {
            return self.m;
        }
        let mut row = raw.max(0.0) as usize;
        if row < self.m && self.level(row + 1) <= sdot + LEVEL_TOL * self.h.max(sdot) {
            row += 1;
        }
        row
    }

    /// Largest row whose level does not exceed `sdot`; clamps to `M`.
    pub fn snap_down(&self, sdot: f64) -> Result<usize> {
        if sdot < 0.0 || sdot.is_nan() {
            return Err(Error::NegativeVelocity(sdot));
        }
        Ok(self.snap_value(sdot))
    }

    /// Smallest row whose level is at least `sdot` (may exceed `M`).
    pub fn ceil_row(&self, sdot: f64) -> usize {
        if sdot <= 0.0 {
            return 0;
        }
        let raw = (sdot / self.h).ceil();
        if raw > (self.m + 1) as f64 {
            return self.m + 1;
        }
        let mut row = raw as usize;
        if row > 0 && self.level(row - 1) >= sdot - LEVEL_TOL * self.h.max(sdot) {
            row -= 1;
        }
        row
    }
}

/// `√(2 s̈ Δs + ṡ²)` with a negative radicand clamped to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reach {
    pub sdot: f64,
    pub clamped: bool,
}

pub fn reachable_sdot(sdot_k: f64, sddot: f64, ds: f64) -> Reach {
    let radicand = 2.0 * sddot * ds + sdot_k * sdot_k;
    if radicand < 0.0 {
        Reach { sdot: 0.0, clamped: true }
    } else {
        Reach {
            sdot: radicand.sqrt(),
            clamped: false,
        }
    }
}

/// Constant pseudo-acceleration linking two velocities over `ds`.
pub fn implied_sddot(sdot_k: f64, sdot_k1: f64, ds: f64) -> f64 {
    (sdot_k1 * sdot_k1 - sdot_k * sdot_k) / (2.0 * ds)
}

/// Traversal time of a uniformly accelerated segment.
pub fn segment_time(sdot_k: f64, sdot_k1: f64, ds: f64) -> Result<f64> {
    let sum = sdot_k + sdot_k1;
    if !(sum > 0.0) {
        return Err(Error::NonTraversable);
    }
    Ok(2.0 * ds / sum)
}

/// Rows at column `k + 1` reachable from `state` under the feasible `s̈`
/// interval, capped by the next column's velocity bound. `None` when the
/// interval is empty or the state cannot reach the next column.
pub fn action_range(grid: &PhaseGrid, dp: &DiscretePath, constraints: &Constraints, state: GridState) -> Option<RowRange> {
    let k = state.col;
    if k + 1 >= grid.columns() {
        return None;
    }
    let p = dp.point(k);
    let sdot = grid.level(state.row);
    if !constraints.check_state(&p.co, &p.dq, &p.ddq, sdot) {
        return None;
    }
    let interval = constraints.accel_bounds(&p.co, &p.dq, &p.ddq, sdot);
    let ds = grid.ds(k);
    let upper = reachable_sdot(sdot, interval.max, ds);
    if upper.clamped {
        // Cannot reach the next point even at maximum acceleration.
        return None;
    }
    let lower = reachable_sdot(sdot, interval.min, ds);
    let max = grid.snap_value(upper.sdot).min(grid.max_row(k + 1));
    let min = grid.ceil_row(lower.sdot);
    (min <= max).then_some(RowRange { min, max })
}
