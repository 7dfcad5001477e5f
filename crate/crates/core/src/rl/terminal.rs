use crate::trajectory::Trajectory;

/// Clean tail of a prior trajectory. Reaching or crossing it ends an episode
/// successfully; the rest of the way follows the prior.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalPolyline {
    start_col: usize,
    rows: Vec<usize>,
    points: Vec<(f64, f64)>,
}

impl TerminalPolyline {
    /// Columns `start..` of `traj`.
    pub fn from_trajectory(traj: &Trajectory, start: usize) -> Self {
        let start = start.min(traj.len() - 1);
        Self {
            start_col: start,
            rows: traj.rows[start..].to_vec(),
            points: (start..traj.len()).map(|k| (traj.s[k], traj.sdot[k])).collect(),
        }
    }

    /// The goal `(1, 0)` alone, on a path with `columns` points.
    pub fn endpoint(columns: usize) -> Self {
        Self {
            start_col: columns - 1,
            rows: vec![0],
            points: vec![(1.0, 0.0)],
        }
    }

    pub fn start_col(&self) -> usize {
        self.start_col
    }
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }
    pub fn row_at(&self, col: usize) -> Option<usize> {
        col.checked_sub(self.start_col).and_then(|i| self.rows.get(i).copied())
    }

    /// Grid-step crossing test for a move from column `col` to `col + 1`.
    /// Contact at the starting point does not count: an episode stands on the
    /// polyline only at its initial state.
    pub fn crossed_by_step(&self, col: usize, row: usize, next_row: usize) -> bool {
        let Some(p1) = self.row_at(col + 1) else {
            return false;
        };
        let d1 = next_row as i64 - p1 as i64;
        if d1 == 0 {
            return true;
        }
        match self.row_at(col) {
            Some(p0) => {
                let d0 = row as i64 - p0 as i64;
                d0 != 0 && d0.signum() != d1.signum()
            }
            None => false,
        }
    }
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> bool {
    orient(a, b, p) == 0.0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

fn segments_intersect(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

/// Whether the phase-plane segment `prev → next` meets the polyline
/// (touching included) or `next` is one of its points.
pub fn crossed_terminal(prev: (f64, f64), next: (f64, f64), term: &TerminalPolyline) -> bool {
    let pts = term.points();
    if pts.contains(&next) {
        return true;
    }
    if pts.len() == 1 {
        return on_segment(prev, next, pts[0]);
    }
    pts.windows(2).any(|w| segments_intersect(prev, next, w[0], w[1]))
}
