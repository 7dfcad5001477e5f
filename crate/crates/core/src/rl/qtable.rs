use crate::grid::{GridState, RowRange};

#[derive(Debug, Clone, PartialEq)]
struct StateEntry {
    lo: usize,
    vals: Vec<f64>,
    visited: Vec<bool>,
}

impl StateEntry {
    fn covering(row: usize) -> Self {
        Self {
            lo: row,
            vals: vec![0.0],
            visited: vec![false],
        }
    }

    fn grow_to(&mut self, row: usize) {
        if row < self.lo {
            let extra = self.lo - row;
            self.vals.splice(0..0, std::iter::repeat_n(0.0, extra));
            self.visited.splice(0..0, std::iter::repeat_n(false, extra));
            self.lo = row;
        } else if row >= self.lo + self.vals.len() {
            let len = row - self.lo + 1;
            self.vals.resize(len, 0.0);
            self.visited.resize(len, false);
        }
    }

    fn get(&self, row: usize) -> Option<usize> {
        (row >= self.lo && row < self.lo + self.vals.len()).then(|| row - self.lo)
    }
}

/// Action values indexed by `(column, row, target row)`. Absent entries read
/// as 0. Each state also keeps the set of actions already tried.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    rows: usize,
    index: Vec<u32>,
    entries: Vec<StateEntry>,
}

const ABSENT: u32 = u32::MAX;

impl QTable {
    pub fn new(columns: usize, rows: usize) -> Self {
        Self {
            rows,
            index: vec![ABSENT; columns * rows],
            entries: Vec::new(),
        }
    }

    fn slot(&self, state: GridState) -> usize {
        state.col * self.rows + state.row
    }

    fn entry(&self, state: GridState) -> Option<&StateEntry> {
        match self.index[self.slot(state)] {
            ABSENT => None,
            i => Some(&self.entries[i as usize]),
        }
    }

    fn entry_mut(&mut self, state: GridState, row: usize) -> &mut StateEntry {
        let slot = self.slot(state);
        if self.index[slot] == ABSENT {
            self.index[slot] = self.entries.len() as u32;
            self.entries.push(StateEntry::covering(row));
        }
        let entry = &mut self.entries[self.index[slot] as usize];
        entry.grow_to(row);
        entry
    }

    pub fn get(&self, state: GridState, action: usize) -> f64 {
        self.entry(state)
            .and_then(|e| e.get(action).map(|i| e.vals[i]))
            .unwrap_or(0.0)
    }

    pub fn set(&mut self, state: GridState, action: usize, value: f64) {
        let e = self.entry_mut(state, action);
        let i = action - e.lo;
        e.vals[i] = value;
    }

    pub fn is_visited(&self, state: GridState, action: usize) -> bool {
        self.entry(state)
            .and_then(|e| e.get(action).map(|i| e.visited[i]))
            .unwrap_or(false)
    }

    pub fn mark_visited(&mut self, state: GridState, action: usize) {
        let e = self.entry_mut(state, action);
        let i = action - e.lo;
        e.visited[i] = true;
    }

    /// Largest value over `range` (0 for states never written).
    pub fn max_over(&self, state: GridState, range: RowRange) -> f64 {
        range.rows().map(|a| self.get(state, a)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when every action in `range` has a negative value.
    pub fn all_negative(&self, state: GridState, range: RowRange) -> bool {
        match self.entry(state) {
            None => false,
            Some(_) => range.rows().all(|a| self.get(state, a) < 0.0),
        }
    }

    /// Number of states with at least one stored value.
    pub fn stored_states(&self) -> usize {
        self.entries.len()
    }

    /// All stored `(state, action, value)` triples in index order.
    pub fn iter(&self) -> impl Iterator<Item = (GridState, usize, f64)> + '_ {
        self.index.iter().enumerate().filter(|(_, i)| **i != ABSENT).flat_map(move |(slot, i)| {
            let state = GridState::new(slot / self.rows, slot % self.rows);
            let e = &self.entries[*i as usize];
            e.vals.iter().enumerate().map(move |(j, v)| (state, e.lo + j, *v))
        })
    }
}
