use rand::Rng;

use super::agent::{greedy_action, iql_update, least_negative, reward, select_action, Selection};
use super::qtable::QTable;
use super::terminal::TerminalPolyline;
use super::{Algorithm, RLConfig};
use crate::env::PhaseEnv;
use crate::error::Result;
use crate::grid::GridState;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub state: GridState,
    pub action: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Reached or crossed the terminal polyline.
    Crossed,
    /// The step with this index was penalized.
    Violated { step: usize },
    /// No admissible action left.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub steps: Vec<Step>,
    pub outcome: Outcome,
    /// State reached by the last step.
    pub final_state: GridState,
    /// Sum of `ṡ` over every visited state, the final one included.
    pub return_value: f64,
}

impl EpisodeLog {
    pub fn succeeded(&self) -> bool {
        self.outcome == Outcome::Crossed
    }

    /// Recomputes the return from the visited states.
    pub fn recompute_return(&self, env: &PhaseEnv) -> f64 {
        self.steps.iter().map(|s| env.level(s.state.row)).sum::<f64>()
            + if self.steps.is_empty() {
                0.0
            } else {
                env.level(self.final_state.row)
            }
    }
}

enum StepResult {
    Continue(Option<f64>),
    Crossed,
    Violated,
}

/// Classifies the move `state → (col + 1, action)`.
fn judge(env: &PhaseEnv, q: &QTable, terminal: &TerminalPolyline, state: GridState, action: usize) -> StepResult {
    let next = GridState::new(state.col + 1, action);
    if terminal.crossed_by_step(state.col, state.row, action) {
        let joinable = match terminal.row_at(next.col) {
            Some(p) if p == action => true,
            Some(p) => env.actions(state).is_some_and(|r| r.contains(p)) && env.alive(GridState::new(next.col, p)),
            None => false,
        };
        return if joinable { StepResult::Crossed } else { StepResult::Violated };
    }
    if next.col == env.last_col() {
        return StepResult::Violated;
    }
    match env.actions(next) {
        None => StepResult::Violated,
        Some(range) if q.all_negative(next, range) => StepResult::Violated,
        Some(range) => StepResult::Continue(Some(q.max_over(next, range))),
    }
}

/// One exploration episode from `(0, 0)`. IQL updates are applied step by
/// step; the assignment update is left to the caller.
pub fn run_episode<R: Rng + ?Sized>(
    env: &PhaseEnv,
    q: &mut QTable,
    cfg: &RLConfig,
    algo: Algorithm,
    terminal: &TerminalPolyline,
    rng: &mut R,
) -> EpisodeLog {
    let mut state = GridState::new(0, 0);
    let mut steps = Vec::new();
    let mut ret = env.level(0);
    let outcome = loop {
        let Some(range) = env.actions(state) else {
            break Outcome::Exhausted;
        };
        let action = match select_action(q, state, range, cfg.epsilon, rng, algo) {
            Selection::Action(a) => a,
            // No earlier step can take the blame at the start state.
            Selection::AllNegative if steps.is_empty() => least_negative(q, state, range, rng),
            Selection::AllNegative => break Outcome::Exhausted,
        };
        q.mark_visited(state, action);
        let sdot = env.level(state.row);
        let sdot_next = env.level(action);
        ret += sdot_next;
        let (violated, next_max, done) = match judge(env, q, terminal, state, action) {
            StepResult::Continue(m) => (false, m, None),
            StepResult::Crossed => (false, None, Some(Outcome::Crossed)),
            StepResult::Violated => (true, None, Some(Outcome::Violated { step: steps.len() })),
        };
        let r = reward(sdot, sdot_next, violated, cfg.mu);
        if algo == Algorithm::Iql {
            iql_update(q, state, action, r, next_max, cfg);
        }
        steps.push(Step { state, action, reward: r });
        state = GridState::new(state.col + 1, action);
        if let Some(outcome) = done {
            break outcome;
        }
    };
    if steps.is_empty() {
        ret = 0.0;
    }
    EpisodeLog {
        steps,
        outcome,
        final_state: state,
        return_value: ret,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExploitResult {
    Success(Trajectory),
    /// Greedy rollout stopped at this column.
    Failure { column: usize },
}

impl ExploitResult {
    pub fn trajectory(&self) -> Option<&Trajectory> {
        match self {
            ExploitResult::Success(t) => Some(t),
            ExploitResult::Failure { .. } => None,
        }
    }
}

/// Fully greedy rollout. After crossing the terminal polyline the remaining
/// rows are taken from it.
pub fn exploit(env: &PhaseEnv, q: &QTable, terminal: &TerminalPolyline) -> Result<ExploitResult> {
    let mut state = GridState::new(0, 0);
    let mut rows = vec![0usize];
    loop {
        let Some(range) = env.actions(state) else {
            return Ok(ExploitResult::Failure { column: state.col });
        };
        let action = match greedy_action(q, state, range) {
            Selection::Action(a) => a,
            Selection::AllNegative if state.col == 0 => range
                .rows()
                .rev()
                .max_by(|a, b| q.get(state, *a).total_cmp(&q.get(state, *b)))
                .expect("action ranges are nonempty"),
            Selection::AllNegative => return Ok(ExploitResult::Failure { column: state.col }),
        };
        match judge(env, q, terminal, state, action) {
            StepResult::Continue(_) => {
                rows.push(action);
                state = GridState::new(state.col + 1, action);
            }
            StepResult::Crossed => {
                let from = state.col + 1 - terminal.start_col();
                rows.extend_from_slice(&terminal.rows()[from..]);
                let t = Trajectory::from_rows(env.grid(), env.path(), rows)?;
                return Ok(ExploitResult::Success(t));
            }
            StepResult::Violated => return Ok(ExploitResult::Failure { column: state.col + 1 }),
        }
    }
}
