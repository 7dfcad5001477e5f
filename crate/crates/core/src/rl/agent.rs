use rand::Rng;

use super::episode::EpisodeLog;
use super::qtable::QTable;
use super::{Algorithm, RLConfig};
use crate::grid::{GridState, RowRange};
use crate::trajectory::Trajectory;

/// `ṡ_k + ṡ_{k+1}`, scaled by `−μ` on violation.
pub fn reward(sdot_k: f64, sdot_k1: f64, violated: bool, mu: f64) -> f64 {
    let sum = sdot_k + sdot_k1;
    if violated {
        -mu * sum
    } else {
        sum
    }
}

/// Writes the prior's transitions into `q`. Transition `k → k+1` takes the
/// verdict of its starting point.
pub fn seed_prior(q: &mut QTable, prior: &Trajectory, verdicts: &[bool], algo: Algorithm, cfg: &RLConfig) {
    let (pos, neg) = cfg.prior_scales(algo);
    for k in 0..prior.len() - 1 {
        let sum = prior.sdot[k] + prior.sdot[k + 1];
        let value = if verdicts[k] { -neg * sum } else { pos * sum };
        q.set(GridState::new(k, prior.rows[k]), prior.rows[k + 1], value);
    }
}

/// One temporal-difference step. `next_max` is the best value over the next
/// state's range, or `None` when the episode ends here.
pub fn iql_update(q: &mut QTable, state: GridState, action: usize, r: f64, next_max: Option<f64>, cfg: &RLConfig) -> f64 {
    let old = q.get(state, action);
    let target = r + cfg.gamma * next_max.unwrap_or(0.0);
    let value = old + cfg.alpha * (target - old);
    q.set(state, action, value);
    value
}

/// Assigns `Q(S_k, A_k) = R_{k+1} + ρ^{K−k} R_{K+1}` along the episode and
/// `Q(S_K, A_K) = R_{K+1}` at its last step.
pub fn iavrl_update(q: &mut QTable, log: &EpisodeLog, cfg: &RLConfig) {
    let Some(last) = log.steps.last() else {
        return;
    };
    let big_k = log.steps.len() - 1;
    let tail = last.reward;
    let mut discount = 1.0;
    for (k, step) in log.steps.iter().enumerate().rev() {
        let value = if k == big_k { tail } else { step.reward + discount * tail };
        q.set(step.state, step.action, value);
        discount *= cfg.rho;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Action(usize),
    /// Every action in the range has a negative value.
    AllNegative,
}

fn greedy_candidates(q: &QTable, state: GridState, range: RowRange) -> Vec<usize> {
    let mut best = f64::NEG_INFINITY;
    let mut out = Vec::new();
    for a in range.rows() {
        let v = q.get(state, a);
        if v < 0.0 {
            continue;
        }
        if v > best {
            best = v;
            out.clear();
        }
        if v == best {
            out.push(a);
        }
    }
    out
}

/// ε-greedy choice among actions with non-negative value. Greedy ties are
/// broken uniformly at random.
pub fn select_action<R: Rng + ?Sized>(
    q: &QTable,
    state: GridState,
    range: RowRange,
    epsilon: f64,
    rng: &mut R,
    algo: Algorithm,
) -> Selection {
    let explore = rng.random::<f64>() < epsilon;
    if explore {
        let pool: Vec<usize> = range
            .rows()
            .filter(|&a| q.get(state, a) >= 0.0 && (algo == Algorithm::Iql || !q.is_visited(state, a)))
            .collect();
        if !pool.is_empty() {
            return Selection::Action(pool[rng.random_range(0..pool.len())]);
        }
    }
    let best = greedy_candidates(q, state, range);
    match best.len() {
        0 => Selection::AllNegative,
        1 => Selection::Action(best[0]),
        n => Selection::Action(best[rng.random_range(0..n)]),
    }
}

/// Highest value over the whole range, negative ones included. Ties go to a
/// uniformly drawn row.
pub fn least_negative<R: Rng + ?Sized>(q: &QTable, state: GridState, range: RowRange, rng: &mut R) -> usize {
    let best = range.rows().map(|a| q.get(state, a)).fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = range.rows().filter(|&a| q.get(state, a) == best).collect();
    if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.random_range(0..ties.len())]
    }
}

/// Greedy choice with ties resolved toward the highest row.
pub fn greedy_action(q: &QTable, state: GridState, range: RowRange) -> Selection {
    match greedy_candidates(q, state, range).last() {
        Some(&a) => Selection::Action(a),
        None => Selection::AllNegative,
    }
}
