use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::agent::{iavrl_update, seed_prior};
use super::episode::{exploit, run_episode, ExploitResult};
use super::qtable::QTable;
use super::terminal::TerminalPolyline;
use super::{Algorithm, RLConfig};
use crate::env::PhaseEnv;
use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::nigm::PriorClassification;
use crate::trajectory::Trajectory;

/// Prior trajectory with its verdicts under the training constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    pub trajectory: Trajectory,
    pub classification: PriorClassification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainStats {
    pub algorithm: String,
    pub first_successful_episode: Option<u64>,
    pub converged: bool,
    pub convergence_episode: Option<u64>,
    pub computation_time_s: f64,
    /// Environment steps taken, exploit rollouts included.
    pub computation_steps: u64,
    #[serde(rename = "return")]
    pub return_value: Option<f64>,
    pub execution_time_s: Option<f64>,
    pub episodes: u64,
    pub successful_episodes: u64,
    pub exploit_failures: u64,
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub q: QTable,
    pub trajectory: Option<Trajectory>,
    /// `(episode, exploit return)` after each successful exploration.
    pub history: Vec<(u64, f64)>,
    pub stats: TrainStats,
}

/// Random generator for one run; distinct streams keep repetitions
/// independent under one seed.
pub fn run_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn train(env: &PhaseEnv, cfg: &RLConfig, algo: Algorithm, prior: Option<&Prior>, stream: u64) -> Result<TrainOutput> {
    cfg.validate()?;
    let started = Instant::now();
    if env.actions(GridState::new(0, 0)).is_none() {
        return Err(Error::Infeasible);
    }
    let mut q = QTable::new(env.columns(), env.rows());
    let terminal = match prior {
        Some(p) => {
            seed_prior(&mut q, &p.trajectory, &p.classification.verdicts, algo, cfg);
            p.classification.terminal.clone()
        }
        None => TerminalPolyline::endpoint(env.columns()),
    };
    let mut rng = run_rng(cfg.rng_seed, stream);
    let mut stats = TrainStats {
        algorithm: algo.to_string(),
        first_successful_episode: None,
        converged: false,
        convergence_episode: None,
        computation_time_s: 0.0,
        computation_steps: 0,
        return_value: None,
        execution_time_s: None,
        episodes: 0,
        successful_episodes: 0,
        exploit_failures: 0,
    };
    let mut history = Vec::new();
    let mut best: Option<Trajectory> = if cfg.max_episodes == 0 {
        prior.map(|p| p.trajectory.clone())
    } else {
        None
    };
    let mut last_return: Option<f64> = None;
    let mut stable = 0u64;

    for episode in 1..=cfg.max_episodes {
        stats.episodes = episode;
        let log = run_episode(env, &mut q, cfg, algo, &terminal, &mut rng);
        stats.computation_steps += log.steps.len() as u64;
        if algo == Algorithm::Iavrl {
            iavrl_update(&mut q, &log, cfg);
        }
        if !log.succeeded() {
            continue;
        }
        stats.successful_episodes += 1;
        stats.first_successful_episode.get_or_insert(episode);
        stats.computation_steps += env.columns() as u64;
        match exploit(env, &q, &terminal)? {
            ExploitResult::Success(t) => {
                let r = t.return_value;
                history.push((episode, r));
                if last_return.is_some_and(|prev| (prev - r).abs() <= 1e-12) {
                    stable += 1;
                } else {
                    last_return = Some(r);
                    stable = 0;
                    stats.convergence_episode = Some(episode);
                }
                best = Some(t);
                if stable >= cfg.patience {
                    stats.converged = true;
                    break;
                }
            }
            ExploitResult::Failure { .. } => {
                stats.exploit_failures += 1;
                last_return = None;
                stable = 0;
            }
        }
    }
    if !stats.converged {
        stats.convergence_episode = None;
    }
    stats.return_value = best.as_ref().map(|t| t.return_value);
    stats.execution_time_s = best.as_ref().map(|t| t.exec_time);
    stats.computation_time_s = started.elapsed().as_secs_f64();
    Ok(TrainOutput {
        q,
        trajectory: best,
        history,
        stats,
    })
}
