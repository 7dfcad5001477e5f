//! Tabular agents on the phase grid.
//!
//! Two update rules share one episode loop: the one-step temporal-difference
//! update (`Algorithm::Iql`) and the multi-step assignment update
//! (`Algorithm::Iavrl`), which also explores each action at most once.

pub mod agent;
pub mod episode;
pub mod qtable;
pub mod terminal;
pub mod train;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use agent::{iavrl_update, iql_update, reward, seed_prior, select_action, Selection};
pub use episode::{exploit, run_episode, EpisodeLog, ExploitResult, Outcome, Step};
pub use qtable::QTable;
pub use terminal::{crossed_terminal, TerminalPolyline};
pub use train::{run_rng, train, Prior, TrainOutput, TrainStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Iql,
    Iavrl,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Iql => "IQL",
            Algorithm::Iavrl => "IAVRL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RLConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub rho: f64,
    pub mu: f64,
    pub epsilon: f64,
    pub max_episodes: u64,
    /// Seed magnitude for clean prior transitions; defaults per algorithm.
    pub prior_scale_pos: Option<f64>,
    /// Seed magnitude for violating prior transitions; defaults per algorithm.
    pub prior_scale_neg: Option<f64>,
    pub rng_seed: u64,
    /// Successful explorations with an unchanged exploit return that count
    /// as convergence.
    pub patience: u64,
}

impl Default for RLConfig {
    fn default() -> Self {
        Self {
            alpha: 0.8,
            gamma: 0.8,
            rho: 0.8,
            mu: 1.25,
            epsilon: 0.4,
            max_episodes: 500_000,
            prior_scale_pos: None,
            prior_scale_neg: None,
            rng_seed: 0,
            patience: 1_000,
        }
    }
}

impl RLConfig {
    pub fn validate(&self) -> Result<()> {
        let open = |x: f64| x > 0.0 && x < 1.0;
        if !open(self.alpha) {
            return Err(Error::config("alpha must lie in (0, 1)"));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(Error::config("gamma must lie in [0, 1)"));
        }
        if !open(self.rho) {
            return Err(Error::config("rho must lie in (0, 1)"));
        }
        if !(self.mu > 0.0) {
            return Err(Error::config("mu must be positive"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::config("epsilon must lie in [0, 1]"));
        }
        if self.patience == 0 {
            return Err(Error::config("patience must be at least 1"));
        }
        for s in [self.prior_scale_pos, self.prior_scale_neg].into_iter().flatten() {
            if !(s >= 0.0) {
                return Err(Error::config("prior scales must be non-negative"));
            }
        }
        Ok(())
    }

    /// `(positive, negative)` seed magnitudes.
    pub fn prior_scales(&self, algo: Algorithm) -> (f64, f64) {
        let (pos, neg) = match algo {
            Algorithm::Iql => (25.0, 25.0),
            Algorithm::Iavrl => (1.0, 1.25),
        };
        (self.prior_scale_pos.unwrap_or(pos), self.prior_scale_neg.unwrap_or(neg))
    }
}
