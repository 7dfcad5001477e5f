//! Selective path discretization.
//!
//! A greedy scan over uniformly spaced candidates accepts a point whenever
//! `‖Δq′‖∞ > ε` or `‖Δq″‖∞ > σ` relative to the last accepted point, or when
//! skipping it would stretch the gap beyond `ds_max`. Both endpoints are kept.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dynamics::{coefficients_at, DynamicsModel, ParamCoefficients};
use crate::error::{Error, Result};
use crate::par;
use crate::path::{JointPath, PathPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscretizeParams {
    pub eps: f64,
    pub sigma: f64,
    pub ds_max: f64,
    pub candidates: usize,
}

impl DiscretizeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.sigma > 0.0 && self.ds_max > 0.0) {
            return Err(Error::config("eps, sigma and ds_max must be positive"));
        }
        if self.candidates < 2 {
            return Err(Error::config("candidate count must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePoint {
    pub s: f64,
    pub q: DVector<f64>,
    pub dq: DVector<f64>,
    pub ddq: DVector<f64>,
    pub co: ParamCoefficients,
}

/// Discretized path: strictly increasing `s` from 0 to 1 with the projected
/// dynamics cached per point.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePath {
    points: Vec<DiscretePoint>,
    params: Option<DiscretizeParams>,
}

impl DiscretePath {
    /// Build from explicit `s` values (must start at 0, end at 1, increase).
    pub fn from_s_values(model: &dyn DynamicsModel, path: &dyn JointPath, s_values: &[f64]) -> Result<Self> {
        if s_values.len() < 2 || s_values[0] != 0.0 || s_values[s_values.len() - 1] != 1.0 {
            return Err(Error::config("discrete path must start at s = 0 and end at s = 1"));
        }
        if s_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("discrete s values must be strictly increasing"));
        }
        let points = par::map_range(s_values.len(), |i| {
            let sample = path.sample(s_values[i])?;
            make_point(model, sample)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(Self { points, params: None })
    }

    /// `n` evenly spaced points.
    pub fn uniform(model: &dyn DynamicsModel, path: &dyn JointPath, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::config("uniform discretization needs at least 2 points"));
        }
        let s: Vec<f64> = (0..n).map(|i| candidate_s(i, n)).collect();
        Self::from_s_values(model, path, &s)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn points(&self) -> &[DiscretePoint] {
        &self.points
    }
    pub fn point(&self, k: usize) -> &DiscretePoint {
        &self.points[k]
    }
    pub fn s(&self, k: usize) -> f64 {
        self.points[k].s
    }
    /// `s_{k+1} − s_k`.
    pub fn ds(&self, k: usize) -> f64 {
        self.points[k + 1].s - self.points[k].s
    }
    pub fn s_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.s).collect()
    }
    pub fn params(&self) -> Option<&DiscretizeParams> {
        self.params.as_ref()
    }
}

fn make_point(model: &dyn DynamicsModel, sample: PathPoint) -> Result<DiscretePoint> {
    let co = coefficients_at(model, &sample)?;
    Ok(DiscretePoint {
        s: sample.s,
        q: sample.q,
        dq: sample.dq,
        ddq: sample.ddq,
        co,
    })
}

fn candidate_s(j: usize, count: usize) -> f64 {
    if j + 1 == count {
        1.0
    } else {
        j as f64 / (count - 1) as f64
    }
}

fn inf_norm_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn discretize(model: &dyn DynamicsModel, path: &dyn JointPath, params: &DiscretizeParams) -> Result<DiscretePath> {
    params.validate()?;
    let count = params.candidates;
    let samples = par::map_range(count, |j| path.sample(candidate_s(j, count)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    // Spacing is enforced in whole candidate steps to stay exact.
    let max_steps = ((params.ds_max * (count - 1) as f64) + 1e-9).floor().max(1.0) as usize;
    let mut accepted = vec![0usize];
    for j in 1..count - 1 {
        let last = *accepted.last().unwrap();
        let dq_jump = inf_norm_diff(&samples[j].dq, &samples[last].dq);
        let ddq_jump = inf_norm_diff(&samples[j].ddq, &samples[last].ddq);
        if dq_jump > params.eps || ddq_jump > params.sigma || j + 1 - last > max_steps {
            accepted.push(j);
        }
    }
    accepted.push(count - 1);

    let mut samples: Vec<Option<PathPoint>> = samples.into_iter().map(Some).collect();
    let points = accepted
        .into_iter()
        .map(|j| make_point(model, samples[j].take().expect("each candidate accepted once")))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscretePath {
        points,
        params: Some(*params),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathStats {
    pub n: usize,
    pub max_dq_jump: f64,
    pub max_ddq_jump: f64,
    pub max_ds: f64,
}

pub fn path_stats(dp: &DiscretePath) -> PathStats {
    let mut stats = PathStats {
        n: dp.len(),
        max_dq_jump: 0.0,
        max_ddq_jump: 0.0,
        max_ds: 0.0,
    };
    for w in dp.points().windows(2) {
        stats.max_dq_jump = stats.max_dq_jump.max(inf_norm_diff(&w[1].dq, &w[0].dq));
        stats.max_ddq_jump = stats.max_ddq_jump.max(inf_norm_diff(&w[1].ddq, &w[0].ddq));
        stats.max_ds = stats.max_ds.max(w[1].s - w[0].s);
    }
    stats
}
