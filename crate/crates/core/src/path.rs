//! Joint-space paths `q(s)` on `s ∈ [0, 1]` with analytic first and second
//! derivatives.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A geometric path through joint space parameterised by `s ∈ [0, 1]`.
///
/// Implementations supply `q′` and `q″` analytically; nothing downstream
/// finite-differences them.
pub trait JointPath: Send + Sync {
    fn dof(&self) -> usize;
    fn q(&self, s: f64) -> DVector<f64>;
    fn dq(&self, s: f64) -> DVector<f64>;
    fn ddq(&self, s: f64) -> DVector<f64>;

    /// Evaluate `q`, `q′`, `q″` at `s` after checking the domain and finiteness.
    fn sample(&self, s: f64) -> Result<PathPoint> {
        check_domain(s)?;
        let point = PathPoint {
            s,
            q: self.q(s),
            dq: self.dq(s),
            ddq: self.ddq(s),
        };
        let finite = point.q.iter().chain(point.dq.iter()).chain(point.ddq.iter());
        if finite.clone().any(|v| !v.is_finite()) {
            return Err(Error::Path {
                s,
                reason: "non-finite position or derivative".into(),
            });
        }
        Ok(point)
    }
}

pub(crate) fn check_domain(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::OutOfDomain(s))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub s: f64,
    pub q: DVector<f64>,
    pub dq: DVector<f64>,
    pub ddq: DVector<f64>,
}

/// Check that `dq`/`ddq` agree with central differences of `q`/`dq` at
/// `samples` interior points. Relative tolerance is scaled by `max(1, |value|)`.
pub fn check_consistency(path: &dyn JointPath, samples: usize, rel_tol: f64) -> Result<()> {
    let h = 1e-6;
    for i in 1..=samples {
        let s = i as f64 / (samples + 1) as f64;
        let p = path.sample(s)?;
        let fd_dq = (path.q(s + h) - path.q(s - h)) / (2.0 * h);
        let fd_ddq = (path.dq(s + h) - path.dq(s - h)) / (2.0 * h);
        for j in 0..path.dof() {
            for (label, analytic, fd) in [("q'", p.dq[j], fd_dq[j]), ("q''", p.ddq[j], fd_ddq[j])] {
                if (analytic - fd).abs() > rel_tol * analytic.abs().max(1.0) {
                    return Err(Error::Path {
                        s,
                        reason: format!(
                            "joint {j}: analytic {label} = {analytic} disagrees with finite difference {fd}"
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}

/// One polynomial piece on `[start, end]`. Coefficients are in ascending powers
/// of the local variable `u = s − start`, one list per joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySegment {
    pub start: f64,
    pub end: f64,
    pub coeffs: Vec<Vec<f64>>,
}

/// Piecewise-polynomial joint path.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPath {
    dof: usize,
    segments: Vec<PolySegment>,
}

impl PolyPath {
    pub fn new(segments: Vec<PolySegment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::config("path needs at least one segment"))?;
        let dof = first.coeffs.len();
        if dof == 0 {
            return Err(Error::config("path segments need at least one joint"));
        }
        if first.start != 0.0 || segments.last().map(|seg| seg.end) != Some(1.0) {
            return Err(Error::config("path segments must cover exactly [0, 1]"));
        }
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.end > seg.start) {
                return Err(Error::config(format!("segment {i} has non-positive length")));
            }
            if i > 0 && segments[i - 1].end != seg.start {
                return Err(Error::config(format!("segment {i} does not start where segment {} ends", i - 1)));
            }
            if seg.coeffs.len() != dof {
                return Err(Error::Dimension {
                    what: "path segment joints",
                    expected: dof,
                    got: seg.coeffs.len(),
                });
            }
            if seg.coeffs.iter().any(|c| c.is_empty() || c.iter().any(|v| !v.is_finite())) {
                return Err(Error::config(format!("segment {i} has empty or non-finite coefficients")));
            }
        }
        Ok(Self { dof, segments })
    }

    /// Straight joint-space line from `from` to `to`.
    pub fn line(from: &[f64], to: &[f64]) -> Result<Self> {
        if from.len() != to.len() {
            return Err(Error::Dimension {
                what: "line endpoints",
                expected: from.len(),
                got: to.len(),
            });
        }
        let coeffs = from.iter().zip(to).map(|(a, b)| vec![*a, b - a]).collect();
        Self::new(vec![PolySegment {
            start: 0.0,
            end: 1.0,
            coeffs,
        }])
    }

    pub fn segments(&self) -> &[PolySegment] {
        &self.segments
    }

    fn locate(&self, s: f64) -> (&PolySegment, f64) {
        let idx = self
            .segments
            .partition_point(|seg| seg.end < s)
            .min(self.segments.len() - 1);
        let seg = &self.segments[idx];
        (seg, s - seg.start)
    }

    fn eval(&self, s: f64, order: usize) -> DVector<f64> {
        let (seg, u) = self.locate(s);
        DVector::from_iterator(self.dof, seg.coeffs.iter().map(|c| poly_derivative(c, u, order)))
    }
}

/// Horner evaluation of the `order`-th derivative of `Σ c_i u^i`.
fn poly_derivative(coeffs: &[f64], u: f64, order: usize) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(order)
        .rev()
        .fold(0.0, |acc, (i, c)| {
            let falling: f64 = (0..order).map(|k| (i - k) as f64).product();
            acc * u + c * falling
        })
}

impl JointPath for PolyPath {
    fn dof(&self) -> usize {
        self.dof
    }
    fn q(&self, s: f64) -> DVector<f64> {
        self.eval(s, 0)
    }
    fn dq(&self, s: f64) -> DVector<f64> {
        self.eval(s, 1)
    }
    fn ddq(&self, s: f64) -> DVector<f64> {
        self.eval(s, 2)
    }
}

/// Straight line plus a Gaussian bump per joint:
/// `q_i(s) = a_i + (b_i − a_i) s + A_i exp(−((s − c)/w)²)`.
///
/// The bump concentrates curvature near `c`, which is what makes selective
/// discretization differ from uniform spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpPath {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub center: f64,
    pub width: f64,
}

impl BumpPath {
    pub fn new(from: Vec<f64>, to: Vec<f64>, amplitude: Vec<f64>, center: f64, width: f64) -> Result<Self> {
        let n = from.len();
        for (what, len) in [("bump path end", to.len()), ("bump amplitudes", amplitude.len())] {
            if len != n {
                return Err(Error::Dimension {
                    what,
                    expected: n,
                    got: len,
                });
            }
        }
        if n == 0 || !(width > 0.0) || !center.is_finite() {
            return Err(Error::config("bump path needs joints, a finite center and width > 0"));
        }
        Ok(Self {
            from,
            to,
            amplitude,
            center,
            width,
        })
    }

    fn gauss(&self, s: f64) -> (f64, f64, f64) {
        let x = (s - self.center) / self.width;
        let e = (-x * x).exp();
        let w = self.width;
        (e, -2.0 * x * e / w, (4.0 * x * x - 2.0) * e / (w * w))
    }
}

impl JointPath for BumpPath {
    fn dof(&self) -> usize {
        self.from.len()
    }
    fn q(&self, s: f64) -> DVector<f64> {
        let (g, _, _) = self.gauss(s);
        DVector::from_fn(self.dof(), |i, _| {
            self.from[i] + (self.to[i] - self.from[i]) * s + self.amplitude[i] * g
        })
    }
    fn dq(&self, s: f64) -> DVector<f64> {
        let (_, g1, _) = self.gauss(s);
        DVector::from_fn(self.dof(), |i, _| self.to[i] - self.from[i] + self.amplitude[i] * g1)
    }
    fn ddq(&self, s: f64) -> DVector<f64> {
        let (_, _, g2) = self.gauss(s);
        DVector::from_fn(self.dof(), |i, _| self.amplitude[i] * g2)
    }
}

type PathFn = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

/// Path given by closures for `q`, `q′`, `q″`.
#[derive(Clone)]
pub struct FnPath {
    dof: usize,
    q: PathFn,
    dq: PathFn,
    ddq: PathFn,
}

impl FnPath {
    pub fn new(
        dof: usize,
        q: impl Fn(f64) -> DVector<f64> + Send + Sync + 'static,
        dq: impl Fn(f64) -> DVector<f64> + Send + Sync + 'static,
        ddq: impl Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dof,
            q: Arc::new(q),
            dq: Arc::new(dq),
            ddq: Arc::new(ddq),
        }
    }
}

impl fmt::Debug for FnPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnPath").field("dof", &self.dof).finish_non_exhaustive()
    }
}

impl JointPath for FnPath {
    fn dof(&self) -> usize {
        self.dof
    }
    fn q(&self, s: f64) -> DVector<f64> {
        (self.q)(s)
    }
    fn dq(&self, s: f64) -> DVector<f64> {
        (self.dq)(s)
    }
    fn ddq(&self, s: f64) -> DVector<f64> {
        (self.ddq)(s)
    }
}
