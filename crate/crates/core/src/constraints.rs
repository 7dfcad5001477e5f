//! Actuator and kinematic limits, and the pseudo-velocity / pseudo-acceleration
//! bounds they induce at a phase-plane state.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dynamics::{parametric_torque, ParamCoefficients};
use crate::error::{Error, Result};

/// Relative slack tolerated when a state sits exactly on a speed limit.
const SPEED_SLACK: f64 = 1e-9;

/// Piecewise-linear peak-torque envelope of one joint's motor.
///
/// Speeds are in rad/s and torques in N·m at the motor shaft. The joint sees
/// `torque × gear_ratio` and turns at `motor speed / gear_ratio`.
#[derive(Debug, Clone, PartialEq)]
pub struct MotorCharacteristic {
    breakpoints: Vec<(f64, f64)>,
    negative: Option<Vec<(f64, f64)>>,
    continuous: Option<Vec<(f64, f64)>>,
    rated_speed: f64,
    gear_ratio: f64,
}

fn validate_envelope(points: &[(f64, f64)], what: &str) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::config(format!("{what}: at least 2 breakpoints required")));
    }
    if points[0].0 < 0.0 {
        return Err(Error::config(format!("{what}: speeds must be non-negative")));
    }
    for w in points.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::config(format!("{what}: speeds must be strictly increasing")));
        }
        if w[1].1 > w[0].1 {
            return Err(Error::config(format!("{what}: torque must not increase with speed")));
        }
    }
    if points.iter().any(|(w, t)| !w.is_finite() || !t.is_finite() || *t <= 0.0) {
        return Err(Error::config(format!("{what}: torques must be finite and positive")));
    }
    Ok(())
}

fn interpolate(points: &[(f64, f64)], speed: f64) -> f64 {
    let idx = points.partition_point(|(w, _)| *w <= speed);
    if idx == 0 {
        return points[0].1;
    }
    if idx == points.len() {
        return points[idx - 1].1;
    }
    let (w0, t0) = points[idx - 1];
    let (w1, t1) = points[idx];
    t0 + (t1 - t0) * (speed - w0) / (w1 - w0)
}

impl MotorCharacteristic {
    /// Symmetric characteristic (`τ_min = −τ_max`).
    pub fn new(breakpoints: Vec<(f64, f64)>, rated_speed: f64, gear_ratio: f64) -> Result<Self> {
        validate_envelope(&breakpoints, "motor characteristic")?;
        if !(gear_ratio > 0.0) || !gear_ratio.is_finite() {
            return Err(Error::config("gear ratio must be positive"));
        }
        Ok(Self {
            breakpoints,
            negative: None,
            continuous: None,
            rated_speed,
            gear_ratio,
        })
    }

    /// Envelope of constant torque up to `max_speed`.
    pub fn flat(torque: f64, max_speed: f64, gear_ratio: f64) -> Result<Self> {
        Self::new(vec![(0.0, torque), (max_speed, torque)], max_speed, gear_ratio)
    }

    /// Use a separate envelope for the magnitude of the negative torque limit.
    pub fn with_negative(mut self, negative: Vec<(f64, f64)>) -> Result<Self> {
        validate_envelope(&negative, "negative motor characteristic")?;
        if negative.last().map(|p| p.0) != self.breakpoints.last().map(|p| p.0) {
            return Err(Error::config("negative envelope must end at the same max speed"));
        }
        self.negative = Some(negative);
        Ok(self)
    }

    /// Record the continuous-duty envelope. It is informational only.
    pub fn with_continuous(mut self, continuous: Vec<(f64, f64)>) -> Result<Self> {
        validate_envelope(&continuous, "continuous-duty envelope")?;
        self.continuous = Some(continuous);
        Ok(self)
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }
    pub fn continuous(&self) -> Option<&[(f64, f64)]> {
        self.continuous.as_deref()
    }
    pub fn is_symmetric(&self) -> bool {
        self.negative.is_none()
    }
    pub fn rated_speed(&self) -> f64 {
        self.rated_speed
    }
    pub fn gear_ratio(&self) -> f64 {
        self.gear_ratio
    }
    pub fn max_speed(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1].0
    }
    /// Highest joint speed the motor can deliver.
    pub fn joint_speed_cap(&self) -> f64 {
        self.max_speed() / self.gear_ratio
    }

    /// Peak motor torque at `speed` (motor side). `None` past the envelope.
    pub fn peak_torque(&self, speed: f64) -> Option<f64> {
        let speed = speed.abs();
        let max = self.max_speed();
        if speed > max * (1.0 + SPEED_SLACK) {
            return None;
        }
        Some(interpolate(&self.breakpoints, speed.min(max)))
    }

    /// Joint-side `(τ_min, τ_max)` at joint velocity `qdot`.
    pub fn joint_limits(&self, joint: usize, qdot: f64) -> Result<(f64, f64)> {
        let speed = qdot.abs() * self.gear_ratio;
        let upper = self.peak_torque(speed).ok_or(Error::InfeasibleSpeed {
            joint,
            speed,
            max: self.max_speed(),
        })?;
        let lower = match &self.negative {
            None => upper,
            Some(neg) => interpolate(neg, speed.min(self.max_speed())),
        };
        Ok((-lower * self.gear_ratio, upper * self.gear_ratio))
    }
}

/// File form of a motor characteristic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotorSpec {
    pub breakpoints: Vec<[f64; 2]>,
    pub gear_ratio: f64,
    #[serde(default)]
    pub rated_speed: Option<f64>,
    #[serde(default = "default_true")]
    pub symmetric: bool,
    #[serde(default)]
    pub negative_breakpoints: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub continuous: Option<Vec<[f64; 2]>>,
}

fn default_true() -> bool {
    true
}

fn pairs(v: &[[f64; 2]]) -> Vec<(f64, f64)> {
    v.iter().map(|[a, b]| (*a, *b)).collect()
}

impl MotorSpec {
    pub fn build(&self) -> Result<MotorCharacteristic> {
        let points = pairs(&self.breakpoints);
        let max = points.last().map(|p| p.0).unwrap_or(0.0);
        let mut motor = MotorCharacteristic::new(points, self.rated_speed.unwrap_or(max), self.gear_ratio)?;
        match (&self.negative_breakpoints, self.symmetric) {
            (Some(neg), false) => motor = motor.with_negative(pairs(neg))?,
            (None, false) => return Err(Error::config("asymmetric motor needs negative_breakpoints")),
            (Some(_), true) => return Err(Error::config("negative_breakpoints given for a symmetric motor")),
            (None, true) => {}
        }
        if let Some(cont) = &self.continuous {
            motor = motor.with_continuous(pairs(cont))?;
        }
        Ok(motor)
    }
}

/// Joint velocity and acceleration limits. Infinite entries mean "unbounded".
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicLimits {
    pub qdot_min: DVector<f64>,
    pub qdot_max: DVector<f64>,
    pub qddot_min: DVector<f64>,
    pub qddot_max: DVector<f64>,
}

impl KinematicLimits {
    pub fn new(
        qdot_min: DVector<f64>,
        qdot_max: DVector<f64>,
        qddot_min: DVector<f64>,
        qddot_max: DVector<f64>,
    ) -> Result<Self> {
        let n = qdot_max.len();
        for (what, v) in [("qdot_min", &qdot_min), ("qddot_min", &qddot_min), ("qddot_max", &qddot_max)] {
            if v.len() != n {
                return Err(Error::Dimension {
                    what,
                    expected: n,
                    got: v.len(),
                });
            }
        }
        for (lo, hi) in [(&qdot_min, &qdot_max), (&qddot_min, &qddot_max)] {
            if lo.iter().zip(hi.iter()).any(|(l, h)| !(*l < 0.0 && *h > 0.0)) {
                return Err(Error::config("kinematic limits need min < 0 < max for every joint"));
            }
        }
        Ok(Self {
            qdot_min,
            qdot_max,
            qddot_min,
            qddot_max,
        })
    }

    /// `|q̇| ≤ qdot_max`, `|q̈| ≤ qddot_max`.
    pub fn symmetric(qdot_max: &[f64], qddot_max: &[f64]) -> Result<Self> {
        let vmax = DVector::from_column_slice(qdot_max);
        let amax = DVector::from_column_slice(qddot_max);
        Self::new(-&vmax, vmax, -&amax, amax)
    }

    /// Velocity limits only; accelerations unbounded.
    pub fn velocity_only(qdot_max: &[f64]) -> Result<Self> {
        Self::symmetric(qdot_max, &vec![f64::INFINITY; qdot_max.len()])
    }

    pub fn dof(&self) -> usize {
        self.qdot_max.len()
    }
}

/// Feasible pseudo-acceleration interval. `min > max` encodes infeasibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelInterval {
    pub min: f64,
    pub max: f64,
}

impl AccelInterval {
    pub const EMPTY: Self = Self {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
    };
    pub const FULL: Self = Self {
        min: f64::NEG_INFINITY,
        max: f64::INFINITY,
    };

    pub fn is_empty(&self) -> bool {
        !(self.min <= self.max)
    }

    pub fn contains(&self, sddot: f64, tol: f64) -> bool {
        sddot >= self.min - tol && sddot <= self.max + tol
    }

    pub fn contains_interval(&self, other: &AccelInterval) -> bool {
        other.is_empty() || (self.min <= other.min && other.max <= self.max)
    }

    /// Intersect with `{x : lo ≤ slope·x + offset ≤ hi}`. A zero slope turns
    /// the row into a pure feasibility test.
    fn restrict(&mut self, slope: f64, offset: f64, lo: f64, hi: f64) {
        let a = lo - offset;
        let b = hi - offset;
        if slope > 0.0 {
            self.min = self.min.max(a / slope);
            self.max = self.max.min(b / slope);
        } else if slope < 0.0 {
            self.min = self.min.max(b / slope);
            self.max = self.max.min(a / slope);
        } else if a > 0.0 || b < 0.0 {
            *self = Self::EMPTY;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TorqueLimits {
    /// Velocity-independent bounds.
    Constant { lower: DVector<f64>, upper: DVector<f64> },
    /// Velocity-dependent motor envelopes.
    Motors(Vec<MotorCharacteristic>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintMode {
    Conservative,
    VelocityDependent,
}

impl std::fmt::Display for ConstraintMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConstraintMode::Conservative => "conservative",
            ConstraintMode::VelocityDependent => "velocity-dependent",
        })
    }
}

/// Full constraint set for one planning problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraints {
    kinematic: KinematicLimits,
    torque: TorqueLimits,
    /// Joint speed cap from the motors' max speed (∞ without motors).
    motor_speed_cap: DVector<f64>,
}

impl Constraints {
    pub fn new(kinematic: KinematicLimits, torque: TorqueLimits) -> Result<Self> {
        let n = kinematic.dof();
        let motor_speed_cap = match &torque {
            TorqueLimits::Constant { lower, upper } => {
                if lower.len() != n || upper.len() != n {
                    return Err(Error::Dimension {
                        what: "torque limits",
                        expected: n,
                        got: lower.len().min(upper.len()),
                    });
                }
                if lower.iter().zip(upper.iter()).any(|(l, u)| !(l <= u)) {
                    return Err(Error::config("constant torque limits need lower ≤ upper"));
                }
                DVector::from_element(n, f64::INFINITY)
            }
            TorqueLimits::Motors(motors) => {
                if motors.len() != n {
                    return Err(Error::Dimension {
                        what: "motor characteristics",
                        expected: n,
                        got: motors.len(),
                    });
                }
                DVector::from_iterator(n, motors.iter().map(MotorCharacteristic::joint_speed_cap))
            }
        };
        Ok(Self {
            kinematic,
            torque,
            motor_speed_cap,
        })
    }

    /// Constant torque limits `|τ| ≤ τ_max`.
    pub fn constant(kinematic: KinematicLimits, tau_max: &[f64]) -> Result<Self> {
        let upper = DVector::from_column_slice(tau_max);
        Self::new(kinematic, TorqueLimits::Constant { lower: -&upper, upper })
    }

    pub fn dof(&self) -> usize {
        self.kinematic.dof()
    }
    pub fn kinematic(&self) -> &KinematicLimits {
        &self.kinematic
    }
    pub fn torque(&self) -> &TorqueLimits {
        &self.torque
    }
    pub fn is_velocity_dependent(&self) -> bool {
        matches!(self.torque, TorqueLimits::Motors(_))
    }

    /// The relaxation that replaces each motor envelope by its zero-speed
    /// peak torque. Speed caps are kept.
    pub fn conservative(&self) -> Self {
        match &self.torque {
            TorqueLimits::Constant { .. } => self.clone(),
            TorqueLimits::Motors(motors) => {
                let n = motors.len();
                let mut lower = DVector::zeros(n);
                let mut upper = DVector::zeros(n);
                for (i, m) in motors.iter().enumerate() {
                    let (lo, hi) = m.joint_limits(i, 0.0).expect("zero speed is inside every envelope");
                    lower[i] = lo;
                    upper[i] = hi;
                }
                Self {
                    kinematic: self.kinematic.clone(),
                    torque: TorqueLimits::Constant { lower, upper },
                    motor_speed_cap: self.motor_speed_cap.clone(),
                }
            }
        }
    }

    pub fn for_mode(&self, mode: ConstraintMode) -> Self {
        match mode {
            ConstraintMode::Conservative => self.conservative(),
            ConstraintMode::VelocityDependent => self.clone(),
        }
    }

    /// Joint torque bounds at joint velocity `qdot`.
    pub fn torque_bounds(&self, qdot: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        match &self.torque {
            TorqueLimits::Constant { lower, upper } => Ok((lower.clone(), upper.clone())),
            TorqueLimits::Motors(motors) => {
                let n = motors.len();
                let mut lower = DVector::zeros(n);
                let mut upper = DVector::zeros(n);
                for (i, m) in motors.iter().enumerate() {
                    let (lo, hi) = m.joint_limits(i, qdot[i])?;
                    lower[i] = lo;
                    upper[i] = hi;
                }
                Ok((lower, upper))
            }
        }
    }

    /// Largest admissible `ṡ` given `q′(s)`. Returns `+∞` when no joint moves.
    pub fn velocity_bound(&self, dq: &DVector<f64>) -> f64 {
        let k = &self.kinematic;
        let mut bound = f64::INFINITY;
        for i in 0..dq.len() {
            let d = dq[i];
            let cap = self.motor_speed_cap[i];
            let b = if d > 0.0 {
                k.qdot_max[i].min(cap) / d
            } else if d < 0.0 {
                k.qdot_min[i].max(-cap) / d
            } else {
                continue;
            };
            bound = bound.min(b);
        }
        bound
    }

    /// Feasible `s̈` at `(s, ṡ)` from torque and joint-acceleration limits.
    pub fn accel_bounds(
        &self,
        co: &ParamCoefficients,
        dq: &DVector<f64>,
        ddq: &DVector<f64>,
        sdot: f64,
    ) -> AccelInterval {
        let qdot = dq * sdot;
        let Ok((tau_min, tau_max)) = self.torque_bounds(&qdot) else {
            return AccelInterval::EMPTY;
        };
        let residual = co.residual(sdot);
        let mut interval = AccelInterval::FULL;
        for i in 0..co.dof() {
            interval.restrict(co.m[i], residual[i], tau_min[i], tau_max[i]);
        }
        let k = &self.kinematic;
        let sq = sdot * sdot;
        for i in 0..dq.len() {
            interval.restrict(dq[i], ddq[i] * sq, k.qddot_min[i], k.qddot_max[i]);
        }
        if interval.is_empty() {
            AccelInterval::EMPTY
        } else {
            interval
        }
    }

    /// `ṡ` within the velocity bound and a nonempty `s̈` interval.
    pub fn check_state(&self, co: &ParamCoefficients, dq: &DVector<f64>, ddq: &DVector<f64>, sdot: f64) -> bool {
        let bound = self.velocity_bound(dq);
        sdot >= 0.0 && sdot <= bound * (1.0 + SPEED_SLACK) && !self.accel_bounds(co, dq, ddq, sdot).is_empty()
    }

    /// Largest componentwise amount by which the torque at `(ṡ, s̈)` leaves
    /// its bounds. Overspeed counts as infinite excess.
    pub fn torque_excess(&self, co: &ParamCoefficients, dq: &DVector<f64>, sdot: f64, sddot: f64) -> f64 {
        let tau = parametric_torque(co, sdot, sddot);
        match self.torque_bounds(&(dq * sdot)) {
            Err(_) => f64::INFINITY,
            Ok((lo, hi)) => (0..tau.len())
                .map(|i| (tau[i] - hi[i]).max(lo[i] - tau[i]).max(0.0))
                .fold(0.0, f64::max),
        }
    }
}
