//! Rigid-body joint dynamics and their projection onto a path.
//!
//! Joint torque is modelled as
//! `τ = M(q)q̈ + B(q)[q̇q̇] + C(q)[q̇²] + F_v q̇ + F_c sgn(q̇) + G(q)`
//! where `[q̇q̇] = (q̇₁q̇₂, q̇₁q̇₃, …, q̇ₙ₋₁q̇ₙ)` and `[q̇²] = (q̇₁², …, q̇ₙ²)`.
//! Along a path `q(s)` this collapses to `τ = m s̈ + c ṡ² + f ṡ + g`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{check_domain, JointPath, PathPoint};

/// An n-DOF manipulator model.
pub trait DynamicsModel: Send + Sync {
    fn dof(&self) -> usize;
    /// Mass matrix `M(q)`, n × n.
    fn mass(&self, q: &DVector<f64>) -> DMatrix<f64>;
    /// Coriolis coefficients `B(q)`, n × n(n−1)/2.
    fn coriolis(&self, q: &DVector<f64>) -> DMatrix<f64>;
    /// Centrifugal coefficients `C(q)`, n × n.
    fn centrifugal(&self, q: &DVector<f64>) -> DMatrix<f64>;
    fn viscous(&self) -> DVector<f64>;
    fn coulomb(&self) -> DVector<f64>;
    fn gravity(&self, q: &DVector<f64>) -> DVector<f64>;
}

/// `sgn` with `sgn(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Pairwise products `(v₁v₂, v₁v₃, …, vₙ₋₁vₙ)`.
pub fn pair_products(v: &DVector<f64>) -> DVector<f64> {
    let n = v.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(v[i] * v[j]);
        }
    }
    DVector::from_vec(out)
}

fn check_len(what: &'static str, v: &DVector<f64>, n: usize) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(Error::Dimension {
            what,
            expected: n,
            got: v.len(),
        })
    }
}

pub fn joint_torque(
    model: &dyn DynamicsModel,
    q: &DVector<f64>,
    qdot: &DVector<f64>,
    qddot: &DVector<f64>,
) -> Result<DVector<f64>> {
    let n = model.dof();
    check_len("q", q, n)?;
    check_len("qdot", qdot, n)?;
    check_len("qddot", qddot, n)?;
    let coulomb = model.coulomb().zip_map(qdot, |fc, v| fc * sign(v));
    Ok(model.mass(q) * qddot
        + model.coriolis(q) * pair_products(qdot)
        + model.centrifugal(q) * qdot.map(|v| v * v)
        + model.viscous().component_mul(qdot)
        + coulomb
        + model.gravity(q))
}

/// Chain rule: `q̇ = q′ṡ`, `q̈ = q′s̈ + q″ṡ²`.
pub fn phase_to_joint(
    path: &dyn JointPath,
    s: f64,
    sdot: f64,
    sddot: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    check_domain(s)?;
    if sdot < 0.0 {
        return Err(Error::NegativeVelocity(sdot));
    }
    let dq = path.dq(s);
    let ddq = path.ddq(s);
    let qdot = &dq * sdot;
    let qddot = dq * sddot + ddq * (sdot * sdot);
    Ok((qdot, qddot))
}

/// Path-projected dynamics coefficients at one `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCoefficients {
    pub m: DVector<f64>,
    pub c: DVector<f64>,
    pub f: DVector<f64>,
    pub g: DVector<f64>,
}

impl ParamCoefficients {
    pub fn dof(&self) -> usize {
        self.m.len()
    }

    /// Torque-independent part `c ṡ² + f ṡ + g`.
    pub fn residual(&self, sdot: f64) -> DVector<f64> {
        let sq = sdot * sdot;
        DVector::from_fn(self.dof(), |i, _| self.c[i] * sq + self.f[i] * sdot + self.g[i])
    }
}

pub fn project_coefficients(
    model: &dyn DynamicsModel,
    path: &dyn JointPath,
    s: f64,
) -> Result<ParamCoefficients> {
    coefficients_at(model, &path.sample(s)?)
}

pub fn coefficients_at(model: &dyn DynamicsModel, point: &PathPoint) -> Result<ParamCoefficients> {
    let n = model.dof();
    check_len("path dof", &point.q, n)?;
    let mass = model.mass(&point.q);
    let m = &mass * &point.dq;
    // B is evaluated at q(s) and applied to [q′q′].
    let c = &mass * &point.ddq
        + model.coriolis(&point.q) * pair_products(&point.dq)
        + model.centrifugal(&point.q) * point.dq.map(|v| v * v);
    let f = model.viscous().component_mul(&point.dq);
    let g = model.coulomb().zip_map(&point.dq, |fc, v| fc * sign(v)) + model.gravity(&point.q);
    Ok(ParamCoefficients { m, c, f, g })
}

/// `τ = m s̈ + c ṡ² + f ṡ + g`.
pub fn parametric_torque(co: &ParamCoefficients, sdot: f64, sddot: f64) -> DVector<f64> {
    co.residual(sdot) + &co.m * sddot
}

/// Verify that `M(q(s))` is symmetric positive definite and every coefficient
/// is finite at `samples + 1` evenly spaced points.
pub fn check_model_on_path(model: &dyn DynamicsModel, path: &dyn JointPath, samples: usize) -> Result<()> {
    if path.dof() != model.dof() {
        return Err(Error::Dimension {
            what: "path vs model dof",
            expected: model.dof(),
            got: path.dof(),
        });
    }
    for i in 0..=samples {
        let s = i as f64 / samples.max(1) as f64;
        let point = path.sample(s)?;
        let mass = model.mass(&point.q);
        let asym = (&mass - mass.transpose()).amax();
        if asym > 1e-9 * mass.amax().max(1.0) || mass.clone().cholesky().is_none() {
            return Err(Error::config(format!("mass matrix is not symmetric positive definite at s = {s}")));
        }
        let co = coefficients_at(model, &point)?;
        if [&co.m, &co.c, &co.f, &co.g].iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::Path {
                s,
                reason: "non-finite dynamics coefficient".into(),
            });
        }
    }
    Ok(())
}

/// Single prismatic/revolute joint with constant inertia.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub mass: f64,
    #[serde(default)]
    pub viscous: f64,
    #[serde(default)]
    pub coulomb: f64,
    /// Constant load torque (gravity).
    #[serde(default)]
    pub gravity: f64,
}

impl PointMass {
    pub fn unit() -> Self {
        Self {
            mass: 1.0,
            viscous: 0.0,
            coulomb: 0.0,
            gravity: 0.0,
        }
    }
}

impl DynamicsModel for PointMass {
    fn dof(&self) -> usize {
        1
    }
    fn mass(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, self.mass)
    }
    fn coriolis(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(1, 0)
    }
    fn centrifugal(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(1, 1)
    }
    fn viscous(&self) -> DVector<f64> {
        DVector::from_element(1, self.viscous)
    }
    fn coulomb(&self) -> DVector<f64> {
        DVector::from_element(1, self.coulomb)
    }
    fn gravity(&self, _q: &DVector<f64>) -> DVector<f64> {
        DVector::from_element(1, self.gravity)
    }
}

/// Planar two-link arm with point masses at the distal end of each link.
/// Angles are measured from the horizontal; gravity acts along −y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarTwoLink {
    pub link_lengths: [f64; 2],
    pub link_masses: [f64; 2],
    #[serde(default)]
    pub gravity: f64,
    #[serde(default)]
    pub viscous: [f64; 2],
    #[serde(default)]
    pub coulomb: [f64; 2],
}

impl PlanarTwoLink {
    pub fn unit() -> Self {
        Self {
            link_lengths: [1.0, 1.0],
            link_masses: [1.0, 1.0],
            gravity: 0.0,
            viscous: [0.0; 2],
            coulomb: [0.0; 2],
        }
    }

    fn coupling(&self, q: &DVector<f64>) -> (f64, f64) {
        let [l1, l2] = self.link_lengths;
        let m2 = self.link_masses[1];
        (m2 * l1 * l2 * q[1].cos(), m2 * l1 * l2 * q[1].sin())
    }
}

impl DynamicsModel for PlanarTwoLink {
    fn dof(&self) -> usize {
        2
    }
    fn mass(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let [l1, l2] = self.link_lengths;
        let [m1, m2] = self.link_masses;
        let (kc, _) = self.coupling(q);
        let m22 = m2 * l2 * l2;
        let m12 = m22 + kc;
        let m11 = m22 + 2.0 * kc + (m1 + m2) * l1 * l1;
        DMatrix::from_row_slice(2, 2, &[m11, m12, m12, m22])
    }
    fn coriolis(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let (_, ks) = self.coupling(q);
        DMatrix::from_row_slice(2, 1, &[-2.0 * ks, 0.0])
    }
    fn centrifugal(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let (_, ks) = self.coupling(q);
        DMatrix::from_row_slice(2, 2, &[0.0, -ks, ks, 0.0])
    }
    fn viscous(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.viscous)
    }
    fn coulomb(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coulomb)
    }
    fn gravity(&self, q: &DVector<f64>) -> DVector<f64> {
        let [l1, l2] = self.link_lengths;
        let [m1, m2] = self.link_masses;
        let g = self.gravity;
        let c1 = q[0].cos();
        let c12 = (q[0] + q[1]).cos();
        DVector::from_column_slice(&[m2 * l2 * g * c12 + (m1 + m2) * l1 * g * c1, m2 * l2 * g * c12])
    }
}

/// n-DOF model with constant mass, Coriolis and centrifugal matrices and a
/// trigonometric gravity load `G(q) = g₀ + S sin(q) + C cos(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericModel {
    mass: DMatrix<f64>,
    coriolis: DMatrix<f64>,
    centrifugal: DMatrix<f64>,
    viscous: DVector<f64>,
    coulomb: DVector<f64>,
    gravity_const: DVector<f64>,
    gravity_sin: DMatrix<f64>,
    gravity_cos: DMatrix<f64>,
}

/// Row-major file form of [`GenericModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericModelSpec {
    pub dof: usize,
    pub mass: Vec<Vec<f64>>,
    #[serde(default)]
    pub coriolis: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub centrifugal: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub viscous: Option<Vec<f64>>,
    #[serde(default)]
    pub coulomb: Option<Vec<f64>>,
    #[serde(default)]
    pub gravity_const: Option<Vec<f64>>,
    #[serde(default)]
    pub gravity_sin: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub gravity_cos: Option<Vec<Vec<f64>>>,
}

fn matrix_from_rows(what: &'static str, rows: Option<&Vec<Vec<f64>>>, r: usize, c: usize) -> Result<DMatrix<f64>> {
    let Some(rows) = rows else {
        return Ok(DMatrix::zeros(r, c));
    };
    if rows.len() != r {
        return Err(Error::Dimension {
            what,
            expected: r,
            got: rows.len(),
        });
    }
    for row in rows {
        if row.len() != c {
            return Err(Error::Dimension {
                what,
                expected: c,
                got: row.len(),
            });
        }
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn vector_from(what: &'static str, v: Option<&Vec<f64>>, n: usize) -> Result<DVector<f64>> {
    match v {
        None => Ok(DVector::zeros(n)),
        Some(v) if v.len() == n => Ok(DVector::from_column_slice(v)),
        Some(v) => Err(Error::Dimension {
            what,
            expected: n,
            got: v.len(),
        }),
    }
}

impl GenericModel {
    pub fn from_spec(spec: &GenericModelSpec) -> Result<Self> {
        let n = spec.dof;
        if n == 0 {
            return Err(Error::config("generic model needs dof > 0"));
        }
        let model = Self {
            mass: matrix_from_rows("mass", Some(&spec.mass), n, n)?,
            coriolis: matrix_from_rows("coriolis", spec.coriolis.as_ref(), n, n * (n - 1) / 2)?,
            centrifugal: matrix_from_rows("centrifugal", spec.centrifugal.as_ref(), n, n)?,
            viscous: vector_from("viscous", spec.viscous.as_ref(), n)?,
            coulomb: vector_from("coulomb", spec.coulomb.as_ref(), n)?,
            gravity_const: vector_from("gravity_const", spec.gravity_const.as_ref(), n)?,
            gravity_sin: matrix_from_rows("gravity_sin", spec.gravity_sin.as_ref(), n, n)?,
            gravity_cos: matrix_from_rows("gravity_cos", spec.gravity_cos.as_ref(), n, n)?,
        };
        if (&model.mass - model.mass.transpose()).amax() > 1e-12 || model.mass.clone().cholesky().is_none() {
            return Err(Error::config("generic model mass matrix must be symmetric positive definite"));
        }
        Ok(model)
    }
}

impl DynamicsModel for GenericModel {
    fn dof(&self) -> usize {
        self.mass.nrows()
    }
    fn mass(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        self.mass.clone()
    }
    fn coriolis(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        self.coriolis.clone()
    }
    fn centrifugal(&self, _q: &DVector<f64>) -> DMatrix<f64> {
        self.centrifugal.clone()
    }
    fn viscous(&self) -> DVector<f64> {
        self.viscous.clone()
    }
    fn coulomb(&self) -> DVector<f64> {
        self.coulomb.clone()
    }
    fn gravity(&self, q: &DVector<f64>) -> DVector<f64> {
        &self.gravity_const + &self.gravity_sin * q.map(f64::sin) + &self.gravity_cos * q.map(f64::cos)
    }
}
