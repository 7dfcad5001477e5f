use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use proptest::prelude::*;

use phaseplan::dynamics::{
    coefficients_at, joint_torque, parametric_torque, phase_to_joint, project_coefficients, DynamicsModel,
};
use phaseplan::path::{JointPath, PolySegment};
use phaseplan::{PlanarTwoLink, PointMass, PolyPath};

fn arm(gravity: f64, viscous: [f64; 2], coulomb: [f64; 2]) -> PlanarTwoLink {
    PlanarTwoLink {
        link_lengths: [0.7, 0.45],
        link_masses: [3.0, 1.6],
        gravity,
        viscous,
        coulomb,
    }
}

/// Euler–Lagrange torque for two point masses at the link tips, built from
/// the arm's geometry alone. Mass matrix from tip Jacobians, velocity terms
/// from Christoffel symbols of finite-differenced `M`, gravity from a
/// finite-differenced potential.
struct Lagrangian {
    l: [f64; 2],
    m: [f64; 2],
    g: f64,
    fv: [f64; 2],
    fc: [f64; 2],
}

impl Lagrangian {
    fn of(a: &PlanarTwoLink) -> Self {
        Self {
            l: a.link_lengths,
            m: a.link_masses,
            g: a.gravity,
            fv: a.viscous,
            fc: a.coulomb,
        }
    }

    fn jacobians(&self, q: Vector2<f64>) -> (Matrix2<f64>, Matrix2<f64>) {
        let [l1, l2] = self.l;
        let (s1, c1) = q[0].sin_cos();
        let (s12, c12) = (q[0] + q[1]).sin_cos();
        let j1 = Matrix2::new(-l1 * s1, 0.0, l1 * c1, 0.0);
        let j2 = Matrix2::new(-l1 * s1 - l2 * s12, -l2 * s12, l1 * c1 + l2 * c12, l2 * c12);
        (j1, j2)
    }

    fn mass(&self, q: Vector2<f64>) -> Matrix2<f64> {
        let (j1, j2) = self.jacobians(q);
        j1.transpose() * j1 * self.m[0] + j2.transpose() * j2 * self.m[1]
    }

    fn potential(&self, q: Vector2<f64>) -> f64 {
        let [l1, l2] = self.l;
        let y1 = l1 * q[0].sin();
        let y2 = y1 + l2 * (q[0] + q[1]).sin();
        self.g * (self.m[0] * y1 + self.m[1] * y2)
    }

    fn kinetic(&self, q: Vector2<f64>, qd: Vector2<f64>) -> f64 {
        0.5 * qd.dot(&(self.mass(q) * qd))
    }

    fn dmass(&self, q: Vector2<f64>, k: usize) -> Matrix2<f64> {
        let h = 1e-5;
        let mut e = Vector2::zeros();
        e[k] = h;
        (self.mass(q + e) - self.mass(q - e)) / (2.0 * h)
    }

    fn torque(&self, q: Vector2<f64>, qd: Vector2<f64>, qdd: Vector2<f64>) -> Vector2<f64> {
        let dm = [self.dmass(q, 0), self.dmass(q, 1)];
        let h = 1e-5;
        let mut tau = self.mass(q) * qdd;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let christoffel = 0.5 * (dm[k][(i, j)] + dm[j][(i, k)] - dm[i][(j, k)]);
                    tau[i] += christoffel * qd[j] * qd[k];
                }
            }
            let mut e = Vector2::zeros();
            e[i] = h;
            tau[i] += (self.potential(q + e) - self.potential(q - e)) / (2.0 * h);
            let sgn = if qd[i] > 0.0 {
                1.0
            } else if qd[i] < 0.0 {
                -1.0
            } else {
                0.0
            };
            tau[i] += self.fv[i] * qd[i] + self.fc[i] * sgn;
        }
        tau
    }
}

fn dv(v: Vector2<f64>) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

fn close(a: &DVector<f64>, b: &DVector<f64>, tol: f64) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0))
}

#[test]
fn two_link_matches_lagrangian_at_reference_state() {
    let (q, qd, qdd) = (Vector2::new(0.3, 0.7), Vector2::new(0.1, -0.2), Vector2::new(1.0, 1.0));
    let unit = PlanarTwoLink::unit();
    let tau = joint_torque(&unit, &dv(q), &dv(qd), &dv(qdd)).unwrap();
    let oracle = dv(Lagrangian::of(&unit).torque(q, qd, qdd));
    assert!(close(&tau, &oracle, 1e-8), "{tau} vs {oracle}");

    let full = arm(9.81, [0.4, 0.2], [0.3, 0.15]);
    let tau = joint_torque(&full, &dv(q), &dv(qd), &dv(qdd)).unwrap();
    let oracle = dv(Lagrangian::of(&full).torque(q, qd, qdd));
    assert!(close(&tau, &oracle, 1e-8), "{tau} vs {oracle}");
}

#[test]
fn scalar_examples() {
    let unit = PointMass::unit();
    let t = joint_torque(&unit, &DVector::from_element(1, 0.0), &DVector::from_element(1, 0.0), &DVector::from_element(1, 2.0)).unwrap();
    assert_eq!(t[0], 2.0);
    let viscous = PointMass {
        mass: 2.0,
        viscous: 0.5,
        ..PointMass::unit()
    };
    let t = joint_torque(&viscous, &DVector::from_element(1, 0.0), &DVector::from_element(1, 3.0), &DVector::from_element(1, 0.0)).unwrap();
    assert_eq!(t[0], 1.5);

    let path = PolyPath::line(&[0.0], &[3.0]).unwrap();
    let co = project_coefficients(&viscous, &path, 0.4).unwrap();
    assert_eq!((co.m[0], co.c[0], co.f[0], co.g[0]), (6.0, 0.0, 1.5, 0.0));
    assert_eq!(parametric_torque(&co, 2.0, 1.0)[0], 9.0);
    assert_eq!(parametric_torque(&co, 0.0, 0.0), co.g);

    let (qd, qdd) = phase_to_joint(&path, 0.2, 2.0, 1.0).unwrap();
    assert_eq!((qd[0], qdd[0]), (6.0, 3.0));
    let (qd, qdd) = phase_to_joint(&path, 0.2, 0.0, 0.0).unwrap();
    assert_eq!((qd[0], qdd[0]), (0.0, 0.0));
    assert!(phase_to_joint(&path, 1.5, 1.0, 0.0).is_err());
}

#[test]
fn straight_line_without_loads_has_no_quadratic_term() {
    let free = arm(0.0, [0.0; 2], [0.0; 2]);
    let path = PolyPath::line(&[0.2, -0.3], &[0.2, -0.3]).unwrap();
    let co = project_coefficients(&free, &path, 0.5).unwrap();
    assert!(co.c.iter().all(|c| *c == 0.0));
    let line = PolyPath::line(&[0.0], &[1.0]).unwrap();
    let co = project_coefficients(&PointMass::unit(), &line, 0.5).unwrap();
    assert_eq!(co.c[0], 0.0);
}

#[test]
fn dimension_mismatch_is_an_input_error() {
    let v1 = DVector::from_element(1, 0.0);
    let v2 = DVector::from_element(2, 0.0);
    assert!(joint_torque(&PlanarTwoLink::unit(), &v2, &v1, &v2).is_err());
}

fn cubic() -> PolyPath {
    PolyPath::new(vec![PolySegment {
        start: 0.0,
        end: 1.0,
        coeffs: vec![vec![-0.2, 1.1, -0.6, 0.9], vec![0.8, -0.5, 1.4, -1.2]],
    }])
    .unwrap()
}

fn cross_route(model: &dyn DynamicsModel, path: &dyn JointPath, s: f64, sdot: f64, sddot: f64) -> (DVector<f64>, DVector<f64>) {
    let co = coefficients_at(model, &path.sample(s).unwrap()).unwrap();
    let via_path = parametric_torque(&co, sdot, sddot);
    let (qd, qdd) = phase_to_joint(path, s, sdot, sddot).unwrap();
    let direct = joint_torque(model, &path.q(s), &qd, &qdd).unwrap();
    (via_path, direct)
}

#[test]
fn cross_route_on_cubic_path() {
    let model = arm(9.81, [0.4, 0.2], [0.3, 0.15]);
    let (a, b) = cross_route(&model, &cubic(), 0.5, 1.3, -0.7);
    assert!(close(&a, &b, 1e-10), "{a} vs {b}");
}

/// Joint accelerations of the free arm under `tau`.
fn forward(model: &PlanarTwoLink, q: Vector2<f64>, qd: Vector2<f64>, tau: Vector2<f64>) -> Vector2<f64> {
    let zero = DVector::zeros(2);
    let bias = joint_torque(model, &dv(q), &dv(qd), &zero).unwrap();
    let mass: DMatrix<f64> = model.mass(&dv(q));
    let rhs = dv(tau) - bias;
    let qdd = mass.lu().solve(&rhs).unwrap();
    Vector2::new(qdd[0], qdd[1])
}

#[test]
fn free_arm_power_balance() {
    let model = arm(0.0, [0.0; 2], [0.0; 2]);
    let oracle = Lagrangian::of(&model);
    for tau in [Vector2::zeros(), Vector2::new(0.8, -0.3)] {
        let (mut q, mut qd) = (Vector2::new(0.3, 0.7), Vector2::new(1.2, -0.9));
        let e0 = oracle.kinetic(q, qd);
        let mut work = 0.0;
        let dt = 1e-3;
        for _ in 0..2000 {
            // RK4 on (q, q̇, W) with W' = τ·q̇.
            let f = |q: Vector2<f64>, qd: Vector2<f64>| (qd, forward(&model, q, qd, tau), tau.dot(&qd));
            let k1 = f(q, qd);
            let k2 = f(q + k1.0 * (dt / 2.0), qd + k1.1 * (dt / 2.0));
            let k3 = f(q + k2.0 * (dt / 2.0), qd + k2.1 * (dt / 2.0));
            let k4 = f(q + k3.0 * dt, qd + k3.1 * dt);
            q += (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * (dt / 6.0);
            qd += (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * (dt / 6.0);
            work += (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2) * (dt / 6.0);
        }
        let drift = oracle.kinetic(q, qd) - e0 - work;
        assert!(drift.abs() < 1e-6, "energy drift {drift} under torque {tau}");
    }
}

proptest! {
    #[test]
    fn lagrangian_agreement(
        q1 in -3.0..3.0f64, q2 in -3.0..3.0f64,
        v1 in -2.0..2.0f64, v2 in -2.0..2.0f64,
        a1 in -5.0..5.0f64, a2 in -5.0..5.0f64,
    ) {
        let model = arm(9.81, [0.4, 0.2], [0.3, 0.15]);
        let (q, qd, qdd) = (Vector2::new(q1, q2), Vector2::new(v1, v2), Vector2::new(a1, a2));
        let tau = joint_torque(&model, &dv(q), &dv(qd), &dv(qdd)).unwrap();
        let oracle = dv(Lagrangian::of(&model).torque(q, qd, qdd));
        prop_assert!(close(&tau, &oracle, 1e-7), "{} vs {}", tau, oracle);
    }

    #[test]
    fn cross_route_identity(s in 0.0..=1.0f64, sdot in 1e-6..4.0f64, sddot in -20.0..20.0f64) {
        let model = arm(9.81, [0.4, 0.2], [0.3, 0.15]);
        let (a, b) = cross_route(&model, &cubic(), s, sdot, sddot);
        prop_assert!(close(&a, &b, 1e-10), "{} vs {}", a, b);
    }

    #[test]
    fn torque_is_affine_in_sddot(s in 0.0..=1.0f64, sdot in 0.0..4.0f64, x in -10.0..10.0f64, y in -10.0..10.0f64) {
        prop_assume!((x - y).abs() > 1e-3);
        let model = arm(9.81, [0.4, 0.2], [0.3, 0.15]);
        let co = project_coefficients(&model, &cubic(), s).unwrap();
        let slope = (parametric_torque(&co, sdot, x) - parametric_torque(&co, sdot, y)) / (x - y);
        prop_assert!(close(&slope, &co.m, 1e-9));
    }

    #[test]
    fn mass_matrix_matches_jacobian_form(q1 in -3.0..3.0f64, q2 in -3.0..3.0f64) {
        let model = arm(9.81, [0.0; 2], [0.0; 2]);
        let q = Vector2::new(q1, q2);
        let m = model.mass(&dv(q));
        let oracle = Lagrangian::of(&model).mass(q);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((m[(i, j)] - oracle[(i, j)]).abs() < 1e-12);
            }
        }
    }
}
