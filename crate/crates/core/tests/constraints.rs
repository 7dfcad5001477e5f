use nalgebra::DVector;
use proptest::prelude::*;

use phaseplan::scenarios::knee_motor;
use phaseplan::{Constraints, KinematicLimits, MotorCharacteristic, ParamCoefficients, TorqueLimits};

const SAMPLES: usize = 10_000;

fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

/// Independent piecewise-linear envelope lookup; `None` past the last speed.
fn envelope(points: &[(f64, f64)], speed: f64) -> Option<f64> {
    let (last, _) = *points.last().unwrap();
    if speed > last {
        return None;
    }
    points.windows(2).find_map(|w| {
        let ((w0, t0), (w1, t1)) = (w[0], w[1]);
        (speed >= w0 && speed <= w1).then(|| t0 + (t1 - t0) * (speed - w0) / (w1 - w0))
    })
}

/// Data for a pointwise torque and joint-acceleration test.
struct State {
    co: ParamCoefficients,
    dq: DVector<f64>,
    ddq: DVector<f64>,
    sdot: f64,
    tau: Vec<(f64, f64)>,
    qddot: Vec<(f64, f64)>,
}

impl State {
    fn admits(&self, sddot: f64) -> bool {
        (0..self.dq.len()).all(|i| {
            let t = self.co.m[i] * sddot + self.co.c[i] * self.sdot * self.sdot + self.co.f[i] * self.sdot + self.co.g[i];
            let a = self.dq[i] * sddot + self.ddq[i] * self.sdot * self.sdot;
            let (tl, th) = self.tau[i];
            let (al, ah) = self.qddot[i];
            t >= tl && t <= th && a >= al && a <= ah
        })
    }
}

/// Compares the interval with a uniform sample over a window around it.
fn check_against_samples(cons: &Constraints, st: &State) -> Result<(), String> {
    let interval = cons.accel_bounds(&st.co, &st.dq, &st.ddq, st.sdot);
    let (lo, hi) = if interval.is_empty() {
        (-100.0, 100.0)
    } else {
        let pad = 1.0 + (interval.max - interval.min).abs();
        (interval.min.max(-1e3) - pad, interval.max.min(1e3) + pad)
    };
    for j in 0..=SAMPLES {
        let x = lo + (hi - lo) * j as f64 / SAMPLES as f64;
        let ok = st.admits(x);
        let inside = !interval.is_empty() && x > interval.min && x < interval.max;
        let outside = interval.is_empty() || x < interval.min - 1e-6 || x > interval.max + 1e-6;
        if inside && !ok {
            return Err(format!("s̈ = {x} inside {interval:?} violates the limits"));
        }
        if outside && ok {
            return Err(format!("s̈ = {x} outside {interval:?} satisfies the limits"));
        }
    }
    Ok(())
}

#[test]
fn mixed_sign_inertia_matches_sampling() {
    let cons = Constraints::new(
        KinematicLimits::symmetric(&[5.0, 5.0], &[40.0, 60.0]).unwrap(),
        TorqueLimits::Constant {
            lower: v(&[-4.0, -3.0]),
            upper: v(&[6.0, 3.0]),
        },
    )
    .unwrap();
    let st = State {
        co: ParamCoefficients {
            m: v(&[1.5, -0.8]),
            c: v(&[0.3, 0.9]),
            f: v(&[0.1, -0.2]),
            g: v(&[1.0, -0.5]),
        },
        dq: v(&[0.7, -1.1]),
        ddq: v(&[2.0, 0.5]),
        sdot: 1.2,
        tau: vec![(-4.0, 6.0), (-3.0, 3.0)],
        qddot: vec![(-40.0, 40.0), (-60.0, 60.0)],
    };
    check_against_samples(&cons, &st).unwrap();
    assert!(!cons.accel_bounds(&st.co, &st.dq, &st.ddq, st.sdot).is_empty());
}

fn knee_points(peak: f64, knee: f64, max: f64, tail: f64) -> Vec<(f64, f64)> {
    vec![(0.0, peak), (knee, peak), (max, peak * tail)]
}

#[test]
fn motor_state_on_limit_curve_matches_sampling() {
    let gear = 20.0;
    let motors = vec![knee_motor(2.0, 50.0, 120.0, 0.3, gear).unwrap(), knee_motor(1.0, 60.0, 140.0, 0.3, gear).unwrap()];
    let cons = Constraints::new(KinematicLimits::velocity_only(&[10.0, 10.0]).unwrap(), TorqueLimits::Motors(motors)).unwrap();
    let co = ParamCoefficients {
        m: v(&[3.0, 1.0]),
        c: v(&[1.5, -0.7]),
        f: v(&[0.4, 0.2]),
        g: v(&[8.0, 2.0]),
    };
    let (dq, ddq) = (v(&[0.8, -0.6]), v(&[0.0, 0.0]));
    let tau_at = |sdot: f64| {
        let lim = |pts: Vec<(f64, f64)>, d: f64| envelope(&pts, (d * sdot).abs() * gear).map(|t| (-t * gear, t * gear));
        Some(vec![lim(knee_points(2.0, 50.0, 120.0, 0.3), dq[0])?, lim(knee_points(1.0, 60.0, 140.0, 0.3), dq[1])?])
    };
    // Bisect for the limit curve: the largest ṡ with a nonempty interval.
    let (mut lo, mut hi) = (0.0, 7.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if cons.check_state(&co, &dq, &ddq, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for sdot in [0.0, 0.5 * lo, 0.999 * lo, hi, 0.5 * (hi + 7.0)] {
        let Some(tau) = tau_at(sdot) else {
            assert!(!cons.check_state(&co, &dq, &ddq, sdot));
            continue;
        };
        let st = State {
            co: co.clone(),
            dq: dq.clone(),
            ddq: ddq.clone(),
            sdot,
            tau,
            qddot: vec![(f64::NEG_INFINITY, f64::INFINITY); 2],
        };
        check_against_samples(&cons, &st).unwrap();
        let oracle = (0..=SAMPLES).any(|j| st.admits(-200.0 + 400.0 * j as f64 / SAMPLES as f64));
        let verdict = cons.check_state(&co, &dq, &ddq, sdot);
        if sdot == hi {
            assert!(!verdict);
        } else {
            assert_eq!(verdict, oracle, "ṡ = {sdot}");
        }
    }
}

fn arb_state() -> impl Strategy<Value = (ParamCoefficients, DVector<f64>, DVector<f64>, f64)> {
    let vec2 = |r: f64| prop::collection::vec(-r..r, 2).prop_map(|x| DVector::from_vec(x));
    (vec2(3.0), vec2(2.0), vec2(1.0), vec2(6.0), vec2(2.0), vec2(3.0), 0.0..3.0f64).prop_map(
        |(m, c, f, g, dq, ddq, sdot)| (ParamCoefficients { m, c, f, g }, dq, ddq, sdot),
    )
}

fn motor_constraints() -> (Constraints, Vec<Vec<(f64, f64)>>, f64) {
    let gear = 10.0;
    let pts = vec![knee_points(1.0, 40.0, 100.0, 0.25), knee_points(0.6, 50.0, 120.0, 0.4)];
    let motors = pts
        .iter()
        .map(|p| MotorCharacteristic::new(p.clone(), p[1].0, gear).unwrap())
        .collect();
    let cons = Constraints::new(KinematicLimits::symmetric(&[20.0, 20.0], &[30.0, 30.0]).unwrap(), TorqueLimits::Motors(motors)).unwrap();
    (cons, pts, gear)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn interval_matches_sampling((co, dq, ddq, sdot) in arb_state()) {
        let (cons, pts, gear) = motor_constraints();
        let mut tau = Vec::new();
        for i in 0..2 {
            match envelope(&pts[i], (dq[i] * sdot).abs() * gear) {
                Some(t) => tau.push((-t * gear, t * gear)),
                None => {
                    prop_assert!(cons.accel_bounds(&co, &dq, &ddq, sdot).is_empty());
                    return Ok(());
                }
            }
        }
        let st = State { co, dq, ddq, sdot, tau, qddot: vec![(-30.0, 30.0); 2] };
        prop_assert!(check_against_samples(&cons, &st).is_ok(), "{:?}", check_against_samples(&cons, &st));
    }

    #[test]
    fn conservative_relaxation_contains_full_interval((co, dq, ddq, sdot) in arb_state()) {
        let (cons, _, _) = motor_constraints();
        let full = cons.accel_bounds(&co, &dq, &ddq, sdot);
        let relaxed = cons.conservative().accel_bounds(&co, &dq, &ddq, sdot);
        prop_assert!(relaxed.contains_interval(&full), "{:?} vs {:?}", relaxed, full);
    }

    #[test]
    fn envelope_never_rises_with_speed(dq0 in -2.0..2.0f64, dq1 in -2.0..2.0f64) {
        let (cons, _, _) = motor_constraints();
        let dq = v(&[dq0, dq1]);
        let mut prev = [f64::INFINITY; 2];
        for j in 0..200 {
            let sdot = j as f64 * 0.05;
            let Ok((lo, hi)) = cons.torque_bounds(&(&dq * sdot)) else { break };
            for i in 0..2 {
                prop_assert!(hi[i] <= prev[i]);
                prop_assert_eq!(lo[i], -hi[i]);
                prev[i] = hi[i];
            }
        }
    }

    #[test]
    fn velocity_bound_is_tight(dq0 in -3.0..3.0f64, dq1 in -3.0..3.0f64) {
        let (cons, _, _) = motor_constraints();
        let dq = v(&[dq0, dq1]);
        let bound = cons.velocity_bound(&dq);
        prop_assume!(bound.is_finite());
        // Joint speed cap is min(20, motor max / gear) per joint.
        let caps = [10.0, 12.0];
        let worst = (0..2).map(|i| (dq[i] * bound).abs() / caps[i]).fold(0.0, f64::max);
        prop_assert!((worst - 1.0).abs() < 1e-12);
    }
}

#[test]
fn velocity_bound_sign_rule() {
    let limits = KinematicLimits::new(v(&[-2.0, -4.0]), v(&[2.0, 4.0]), v(&[-1.0, -1.0]), v(&[1.0, 1.0])).unwrap();
    let cons = Constraints::constant(limits, &[1.0, 1.0]).unwrap();
    assert_eq!(cons.velocity_bound(&v(&[1.0, 2.0])), 2.0);
    assert_eq!(cons.velocity_bound(&v(&[-1.0, 2.0])), 2.0);
    assert_eq!(cons.velocity_bound(&v(&[0.0, 2.0])), 2.0);
    assert_eq!(cons.velocity_bound(&v(&[0.0, 0.0])), f64::INFINITY);
}
