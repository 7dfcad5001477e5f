#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use phaseplan::oracle::dp_oracle;
use phaseplan::path::BumpPath;
use phaseplan::scenarios::bang_bang;
use phaseplan::{build_grid, ConstraintMode, Constraints, DiscretePath, KinematicLimits, PhaseEnv, PlanarTwoLink};

/// Random two-link instance with `6 ≤ N ≤ 12` and `4 ≤ M ≤ 8` that has at
/// least one rest-to-rest trajectory. `None` when the draw is unusable.
pub fn random_tiny_env(rng: &mut ChaCha8Rng) -> Option<PhaseEnv> {
    let n = rng.random_range(6..=12);
    let m = rng.random_range(4..=8);
    let from = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    let to = [from[0] + rng.random_range(-1.5..1.5), from[1] + rng.random_range(-1.5..1.5)];
    let amp = vec![rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
    let path = BumpPath::new(from.to_vec(), to.to_vec(), amp, rng.random_range(0.3..0.7), rng.random_range(0.1..0.4)).ok()?;
    let model = PlanarTwoLink::unit();
    let dp = DiscretePath::uniform(&model, &path, n).ok()?;
    let tau = [rng.random_range(15.0..40.0), rng.random_range(5.0..20.0)];
    let cons = Constraints::constant(KinematicLimits::velocity_only(&[2.0, 2.5]).unwrap(), &tau).unwrap();
    let grid = build_grid(&dp, &cons, m).ok()?;
    let env = PhaseEnv::new(grid, dp, cons);
    dp_oracle(&env).ok()?;
    Some(env)
}

/// Collects `count` usable instances.
pub fn tiny_instances(rng: &mut ChaCha8Rng, count: usize) -> Vec<PhaseEnv> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        out.extend(random_tiny_env(rng));
    }
    out
}

/// Unit point mass on a straight unit path, `|τ| ≤ 1`, uniform `n` points.
pub fn bang_bang_env(qdot_max: f64, n: usize, m: usize) -> PhaseEnv {
    let p = bang_bang(qdot_max);
    let dp = p.uniform(n).unwrap();
    p.env(&dp, ConstraintMode::Conservative, m).unwrap()
}
