//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints its verdict line even when the others pass.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phaseplan::config::ExperimentConfig;
use phaseplan::experiment::{emit_tables, run_experiment};
use phaseplan::grid::{reachable_sdot, segment_time};
use phaseplan::nigm::{classify_prior, plan};
use phaseplan::oracle::dp_oracle;
use phaseplan::rl::{iavrl_update, iql_update, reward, seed_prior, train, EpisodeLog, Outcome, Prior, QTable, Step, TrainOutput};
use phaseplan::scenarios::two_link;
use phaseplan::{Algorithm, ConstraintMode, GridState, RLConfig};

use common::{bang_bang_env, tiny_instances};

/// Result line for one criterion: `Ok(detail)` passes, `Err(detail)` fails.
type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed < Duration::from_secs(limit_s)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn shipped_config() -> ExperimentConfig {
    ExperimentConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/two_link.toml")).unwrap()
}

fn bang_bang_optimum() -> Verdict {
    let started = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (cap, exact) in [(1.0, 2.0), (0.5, 2.5)] {
        let t = plan(&bang_bang_env(cap, 201, 2000)).map_err(|e| e.to_string())?;
        let rel = (t.exec_time - exact) / exact;
        ok &= rel.abs() <= 0.01;
        parts.push(format!("T = {:.4} vs {exact} ({:+.3}%)", t.exec_time, 100.0 * rel));
    }
    let elapsed = started.elapsed();
    ok &= within(elapsed, 5);
    check(ok, format!("{}, {:.2} s", parts.join(", "), elapsed.as_secs_f64()))
}

fn oracle_optimality() -> Verdict {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let envs = tiny_instances(&mut rng, 20);
    let mut exact = 0;
    let mut iql_ok = 0;
    for (i, env) in envs.iter().enumerate() {
        let best = dp_oracle(env).map_err(|e| e.to_string())?;
        // Fixed-point proxy: stop only after a long run of unchanged exploits.
        let cfg = RLConfig {
            max_episodes: 100_000,
            patience: 50_000,
            rng_seed: 1,
            ..RLConfig::default()
        };
        let out = train(env, &cfg, Algorithm::Iavrl, None, i as u64).map_err(|e| e.to_string())?;
        if out.trajectory.as_ref().is_some_and(|t| t.rows == best.rows || t.row_sum() == best.row_sum()) {
            exact += 1;
        }
        let cfg = RLConfig {
            max_episodes: 100_000,
            rng_seed: 1,
            ..RLConfig::default()
        };
        let out = train(env, &cfg, Algorithm::Iql, None, i as u64).map_err(|e| e.to_string())?;
        if out.stats.return_value.is_some_and(|r| r >= 0.95 * best.return_value) {
            iql_ok += 1;
        }
    }
    let elapsed = started.elapsed();
    check(
        exact == envs.len() && iql_ok == envs.len() && within(elapsed, 120),
        format!(
            "IAVRL optimal on {exact}/{n}, IQL at >= 95% on {iql_ok}/{n}, {:.1} s",
            elapsed.as_secs_f64(),
            n = envs.len()
        ),
    )
}

fn refinement_trend() -> Verdict {
    let started = Instant::now();
    let cfg = shipped_config();
    let p = two_link();
    let dp = p.discretize().map_err(|e| e.to_string())?;
    let rl = cfg.rl_for(Algorithm::Iavrl);
    let reps = 3;
    let mut pct = Vec::new();
    for m in [200, 400, 800] {
        let env = p.env(&dp, ConstraintMode::Conservative, m).map_err(|e| e.to_string())?;
        let nigm = plan(&env).map_err(|e| e.to_string())?.return_value;
        let mut sum = 0.0;
        for rep in 0..reps {
            let out = train(&env, &rl, Algorithm::Iavrl, None, rep).map_err(|e| e.to_string())?;
            sum += out.stats.return_value.unwrap_or(0.0);
        }
        pct.push(100.0 * sum / reps as f64 / nigm);
    }
    let elapsed = started.elapsed();
    let ok = pct.windows(2).all(|w| w[1] >= w[0]) && pct[2] >= 97.0 && within(elapsed, 600);
    check(
        ok,
        format!(
            "IAVRL/NIGM = {:.2}% / {:.2}% / {:.2}% at M = 200/400/800, {:.1} s",
            pct[0],
            pct[1],
            pct[2],
            elapsed.as_secs_f64()
        ),
    )
}

/// Ten seeded IAVRL runs with and without the prior on the velocity-dependent
/// problem, shared by the ablation and safety criteria.
struct Ablation {
    with_prior: Vec<TrainOutput>,
    without: Vec<TrainOutput>,
    elapsed: Duration,
}

fn ablation() -> &'static Ablation {
    static RUNS: OnceLock<Ablation> = OnceLock::new();
    RUNS.get_or_init(|| {
        let started = Instant::now();
        let p = two_link();
        let dp = p.discretize().unwrap();
        let env = p.env(&dp, ConstraintMode::VelocityDependent, 200).unwrap();
        let trajectory = plan(&p.env(&dp, ConstraintMode::Conservative, 200).unwrap()).unwrap();
        let classification = classify_prior(&trajectory, &dp, env.constraints());
        let prior = Prior {
            trajectory,
            classification,
        };
        let rl = shipped_config().rl_for(Algorithm::Iavrl);
        let run = |prior: Option<&Prior>| -> Vec<TrainOutput> {
            (0..10).map(|rep| train(&env, &rl, Algorithm::Iavrl, prior, rep).unwrap()).collect()
        };
        let with_prior = run(Some(&prior));
        let without = run(None);
        Ablation {
            with_prior,
            without,
            elapsed: started.elapsed(),
        }
    })
}

fn prior_ablation() -> Verdict {
    let a = ablation();
    let time = |runs: &[TrainOutput]| median(runs.iter().map(|o| o.stats.computation_time_s).collect());
    let first = |runs: &[TrainOutput]| {
        median(
            runs.iter()
                .map(|o| o.stats.first_successful_episode.map_or(f64::INFINITY, |e| e as f64))
                .collect(),
        )
    };
    let (t_on, t_off) = (time(&a.with_prior), time(&a.without));
    let (f_on, f_off) = (first(&a.with_prior), first(&a.without));
    check(
        t_on < t_off && f_on < f_off && within(a.elapsed, 900),
        format!(
            "median time {t_on:.3} s vs {t_off:.3} s, median first success {f_on} vs {f_off}, {:.1} s",
            a.elapsed.as_secs_f64()
        ),
    )
}

fn constraint_safety() -> Verdict {
    let a = ablation();
    let p = two_link();
    let dp = p.discretize().map_err(|e| e.to_string())?;
    let cons = p.constraints_for(ConstraintMode::VelocityDependent);
    let mut worst = 0.0f64;
    let mut audited = 0;
    for out in a.with_prior.iter().chain(&a.without) {
        if let Some(t) = &out.trajectory {
            let audit = t.audit(&dp, &cons);
            worst = worst.max(audit.max_torque_excess).max(audit.max_velocity_excess);
            audited += 1;
        }
    }
    check(
        audited > 0 && worst <= 1e-9,
        format!("{audited} trajectories audited, worst excess {worst:.3e}"),
    )
}

fn formula_examples() -> Verdict {
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut expect = |name: &str, got: f64, want: f64| {
        checked += 1;
        if (got - want).abs() > 1e-12 {
            failures.push(format!("{name}: {got} != {want}"));
        }
    };
    let cfg = RLConfig::default();
    let s = GridState::new(0, 0);

    let mut q = QTable::new(2, 2);
    expect("TD zero start", iql_update(&mut q, s, 1, 1.0, Some(0.0), &cfg), 0.8);
    let td = RLConfig {
        alpha: 0.5,
        gamma: 0.9,
        ..cfg
    };
    q.set(s, 1, 1.0);
    expect("TD step", iql_update(&mut q, s, 1, 2.0, Some(3.0), &td), 2.85);
    q.set(s, 1, 2.0 + 0.9 * 3.0);
    expect("TD fixed point", iql_update(&mut q, s, 1, 2.0, Some(3.0), &td), 2.0 + 0.9 * 3.0);

    expect("reward", reward(0.2, 0.3, false, 1.25), 0.5);
    expect("penalty", reward(0.2, 0.3, true, 1.25), -0.625);
    expect("zero penalty", reward(0.0, 0.0, true, 1.25), 0.0);

    let steps = [(0, 0, 1, 1.0), (1, 1, 2, 0.5), (2, 2, 3, -2.0)]
        .map(|(c, r, a, reward)| Step {
            state: GridState::new(c, r),
            action: a,
            reward,
        })
        .to_vec();
    let log = EpisodeLog {
        steps,
        outcome: Outcome::Violated { step: 2 },
        final_state: GridState::new(3, 3),
        return_value: 0.0,
    };
    let mut q = QTable::new(4, 4);
    iavrl_update(&mut q, &log, &cfg);
    expect("assignment", q.get(GridState::new(0, 0), 1), -0.28);

    let r = reachable_sdot(1.0, 2.0, 0.5);
    expect("reachable velocity", r.sdot, 3f64.sqrt());
    expect("coasting", reachable_sdot(1.3, 0.0, 0.5).sdot, 1.3);
    let stop = reachable_sdot(1.0, -2.0, 0.5);
    expect("full stop", stop.sdot, 0.0);
    expect("full stop flag", f64::from(u8::from(stop.clamped)), 1.0);
    expect("constant speed time", segment_time(2.0, 2.0, 1.0).unwrap(), 0.5);
    expect("start-up time", segment_time(0.0, 2.0, 1.0).unwrap(), 1.0);

    let env = bang_bang_env(1.0, 3, 4);
    let prior = plan(&env).map_err(|e| e.to_string())?;
    let sum = prior.sdot[0] + prior.sdot[1];
    for (algo, verdict, scale) in [
        (Algorithm::Iql, false, 25.0),
        (Algorithm::Iql, true, -25.0),
        (Algorithm::Iavrl, false, 1.0),
        (Algorithm::Iavrl, true, -1.25),
    ] {
        let mut q = QTable::new(env.columns(), env.rows());
        seed_prior(&mut q, &prior, &vec![verdict; prior.len()], algo, &cfg);
        expect(
            &format!("{algo} seed"),
            q.get(GridState::new(0, prior.rows[0]), prior.rows[1]),
            scale * sum,
        );
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{checked} substitution examples exact to 1e-12")
        } else {
            failures.join("; ")
        },
    )
}

fn determinism() -> Verdict {
    let mut cfg = shipped_config();
    cfg.grid.m = vec![100, 200];
    cfg.experiment.study_c_m = Some(vec![100]);
    cfg.experiment.repetitions = 3;
    cfg.experiment.record_timing = false;
    cfg.rl.iql.max_episodes = 2_000;
    cfg.rl.iavrl.max_episodes = 20_000;
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
        emit_tables(&report, d.path(), None).map_err(|e| e.to_string())?;
    }
    let mut names: Vec<String> = std::fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    let differing: Vec<&String> = names
        .iter()
        .filter(|n| std::fs::read(dirs[0].path().join(n)).ok() != std::fs::read(dirs[1].path().join(n)).ok())
        .collect();
    check(
        differing.is_empty() && !names.is_empty(),
        format!("{} CSV files compared, {} differ", names.len(), differing.len()),
    )
}

fn discretization_guard() -> Verdict {
    let p = two_link();
    let selective = p.discretize().map_err(|e| e.to_string())?;
    let uniform = p.uniform(selective.len()).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut ok = true;
    for mode in [ConstraintMode::Conservative, ConstraintMode::VelocityDependent] {
        let overshoot = |dp| -> Result<f64, String> {
            let env = p.env(dp, mode, 400).map_err(|e| e.to_string())?;
            let t = plan(&env).map_err(|e| e.to_string())?;
            t.inter_point_overshoot(dp, p.model.as_ref(), p.path.as_ref(), env.constraints(), 20)
                .map_err(|e| e.to_string())
        };
        let (sel, uni) = (overshoot(&selective)?, overshoot(&uniform)?);
        ok &= sel < uni;
        parts.push(format!("{mode}: {sel:.4} vs {uni:.4}"));
    }
    check(ok, format!("N = {}, {}", selective.len(), parts.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("bang-bang optimum", bang_bang_optimum),
        ("oracle optimality", oracle_optimality),
        ("grid refinement trend", refinement_trend),
        ("prior ablation", prior_ablation),
        ("constraint safety", constraint_safety),
        ("formula examples", formula_examples),
        ("determinism", determinism),
        ("discretization guard", discretization_guard),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
