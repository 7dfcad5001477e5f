//! End-to-end experiment: the discretization comparison (study A), the
//! conservative-constraint comparison against the sweep planner (study B)
//! and the velocity-dependent prior ablation (study C).
//!
//! Every cell × repetition is an independent job run through [`par`], so the
//! output order, and therefore every emitted byte apart from the optional
//! timing file, depends only on the configuration.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::constraints::ConstraintMode;
use crate::discretize::DiscretePath;
use crate::env::PhaseEnv;
use crate::error::Result;
use crate::io::{self, fmt_f64, fmt_opt, Table};
use crate::nigm;
use crate::oracle::dp_oracle;
use crate::par;
use crate::rl::{train, Algorithm, Prior};
use crate::scenarios::Problem;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Study {
    B,
    C,
}

impl std::fmt::Display for Study {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Study::B => "B",
            Study::C => "C",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Planner {
    /// Exhaustive optimum on the same grid.
    Oracle,
    Nigm,
    Rl(Algorithm),
}

impl Planner {
    pub fn label(&self) -> String {
        match self {
            Planner::Oracle => "DP oracle".into(),
            Planner::Nigm => "NIGM".into(),
            Planner::Rl(a) => a.to_string(),
        }
    }
}

/// One repetition of one cell.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub study: Study,
    pub mode: ConstraintMode,
    pub grid_m: usize,
    pub planner: Planner,
    pub prior: Option<bool>,
    pub repetition: usize,
    pub error: Option<String>,
    pub first_successful_episode: Option<u64>,
    pub converged: Option<bool>,
    pub convergence_episode: Option<u64>,
    pub computation_steps: Option<u64>,
    pub return_value: Option<f64>,
    pub execution_time_s: Option<f64>,
    pub episodes: Option<u64>,
    pub successful_episodes: Option<u64>,
    pub exploit_failures: Option<u64>,
    pub wall_time_s: f64,
    pub trajectory: Option<Trajectory>,
    pub history: Vec<(u64, f64)>,
}

impl RunRecord {
    fn new(job: &Job) -> Self {
        Self {
            study: job.study,
            mode: job.mode,
            grid_m: job.grid_m,
            planner: job.planner,
            prior: job.prior,
            repetition: job.rep,
            error: None,
            first_successful_episode: None,
            converged: None,
            convergence_episode: None,
            computation_steps: None,
            return_value: None,
            execution_time_s: None,
            episodes: None,
            successful_episodes: None,
            exploit_failures: None,
            wall_time_s: 0.0,
            trajectory: None,
            history: Vec::new(),
        }
    }

    pub fn key(&self) -> CellKey {
        CellKey {
            study: self.study,
            grid_m: self.grid_m,
            planner: self.planner,
            prior: self.prior,
        }
    }
}

/// Identity of an aggregated cell. The study fixes the constraint mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub study: Study,
    pub grid_m: usize,
    pub planner: Planner,
    pub prior: Option<bool>,
}

/// Means over the repetitions of one cell. Each mean skips repetitions
/// where the quantity is undefined (for instance no successful episode).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub study: Study,
    pub mode: ConstraintMode,
    pub grid_m: usize,
    pub algorithm: String,
    pub prior: Option<bool>,
    pub runs: usize,
    pub failed_runs: usize,
    pub first_successful_episode: Option<f64>,
    pub converged_runs: Option<usize>,
    pub convergence_episode: Option<f64>,
    pub computation_steps: Option<f64>,
    #[serde(rename = "return")]
    pub return_value: Option<f64>,
    pub execution_time_s: Option<f64>,
    #[serde(skip)]
    pub wall_time_s: f64,
    #[serde(skip)]
    pub planner: Planner,
}

impl CellSummary {
    /// `Yes`, `No`, or `k/n` when only some repetitions converged; empty
    /// for the planners.
    pub fn converge_label(&self) -> String {
        match self.converged_runs {
            None => String::new(),
            Some(c) if c == self.runs => "Yes".into(),
            Some(0) => "No".into(),
            Some(c) => format!("{c}/{}", self.runs),
        }
    }
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn summarize(records: &[&RunRecord]) -> CellSummary {
    let first = records[0];
    let is_rl = matches!(first.planner, Planner::Rl(_));
    CellSummary {
        study: first.study,
        mode: first.mode,
        grid_m: first.grid_m,
        algorithm: first.planner.label(),
        prior: first.prior,
        runs: records.len(),
        failed_runs: records.iter().filter(|r| r.error.is_some()).count(),
        first_successful_episode: mean(records.iter().filter_map(|r| r.first_successful_episode.map(|v| v as f64))),
        converged_runs: is_rl.then(|| records.iter().filter(|r| r.converged == Some(true)).count()),
        convergence_episode: mean(records.iter().filter_map(|r| r.convergence_episode.map(|v| v as f64))),
        computation_steps: mean(records.iter().filter_map(|r| r.computation_steps.map(|v| v as f64))),
        return_value: mean(records.iter().filter_map(|r| r.return_value)),
        execution_time_s: mean(records.iter().filter_map(|r| r.execution_time_s)),
        wall_time_s: mean(records.iter().map(|r| r.wall_time_s)).unwrap_or(0.0),
        planner: first.planner,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyARow {
    pub discretization: String,
    pub points: usize,
    pub grid_m: usize,
    pub mode: ConstraintMode,
    #[serde(rename = "return")]
    pub return_value: Option<f64>,
    pub execution_time_s: Option<f64>,
    pub overshoot: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub dp: DiscretePath,
    pub dof: usize,
    /// `(mode, velocity bound per point)`.
    pub limit_curves: Vec<(ConstraintMode, Vec<f64>)>,
    pub study_a: Vec<StudyARow>,
    pub records: Vec<RunRecord>,
    pub cells: Vec<CellSummary>,
}

impl RunReport {
    pub fn cell(&self, study: Study, grid_m: usize, planner: Planner, prior: Option<bool>) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.study == study && c.grid_m == grid_m && c.planner == planner && c.prior == prior)
    }
}

#[derive(Debug, Clone, Copy)]
struct Job {
    study: Study,
    mode: ConstraintMode,
    grid_m: usize,
    planner: Planner,
    prior: Option<bool>,
    rep: usize,
}

/// Environment for one `(mode, M)` pair, plus the prior used by study C.
struct GridContext {
    mode: ConstraintMode,
    grid_m: usize,
    env: std::result::Result<PhaseEnv, String>,
    prior: Option<std::result::Result<Prior, String>>,
}

fn build_jobs(cfg: &ExperimentConfig) -> Vec<Job> {
    let e = &cfg.experiment;
    let mut jobs = Vec::new();
    let push_rl = |jobs: &mut Vec<Job>, study, mode, grid_m, prior: &[Option<bool>]| {
        for &algo in &e.algorithms {
            for &p in prior {
                for rep in 0..e.repetitions {
                    jobs.push(Job {
                        study,
                        mode,
                        grid_m,
                        planner: Planner::Rl(algo),
                        prior: p,
                        rep,
                    });
                }
            }
        }
    };
    if e.study_b {
        let mode = ConstraintMode::Conservative;
        for &m in &cfg.grid.m {
            let planners = if e.oracle {
                vec![Planner::Oracle, Planner::Nigm]
            } else {
                vec![Planner::Nigm]
            };
            for planner in planners {
                jobs.push(Job {
                    study: Study::B,
                    mode,
                    grid_m: m,
                    planner,
                    prior: None,
                    rep: 0,
                });
            }
            push_rl(&mut jobs, Study::B, mode, m, &[None]);
        }
    }
    if e.study_c {
        for &m in cfg.study_c_grids() {
            push_rl(&mut jobs, Study::C, ConstraintMode::VelocityDependent, m, &[Some(true), Some(false)]);
        }
    }
    jobs
}

fn build_contexts(problem: &Problem, dp: &DiscretePath, jobs: &[Job]) -> Vec<GridContext> {
    let mut wanted: Vec<(ConstraintMode, usize, bool)> = Vec::new();
    for job in jobs {
        let with_prior = job.prior == Some(true);
        match wanted.iter_mut().find(|w| w.0 == job.mode && w.1 == job.grid_m) {
            Some(w) => w.2 |= with_prior,
            None => wanted.push((job.mode, job.grid_m, with_prior)),
        }
    }
    wanted
        .into_iter()
        .map(|(mode, grid_m, with_prior)| {
            let env = problem.env(dp, mode, grid_m).map_err(|e| e.to_string());
            let prior = with_prior.then(|| {
                let env = env.as_ref().map_err(Clone::clone)?;
                let cons_env = problem
                    .env(dp, ConstraintMode::Conservative, grid_m)
                    .map_err(|e| e.to_string())?;
                let trajectory = nigm::plan(&cons_env).map_err(|e| format!("prior: {e}"))?;
                let classification = nigm::classify_prior(&trajectory, dp, env.constraints());
                Ok(Prior {
                    trajectory,
                    classification,
                })
            });
            GridContext {
                mode,
                grid_m,
                env,
                prior,
            }
        })
        .collect()
}

fn run_job(cfg: &ExperimentConfig, ctx: &GridContext, job: &Job) -> RunRecord {
    let mut rec = RunRecord::new(job);
    let started = Instant::now();
    let env = match &ctx.env {
        Ok(env) => env,
        Err(e) => {
            rec.error = Some(e.clone());
            return rec;
        }
    };
    let planned = |rec: &mut RunRecord, t: Result<Trajectory>| match t {
        Ok(t) => {
            rec.return_value = Some(t.return_value);
            rec.execution_time_s = Some(t.exec_time);
            rec.trajectory = Some(t);
        }
        Err(e) => rec.error = Some(e.to_string()),
    };
    match job.planner {
        Planner::Oracle => planned(&mut rec, dp_oracle(env)),
        Planner::Nigm => planned(&mut rec, nigm::plan(env)),
        Planner::Rl(algo) => {
            let prior = match (job.prior, &ctx.prior) {
                (Some(true), Some(Ok(p))) => Some(p),
                (Some(true), Some(Err(e))) => {
                    rec.error = Some(e.clone());
                    return rec;
                }
                _ => None,
            };
            match train(env, &cfg.rl_for(algo), algo, prior, job.rep as u64) {
                Ok(out) => {
                    let s = out.stats;
                    rec.first_successful_episode = s.first_successful_episode;
                    rec.converged = Some(s.converged);
                    rec.convergence_episode = s.convergence_episode;
                    rec.computation_steps = Some(s.computation_steps);
                    rec.return_value = s.return_value;
                    rec.execution_time_s = s.execution_time_s;
                    rec.episodes = Some(s.episodes);
                    rec.successful_episodes = Some(s.successful_episodes);
                    rec.exploit_failures = Some(s.exploit_failures);
                    rec.trajectory = out.trajectory;
                    rec.history = out.history;
                    if rec.trajectory.is_none() {
                        rec.error = Some("no successful exploitation".into());
                    }
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
        }
    }
    rec.wall_time_s = started.elapsed().as_secs_f64();
    rec
}

fn study_a(cfg: &ExperimentConfig, problem: &Problem, selective: &DiscretePath) -> Vec<StudyARow> {
    let m = cfg.experiment.study_a_m;
    let uniform = problem.uniform(selective.len());
    let mut rows = Vec::new();
    for (name, dp) in [("selective", Ok(selective.clone())), ("uniform", uniform)] {
        for mode in [ConstraintMode::Conservative, ConstraintMode::VelocityDependent] {
            let mut row = StudyARow {
                discretization: name.into(),
                points: selective.len(),
                grid_m: m,
                mode,
                return_value: None,
                execution_time_s: None,
                overshoot: None,
                error: None,
            };
            let result = dp.as_ref().map_err(|e| e.to_string()).and_then(|dp| {
                let env = problem.env(dp, mode, m).map_err(|e| e.to_string())?;
                let t = nigm::plan(&env).map_err(|e| e.to_string())?;
                let o = t
                    .inter_point_overshoot(
                        dp,
                        problem.model.as_ref(),
                        problem.path.as_ref(),
                        env.constraints(),
                        cfg.experiment.overshoot_samples,
                    )
                    .map_err(|e| e.to_string())?;
                Ok((t, o))
            });
            match result {
                Ok((t, o)) => {
                    row.return_value = Some(t.return_value);
                    row.execution_time_s = Some(t.exec_time);
                    row.overshoot = Some(o);
                }
                Err(e) => row.error = Some(e),
            }
            rows.push(row);
        }
    }
    rows
}

/// Runs every enabled study. Individual failures are recorded in their
/// cells; only a path that cannot be discretized aborts the run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let problem = cfg.problem()?;
    let dp = problem.discretize()?;
    let limit_curves = [ConstraintMode::Conservative, ConstraintMode::VelocityDependent]
        .into_iter()
        .map(|mode| {
            let c = problem.constraints_for(mode);
            (mode, dp.points().iter().map(|p| c.velocity_bound(&p.dq)).collect())
        })
        .collect();
    let study_a = if cfg.experiment.study_a {
        study_a(cfg, &problem, &dp)
    } else {
        Vec::new()
    };
    let jobs = build_jobs(cfg);
    let contexts = build_contexts(&problem, &dp, &jobs);
    let records = par::map_range(jobs.len(), |i| {
        let job = &jobs[i];
        let ctx = contexts
            .iter()
            .find(|c| c.mode == job.mode && c.grid_m == job.grid_m)
            .expect("every job has a context");
        run_job(cfg, ctx, job)
    });
    let mut groups: BTreeMap<(usize, CellKey), Vec<&RunRecord>> = BTreeMap::new();
    let mut order: BTreeMap<CellKey, usize> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let first = *order.entry(r.key()).or_insert(i);
        groups.entry((first, r.key())).or_default().push(r);
    }
    let cells = groups.values().map(|g| summarize(g)).collect();
    Ok(RunReport {
        dof: problem.model.dof(),
        dp,
        limit_curves,
        study_a,
        records,
        cells,
    })
}

fn grid_label(columns: usize, m: usize) -> String {
    format!("{columns}x{m}")
}

fn prior_label(p: Option<bool>) -> String {
    match p {
        Some(true) => "Yes".into(),
        Some(false) => "No".into(),
        None => String::new(),
    }
}

/// `100 · value / base`.
pub fn percent(value: Option<f64>, base: Option<f64>) -> Option<f64> {
    match (value, base) {
        (Some(v), Some(b)) if b != 0.0 => Some(100.0 * v / b),
        _ => None,
    }
}

/// `100 · (base − value) / base`: positive when `value` is smaller.
pub fn reduction(value: Option<f64>, base: Option<f64>) -> Option<f64> {
    match (value, base) {
        (Some(v), Some(b)) if b != 0.0 => Some(100.0 * (b - v) / b),
        _ => None,
    }
}

/// `100 · (value − base) / base`.
pub fn increase(value: Option<f64>, base: Option<f64>) -> Option<f64> {
    reduction(value, base).map(|r| -r)
}

pub const TABLE1_HEADER: [&str; 8] = [
    "Grid",
    "Algorithm",
    "First successful episode",
    "Converge?",
    "Convergence episode",
    "Computation steps",
    "Return",
    "Execution time (s)",
];

pub const TABLE2_HEADER: [&str; 6] = [
    "Grid",
    "Algorithm",
    "Return vs reference (%)",
    "Return vs NIGM (%)",
    "Execution time vs reference (%)",
    "Execution time vs NIGM (%)",
];

pub const TABLE3_HEADER: [&str; 9] = [
    "Grid",
    "Algorithm",
    "Use prior knowledge?",
    "First successful episode",
    "Converge?",
    "Convergence episode",
    "Computation steps",
    "Return",
    "Execution time (s)",
];

pub const TABLE4_HEADER: [&str; 5] = [
    "Grid",
    "Algorithm",
    "Computation steps reduce (%)",
    "Return increase (%)",
    "Execution time reduce (%)",
];

pub const RUNS_HEADER: [&str; 17] = [
    "study",
    "mode",
    "grid_m",
    "algorithm",
    "prior",
    "repetition",
    "status",
    "first_successful_episode",
    "converged",
    "convergence_episode",
    "computation_steps",
    "return",
    "execution_time_s",
    "episodes",
    "successful_episodes",
    "exploit_failures",
    "error",
];

fn stat_cells(c: &CellSummary) -> Vec<String> {
    vec![
        fmt_opt(c.first_successful_episode),
        c.converge_label(),
        fmt_opt(c.convergence_episode),
        fmt_opt(c.computation_steps),
        fmt_opt(c.return_value),
        fmt_opt(c.execution_time_s),
    ]
}

fn rl_algorithms(report: &RunReport, study: Study) -> Vec<Algorithm> {
    let mut algos = Vec::new();
    for c in report.cells.iter().filter(|c| c.study == study) {
        if let Planner::Rl(a) = c.planner {
            if !algos.contains(&a) {
                algos.push(a);
            }
        }
    }
    algos
}

fn grids(report: &RunReport, study: Study) -> Vec<usize> {
    let mut g = Vec::new();
    for c in report.cells.iter().filter(|c| c.study == study) {
        if !g.contains(&c.grid_m) {
            g.push(c.grid_m);
        }
    }
    g
}

pub fn table1(report: &RunReport) -> Table {
    let mut t = Table::new(TABLE1_HEADER);
    let n = report.dp.len();
    for c in report.cells.iter().filter(|c| c.study == Study::B) {
        let mut row = vec![grid_label(n, c.grid_m), c.algorithm.clone()];
        row.extend(stat_cells(c));
        t.push(row);
    }
    t
}

pub fn table2(report: &RunReport) -> Table {
    let mut t = Table::new(TABLE2_HEADER);
    let n = report.dp.len();
    for m in grids(report, Study::B) {
        let get = |p| report.cell(Study::B, m, p, None);
        let reference = get(Planner::Oracle);
        let nigm = get(Planner::Nigm);
        for algo in rl_algorithms(report, Study::B) {
            let Some(c) = get(Planner::Rl(algo)) else { continue };
            let r = |base: Option<&CellSummary>| percent(c.return_value, base.and_then(|b| b.return_value));
            let x = |base: Option<&CellSummary>| percent(c.execution_time_s, base.and_then(|b| b.execution_time_s));
            t.push(vec![
                grid_label(n, m),
                c.algorithm.clone(),
                fmt_opt(r(reference)),
                fmt_opt(r(nigm)),
                fmt_opt(x(reference)),
                fmt_opt(x(nigm)),
            ]);
        }
    }
    t
}

pub fn table3(report: &RunReport) -> Table {
    let mut t = Table::new(TABLE3_HEADER);
    let n = report.dp.len();
    for c in report.cells.iter().filter(|c| c.study == Study::C) {
        let mut row = vec![grid_label(n, c.grid_m), c.algorithm.clone(), prior_label(c.prior)];
        row.extend(stat_cells(c));
        t.push(row);
    }
    t
}

pub fn table4(report: &RunReport) -> Table {
    let mut t = Table::new(TABLE4_HEADER);
    let n = report.dp.len();
    for m in grids(report, Study::C) {
        for algo in rl_algorithms(report, Study::C) {
            let on = report.cell(Study::C, m, Planner::Rl(algo), Some(true));
            let off = report.cell(Study::C, m, Planner::Rl(algo), Some(false));
            let (Some(on), Some(off)) = (on, off) else { continue };
            t.push(vec![
                grid_label(n, m),
                algo.to_string(),
                fmt_opt(reduction(on.computation_steps, off.computation_steps)),
                fmt_opt(increase(on.return_value, off.return_value)),
                fmt_opt(reduction(on.execution_time_s, off.execution_time_s)),
            ]);
        }
    }
    t
}

pub fn runs_table(report: &RunReport) -> Table {
    let mut t = Table::new(RUNS_HEADER);
    for r in &report.records {
        t.push(vec![
            r.study.to_string(),
            r.mode.to_string(),
            r.grid_m.to_string(),
            r.planner.label(),
            prior_label(r.prior),
            r.repetition.to_string(),
            if r.error.is_some() { "failed" } else { "ok" }.into(),
            fmt_opt(r.first_successful_episode),
            fmt_opt(r.converged),
            fmt_opt(r.convergence_episode),
            fmt_opt(r.computation_steps),
            fmt_opt(r.return_value),
            fmt_opt(r.execution_time_s),
            fmt_opt(r.episodes),
            fmt_opt(r.successful_episodes),
            fmt_opt(r.exploit_failures),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    t
}

pub fn study_a_table(report: &RunReport) -> Table {
    let mut t = Table::new([
        "discretization",
        "points",
        "grid_m",
        "mode",
        "return",
        "execution_time_s",
        "overshoot",
        "error",
    ]);
    for r in &report.study_a {
        t.push(vec![
            r.discretization.clone(),
            r.points.to_string(),
            r.grid_m.to_string(),
            r.mode.to_string(),
            fmt_opt(r.return_value),
            fmt_opt(r.execution_time_s),
            fmt_opt(r.overshoot),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    t
}

/// First repetition's trajectory of every cell, one row per point.
pub fn phase_plane_table(report: &RunReport) -> Table {
    let mut header: Vec<String> = ["study", "mode", "grid_m", "algorithm", "prior", "k", "s", "sdot", "sddot"]
        .map(String::from)
        .to_vec();
    header.extend((1..=report.dof).map(|i| format!("tau_{i}")));
    let mut t = Table::new(header);
    for r in report.records.iter().filter(|r| r.repetition == 0) {
        let Some(traj) = &r.trajectory else { continue };
        for k in 0..traj.len() {
            let mut row = vec![
                r.study.to_string(),
                r.mode.to_string(),
                r.grid_m.to_string(),
                r.planner.label(),
                prior_label(r.prior),
                k.to_string(),
                fmt_f64(report.dp.s(k)),
                fmt_f64(traj.sdot[k]),
                fmt_f64(traj.sddot[k]),
            ];
            row.extend(traj.torques[k].iter().map(|x| fmt_f64(*x)));
            t.push(row);
        }
    }
    t
}

pub fn limit_curve_table(report: &RunReport) -> Table {
    let mut header = vec!["k".to_string(), "s".to_string()];
    header.extend(report.limit_curves.iter().map(|(m, _)| format!("sdot_max_{m}")));
    let mut t = Table::new(header);
    for k in 0..report.dp.len() {
        let mut row = vec![k.to_string(), fmt_f64(report.dp.s(k))];
        row.extend(report.limit_curves.iter().map(|(_, v)| fmt_f64(v[k])));
        t.push(row);
    }
    t
}

pub fn history_table(report: &RunReport) -> Table {
    let mut t = Table::new(["study", "mode", "grid_m", "algorithm", "prior", "repetition", "episode", "return"]);
    for r in &report.records {
        for (e, ret) in &r.history {
            t.push(vec![
                r.study.to_string(),
                r.mode.to_string(),
                r.grid_m.to_string(),
                r.planner.label(),
                prior_label(r.prior),
                r.repetition.to_string(),
                e.to_string(),
                fmt_f64(*ret),
            ]);
        }
    }
    t
}

pub const SCHEMA: &str = "\
# Output files

All CSV files have a header row and the fixed column order listed here.
Empty cells mean \"not applicable\" or \"undefined in every repetition\".
Averages skip repetitions where the quantity is undefined.

## table1.csv (conservative constraints, no prior)

Grid, Algorithm, First successful episode, Converge?, Convergence episode,
Computation steps, Return, Execution time (s). One row per planner per grid:
the exhaustive grid optimum (`DP oracle`, used as the reference when the grid
is small enough for it), the sweep planner (`NIGM`) and each learner.

1. First successful episode: index of the first exploration episode that
   reaches or crosses the terminal states.
2. Converge?: whether training stopped because the exploit return stayed
   unchanged for the patience window before the episode cap. `k/n` when
   only k of n repetitions did.
3. Convergence episode: episode at which the final exploit return was first
   obtained, for converged repetitions only.
4. Computation steps: environment transitions taken during training,
   greedy rollouts included. A machine-independent stand-in for wall-clock
   time; measured seconds are in timing.json.
5. Return: sum of pseudo-velocities of the final greedy trajectory.
6. Execution time (s): traversal time of that trajectory.

## table2.csv

Grid, Algorithm, Return vs reference (%), Return vs NIGM (%), Execution time
vs reference (%), Execution time vs NIGM (%). Each entry is 100 × learner /
baseline, computed from the averaged columns of table1.csv.

## table3.csv (velocity-dependent constraints)

Grid, Algorithm, Use prior knowledge?, then the statistics of table1.csv.

## table4.csv

Grid, Algorithm, Computation steps reduce (%), Return increase (%), Execution
time reduce (%). Reductions are 100 × (without − with) / without; the return
increase is 100 × (with − without) / without.

## runs.csv

One row per repetition: study, mode, grid_m, algorithm, prior, repetition,
status, first_successful_episode, converged, convergence_episode,
computation_steps, return, execution_time_s, episodes, successful_episodes,
exploit_failures, error.

## study_a.csv

discretization, points, grid_m, mode, return, execution_time_s, overshoot,
error. The overshoot is the largest torque excess beyond the limits found
when each segment of the sweep-planner trajectory is resampled between grid
points.

## Plot data

- discretization.csv: k, s, q_1..q_n of the selective discretization.
- limit_curve.csv: k, s, and the pseudo-velocity bound under each constraint
  mode.
- phase_plane.csv: study, mode, grid_m, algorithm, prior, k, s, sdot, sddot,
  tau_1..tau_n for the first repetition of every cell.
- history.csv: study, mode, grid_m, algorithm, prior, repetition, episode,
  return, one row per exploitation after a successful episode.

## summary.json, timing.json

summary.json holds the averaged cells. timing.json holds measured
wall-clock seconds per cell and is the only output that varies between
identical runs; it is written only when `record_timing` is set.
";

#[derive(Serialize)]
struct TimingCell {
    study: Study,
    grid_m: usize,
    algorithm: String,
    prior: Option<bool>,
    mean_wall_time_s: f64,
}

#[derive(Serialize)]
struct Timing {
    parallel: bool,
    total_wall_time_s: f64,
    cells: Vec<TimingCell>,
}

/// Writes every table and data file into `dir`.
pub fn emit_tables(report: &RunReport, dir: &Path, total_wall_time_s: Option<f64>) -> Result<()> {
    io::create_dir(dir)?;
    table1(report).write(&dir.join("table1.csv"))?;
    table2(report).write(&dir.join("table2.csv"))?;
    table3(report).write(&dir.join("table3.csv"))?;
    table4(report).write(&dir.join("table4.csv"))?;
    runs_table(report).write(&dir.join("runs.csv"))?;
    study_a_table(report).write(&dir.join("study_a.csv"))?;
    io::discretization_table(&report.dp).write(&dir.join("discretization.csv"))?;
    limit_curve_table(report).write(&dir.join("limit_curve.csv"))?;
    phase_plane_table(report).write(&dir.join("phase_plane.csv"))?;
    history_table(report).write(&dir.join("history.csv"))?;
    io::write_json(&dir.join("summary.json"), &report.cells)?;
    io::write_text(&dir.join("SCHEMA.md"), SCHEMA)?;
    if let Some(total) = total_wall_time_s {
        let timing = Timing {
            parallel: par::is_parallel(),
            total_wall_time_s: total,
            cells: report
                .cells
                .iter()
                .map(|c| TimingCell {
                    study: c.study,
                    grid_m: c.grid_m,
                    algorithm: c.algorithm.clone(),
                    prior: c.prior,
                    mean_wall_time_s: c.wall_time_s,
                })
                .collect(),
        };
        io::write_json(&dir.join("timing.json"), &timing)?;
    }
    Ok(())
}
