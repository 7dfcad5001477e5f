use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use phaseplan::config::ExperimentConfig;
use phaseplan::discretize::path_stats;
use phaseplan::error::{Error, Result};
use phaseplan::experiment::{emit_tables, run_experiment};
use phaseplan::io::{self, trajectory_table};
use phaseplan::nigm;
use phaseplan::oracle::dp_oracle;
use phaseplan::rl::{train, Algorithm, Prior};
use phaseplan::{ConstraintMode, DiscretePath, PhaseEnv};

#[derive(Parser)]
#[command(name = "phaseplan", version, about = "Time-optimal velocity profiles on a phase-plane grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Selective discretization of the configured path.
    Discretize(DiscretizeArgs),
    /// Forward/backward sweep planner.
    PlanNigm(PlanArgs),
    /// Exact grid optimum by dynamic programming (small grids only).
    Oracle(PlanArgs),
    /// Train the one-step temporal-difference agent.
    TrainIql(TrainArgs),
    /// Train the assignment-update agent.
    TrainIavrl(TrainArgs),
    /// Run the configured studies and write the comparison tables.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Conservative,
    VelocityDependent,
}

impl From<Mode> for ConstraintMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Conservative => ConstraintMode::Conservative,
            Mode::VelocityDependent => ConstraintMode::VelocityDependent,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
struct DiscretizeArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    ds_max: Option<f64>,
    #[arg(long)]
    candidates: Option<usize>,
    /// Points as CSV (`k, s, q_1..q_n`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    config: PathBuf,
    /// Velocity levels; the first `grid.m` entry by default.
    #[arg(long)]
    grid_m: Option<usize>,
    #[arg(long, value_enum, default_value = "velocity-dependent")]
    mode: Mode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    grid_m: Option<usize>,
    #[arg(long)]
    episodes: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "off")]
    prior: OnOff,
    #[arg(long, value_enum, default_value = "velocity-dependent")]
    constraints: Mode,
    #[arg(long, default_value = "train-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `experiment.output_dir`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Skip `timing.json` so that every output is reproducible.
    #[arg(long)]
    no_timing: bool,
}

struct Loaded {
    cfg: ExperimentConfig,
    dp: DiscretePath,
}

fn load(path: &Path) -> Result<Loaded> {
    let cfg = ExperimentConfig::load(path)?;
    let dp = cfg.problem()?.discretize()?;
    Ok(Loaded { cfg, dp })
}

impl Loaded {
    fn grid_m(&self, arg: Option<usize>) -> usize {
        arg.unwrap_or(self.cfg.grid.m[0])
    }

    fn env(&self, mode: ConstraintMode, m: usize) -> Result<PhaseEnv> {
        self.cfg.problem()?.env(&self.dp, mode, m)
    }
}

fn emit(table: io::Table, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => table.write(path),
        None => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush().map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

fn discretize_cmd(a: DiscretizeArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    let d = &mut cfg.discretizer;
    d.eps = a.eps.unwrap_or(d.eps);
    d.sigma = a.sigma.unwrap_or(d.sigma);
    d.ds_max = a.ds_max.unwrap_or(d.ds_max);
    d.candidates = a.candidates.unwrap_or(d.candidates);
    let dp = cfg.problem()?.discretize()?;
    eprintln!("{}", serde_json::to_string(&path_stats(&dp)).expect("stats serialize"));
    emit(io::discretization_table(&dp), a.out.as_deref())
}

fn plan_cmd(a: PlanArgs, exact: bool) -> Result<()> {
    let loaded = load(&a.config)?;
    let mode = a.mode.into();
    let env = loaded.env(mode, loaded.grid_m(a.grid_m))?;
    let traj = if exact { dp_oracle(&env)? } else { nigm::plan(&env)? };
    let full = loaded.cfg.problem()?.constraints_for(ConstraintMode::VelocityDependent);
    let verdicts = traj.violations(&loaded.dp, &full);
    eprintln!("return {} execution time {} s", traj.return_value, traj.exec_time);
    emit(trajectory_table(&traj, &loaded.dp, Some(&verdicts)), a.out.as_deref())
}

fn train_cmd(a: TrainArgs, algo: Algorithm) -> Result<()> {
    let loaded = load(&a.config)?;
    let mode: ConstraintMode = a.constraints.into();
    let m = loaded.grid_m(a.grid_m);
    let env = loaded.env(mode, m)?;
    let mut cfg = loaded.cfg.rl_for(algo);
    cfg.max_episodes = a.episodes.unwrap_or(cfg.max_episodes);
    cfg.rng_seed = a.seed.unwrap_or(cfg.rng_seed);
    let prior = match a.prior {
        OnOff::Off => None,
        OnOff::On => {
            let trajectory = nigm::plan(&loaded.env(ConstraintMode::Conservative, m)?)?;
            let classification = nigm::classify_prior(&trajectory, &loaded.dp, env.constraints());
            Some(Prior {
                trajectory,
                classification,
            })
        }
    };
    let out = train(&env, &cfg, algo, prior.as_ref(), 0)?;
    io::create_dir(&a.out_dir)?;
    io::history_table(&out.history).write(&a.out_dir.join("history.csv"))?;
    if let Some(t) = &out.trajectory {
        let verdicts = t.violations(&loaded.dp, env.constraints());
        trajectory_table(t, &loaded.dp, Some(&verdicts)).write(&a.out_dir.join("trajectory.csv"))?;
    }
    io::write_json(&a.out_dir.join("stats.json"), &out.stats)?;
    println!("{}", serde_json::to_string_pretty(&out.stats).expect("stats serialize"));
    if out.trajectory.is_none() {
        return Err(Error::Infeasible);
    }
    Ok(())
}

fn experiment_cmd(a: ExperimentArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    let e = &mut cfg.experiment;
    e.repetitions = a.repetitions.unwrap_or(e.repetitions);
    e.seed = a.seed.unwrap_or(e.seed);
    if a.no_timing {
        e.record_timing = false;
    }
    if let Some(dir) = a.out_dir {
        e.output_dir = dir;
    }
    cfg.validate()?;
    let started = Instant::now();
    let report = run_experiment(&cfg)?;
    let total = started.elapsed().as_secs_f64();
    let e = &cfg.experiment;
    emit_tables(&report, &e.output_dir, e.record_timing.then_some(total))?;
    let failed = report.records.iter().filter(|r| r.error.is_some()).count();
    eprintln!(
        "{} runs ({} failed) written to {}",
        report.records.len(),
        failed,
        e.output_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors exit with 1; code 2 is reserved for infeasible problems.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Discretize(a) => discretize_cmd(a),
        Command::PlanNigm(a) => plan_cmd(a, false),
        Command::Oracle(a) => plan_cmd(a, true),
        Command::TrainIql(a) => train_cmd(a, Algorithm::Iql),
        Command::TrainIavrl(a) => train_cmd(a, Algorithm::Iavrl),
        Command::Experiment(a) => experiment_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_infeasible() { 2 } else { 1 })
        }
    }
}
