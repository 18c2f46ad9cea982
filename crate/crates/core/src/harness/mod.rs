//! Seeded benchmark sweeps over perforation rates.
//!
//! [`sweep`] compares exact and perforated A* on a fixed set of random
//! queries per rate. [`collision_study`] replays multi-robot scenarios under
//! each rate and counts trials in which robots run into each other.

mod report;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::executor::{simulate, ExecError, SimulationReport};
use crate::gridworld::{
    random_endpoints, sample_endpoints, Cell, GridError, GridMap, RobotTask, Scenario,
};
use crate::metrics::{aggregate_error, CaseRecord, MetricsError, SKIP_WEIGHT};
use crate::planner::{
    astar_exact, astar_perforated, path_is_valid, PerforationMode, PerforationSpec, PlanError,
    PlanOutcome, Rate,
};

pub use report::{
    emit_reports, parse_collision_csv, parse_sweep_csv, ReportError, ReportFormat, ReportRow,
    COLLISION_HEADER, SWEEP_HEADER, TRACE_HEADER,
};

pub const DEFAULT_CASES: usize = 20;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SWEEP_SEED: u64 = 42;
pub const DEFAULT_COLLISION_SEED: u64 = 2020;
pub const DEFAULT_WALL_REPS: usize = 5;

/// Attempts per trial at drawing tasks whose exact plans are collision-free.
const MAX_TRIAL_DRAWS: usize = 10_000;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("need at least one case")]
    NoCases,
    #[error("need at least one rate")]
    NoRates,
    #[error("collision study needs at least two robots, scenario has {0}")]
    TooFewRobots(usize),
    #[error("scenario tasks are not collision-free under exact planning")]
    UnsafeBaseline,
    #[error("could not draw collision-free exact tasks for trial {0}")]
    TrialSampling(usize),
    #[error("robot {robot} in trial {trial} planned through an obstacle")]
    StaticViolation { trial: usize, robot: u32 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub rates: Vec<Rate>,
    pub n_cases: usize,
    pub seed: u64,
    /// Perforation mode used at every rate.
    pub mode: PerforationMode,
    /// Timed repetitions per run (median is kept); 0 disables timing.
    pub wall_reps: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            rates: Rate::ladder(),
            n_cases: DEFAULT_CASES,
            seed: DEFAULT_SWEEP_SEED,
            mode: PerforationMode::Modulo,
            wall_reps: DEFAULT_WALL_REPS,
        }
    }
}

/// One row of the rate sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rate: Rate,
    pub mean_speedup_wall: Option<f64>,
    pub mean_speedup_proxy: f64,
    pub pct_len_increase: f64,
    pub pct_failed: f64,
    /// `None` when every case failed.
    pub e_p: Option<f64>,
    pub max_increase_pct: Option<f64>,
}

impl SweepRow {
    pub fn rate_decimal(&self) -> f64 {
        self.rate.as_f64()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionRow {
    pub rate: Rate,
    pub n_trials: usize,
    pub pct_collision_trials: f64,
    pub mean_speedup_proxy: f64,
}

fn timed<T>(reps: usize, mut run: impl FnMut() -> T) -> (T, Duration) {
    let out = run();
    if reps == 0 {
        return (out, Duration::ZERO);
    }
    let mut samples: Vec<Duration> = (0..reps)
        .map(|_| {
            let t0 = Instant::now();
            std::hint::black_box(run());
            t0.elapsed()
        })
        .collect();
    samples.sort();
    (out, samples[samples.len() / 2])
}

fn pct(part: usize, whole: usize) -> f64 {
    100.0 * part as f64 / whole as f64
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Per-case records for one rate, in case order.
pub fn sweep_cases(
    grid: &GridMap,
    rate: Rate,
    config: &SweepConfig,
) -> Result<Vec<CaseRecord>, HarnessError> {
    if config.n_cases == 0 {
        return Err(HarnessError::NoCases);
    }
    let spec = PerforationSpec {
        mode: config.mode,
        rate,
    };
    let pairs = random_endpoints(grid, config.seed, config.n_cases)?;
    pairs
        .par_iter()
        .enumerate()
        .map(|(case_id, &(start, goal))| {
            let (exact, exact_wall) = timed(config.wall_reps, || astar_exact(grid, start, goal));
            let exact = exact?;
            let (approx, approx_wall) = timed(config.wall_reps, || {
                astar_perforated(grid, start, goal, &spec)
            });
            let approx = approx?;
            Ok(CaseRecord {
                case_id,
                exact_len: exact.edges().expect("endpoints are mutually reachable"),
                approx_len: approx.edges(),
                exact_expansions: exact.expansions,
                approx_expansions: approx.expansions,
                approx_skipped: approx.skipped,
                exact_wall_time: exact_wall,
                approx_wall_time: approx_wall,
            })
        })
        .collect()
}

fn summarize(rate: Rate, records: &[CaseRecord], timed: bool) -> Result<SweepRow, HarnessError> {
    let n = records.len();
    let proxies = records
        .iter()
        .map(CaseRecord::speedup_proxy)
        .collect::<Result<Vec<_>, _>>()?;
    let mean_speedup_wall = if timed {
        mean(records.iter().filter_map(CaseRecord::speedup_wall))
    } else {
        None
    };
    let (e_p, max_increase_pct, n_increased, n_failed) = match aggregate_error(records) {
        Ok(stats) => (
            Some(stats.e_p),
            Some(stats.max_increase_pct),
            stats.n_increased,
            stats.n_failed,
        ),
        Err(MetricsError::AllFailed) => (None, None, 0, n),
        Err(e) => return Err(e.into()),
    };
    Ok(SweepRow {
        rate,
        mean_speedup_wall,
        mean_speedup_proxy: mean(proxies).unwrap_or(0.0),
        pct_len_increase: pct(n_increased, n),
        pct_failed: pct(n_failed, n),
        e_p,
        max_increase_pct,
    })
}

/// Exact vs perforated A* over `config.n_cases` seeded queries per rate.
///
/// Every column except `mean_speedup_wall` is a deterministic function of
/// `(grid, config)`.
pub fn sweep(grid: &GridMap, config: &SweepConfig) -> Result<Vec<SweepRow>, HarnessError> {
    if config.rates.is_empty() {
        return Err(HarnessError::NoRates);
    }
    config
        .rates
        .iter()
        .map(|&rate| {
            let records = sweep_cases(grid, rate, config)?;
            summarize(rate, &records, config.wall_reps > 0)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionConfig {
    pub rates: Vec<Rate>,
    pub n_trials: usize,
    pub seed: u64,
    pub mode: PerforationMode,
}

impl Default for CollisionConfig {
    fn default() -> Self {
        CollisionConfig {
            rates: vec![
                Rate::new(3, 5).unwrap(),
                Rate::new(3, 4).unwrap(),
                Rate::new(4, 5).unwrap(),
            ],
            n_trials: DEFAULT_TRIALS,
            seed: DEFAULT_COLLISION_SEED,
            mode: PerforationMode::Modulo,
        }
    }
}

/// A trial scenario with its exact-planning baseline.
#[derive(Debug, Clone)]
pub struct Trial {
    pub index: usize,
    pub scenario: Scenario,
    pub baseline: SimulationReport,
}

fn total_work(outcomes: &[(u32, PlanOutcome)]) -> (u64, u64) {
    outcomes
        .iter()
        .fold((0, 0), |(e, s), (_, o)| (e + o.expansions, s + o.skipped))
}

/// Trial 0 is `scenario` itself. Later trials redraw every robot's start and
/// goal (waypoints are kept) until exact planning is collision-free.
pub fn collision_trials(
    scenario: &Scenario,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<Trial>, HarnessError> {
    if scenario.tasks.len() < 2 {
        return Err(HarnessError::TooFewRobots(scenario.tasks.len()));
    }
    if n_trials == 0 {
        return Err(HarnessError::NoCases);
    }
    (0..n_trials)
        .into_par_iter()
        .map(|index| {
            if index == 0 {
                let baseline = simulate(scenario, &PerforationSpec::exact())?;
                if !baseline.is_safe() || !baseline.failures().is_empty() {
                    return Err(HarnessError::UnsafeBaseline);
                }
                return Ok(Trial {
                    index,
                    scenario: scenario.clone(),
                    baseline,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            for _ in 0..MAX_TRIAL_DRAWS {
                let mut candidate = scenario.clone();
                candidate.name = format!("{}#{index}", scenario.name);
                let pairs = sample_endpoints(&scenario.grid, &mut rng, scenario.tasks.len())?;
                for (task, (start, goal)) in candidate.tasks.iter_mut().zip(pairs) {
                    task.start = start;
                    task.goal = goal;
                }
                let distinct = |f: fn(&RobotTask) -> Cell| {
                    let mut cells: Vec<_> = candidate.tasks.iter().map(f).collect();
                    cells.sort();
                    cells.windows(2).all(|w| w[0] != w[1])
                };
                if !distinct(|t| t.start) || !distinct(|t| t.goal) {
                    continue;
                }
                if candidate
                    .tasks
                    .iter()
                    .any(|t| t.validate(&candidate.grid).is_err())
                {
                    continue;
                }
                let baseline = simulate(&candidate, &PerforationSpec::exact())?;
                if baseline.is_safe() && baseline.failures().is_empty() {
                    return Ok(Trial {
                        index,
                        scenario: candidate,
                        baseline,
                    });
                }
            }
            Err(HarnessError::TrialSampling(index))
        })
        .collect()
}

/// Reports for every trial under one spec, each re-checked for obstacle
/// violations.
pub fn run_trials(
    trials: &[Trial],
    spec: &PerforationSpec,
) -> Result<Vec<SimulationReport>, HarnessError> {
    trials
        .par_iter()
        .map(|trial| {
            let report = simulate(&trial.scenario, spec)?;
            for (robot, out) in &report.outcomes {
                if out.is_found() && !path_is_valid(&trial.scenario.grid, &out.path) {
                    return Err(HarnessError::StaticViolation {
                        trial: trial.index,
                        robot: *robot,
                    });
                }
            }
            Ok(report)
        })
        .collect()
}

/// Share of trials with at least one inter-robot collision, per rate.
pub fn collision_study(
    scenario: &Scenario,
    config: &CollisionConfig,
) -> Result<Vec<CollisionRow>, HarnessError> {
    if config.rates.is_empty() {
        return Err(HarnessError::NoRates);
    }
    let trials = collision_trials(scenario, config.n_trials, config.seed)?;
    config
        .rates
        .iter()
        .map(|&rate| {
            let spec = PerforationSpec {
                mode: config.mode,
                rate,
            };
            let reports = run_trials(&trials, &spec)?;
            let colliding = reports.iter().filter(|r| !r.is_safe()).count();
            let proxies = trials.iter().zip(&reports).map(|(trial, report)| {
                let (exact, _) = total_work(&trial.baseline.outcomes);
                let (done, dropped) = total_work(&report.outcomes);
                exact as f64 / (done as f64 + SKIP_WEIGHT * dropped as f64)
            });
            Ok(CollisionRow {
                rate,
                n_trials: trials.len(),
                pct_collision_trials: pct(colliding, trials.len()),
                mean_speedup_proxy: mean(proxies).unwrap_or(0.0),
            })
        })
        .collect()
}
