use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use perfplan::assignment::{build_cost_matrix, hungarian};
use perfplan::executor::{simulate, CollisionCells};
use perfplan::gridworld::{builtin_scenario, builtin_text, load_scenario};
use perfplan::harness::{
    collision_study, emit_reports, sweep, CollisionConfig, ReportFormat, SweepConfig,
    DEFAULT_CASES, DEFAULT_COLLISION_SEED, DEFAULT_SWEEP_SEED, DEFAULT_TRIALS, DEFAULT_WALL_REPS,
    TRACE_HEADER,
};
use perfplan::planner::{plan_multi_leg, PerforationMode, PerforationSpec, Rate, TruncateAt};
use perfplan::render::{render_path, render_simulation};
use perfplan::{Cell, Scenario};

/// Loop-perforated A* for multi-robot grid worlds.
#[derive(Debug, Parser)]
#[command(name = "perfplan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan one robot's task and draw the path.
    Plan {
        /// Scenario file or built-in name (warehouse, room).
        scenario: String,
        #[arg(long)]
        robot: u32,
        #[command(flatten)]
        perf: PerfArgs,
    },
    /// Plan every robot, replay the paths and report collisions.
    Simulate {
        scenario: String,
        #[command(flatten)]
        perf: PerfArgs,
        /// Also print the per-tick positions as CSV.
        #[arg(long)]
        trace: bool,
    },
    /// Exact vs perforated A* over seeded random queries, one row per rate.
    Sweep {
        scenario: String,
        /// Comma-separated rates such as `1/5,3/4`; defaults to the full ladder.
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<Rate>>,
        #[arg(long, default_value_t = DEFAULT_CASES)]
        cases: usize,
        #[arg(long, default_value_t = DEFAULT_SWEEP_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Modulo)]
        mode: ModeArg,
        /// Timed repetitions per query; 0 skips wall-clock timing.
        #[arg(long, default_value_t = DEFAULT_WALL_REPS)]
        reps: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Share of re-sampled trials in which perforated plans collide.
    Collisions {
        scenario: String,
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<Rate>>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_COLLISION_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Modulo)]
        mode: ModeArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Assign the scenario's robots to task cells at minimum total path length.
    Assign {
        scenario: String,
        /// Task cells as `x,y;x,y;...`, one per robot.
        #[arg(long)]
        tasks: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Modulo,
    Trunc,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EndArg {
    Head,
    Tail,
}

#[derive(Debug, Args)]
struct PerfArgs {
    /// Perforation rate as `k/n`, `0`, or a ladder decimal like `0.75`.
    #[arg(long, default_value = "0")]
    rate: Rate,
    #[arg(long, value_enum, default_value_t = ModeArg::Modulo)]
    mode: ModeArg,
    /// Seed for random perforation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Which end truncation perforation drops.
    #[arg(long, value_enum, default_value_t = EndArg::Tail)]
    at: EndArg,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
}

fn mode(arg: ModeArg, seed: u64, at: EndArg) -> PerforationMode {
    match arg {
        ModeArg::Modulo => PerforationMode::Modulo,
        ModeArg::Trunc => PerforationMode::Truncation {
            at: match at {
                EndArg::Head => TruncateAt::Head,
                EndArg::Tail => TruncateAt::Tail,
            },
            extent: None,
        },
        ModeArg::Random => PerforationMode::Random { seed },
    }
}

impl PerfArgs {
    fn spec(&self) -> PerforationSpec {
        PerforationSpec {
            mode: mode(self.mode, self.seed, self.at),
            rate: self.rate,
        }
    }
}

/// Reads a scenario file, falling back to the built-in of that name.
fn load(source: &str) -> Result<Scenario> {
    let path = Path::new(source);
    if !path.exists() && builtin_text(source).is_some() {
        return Ok(builtin_scenario(source)?);
    }
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read scenario `{source}`"))?;
    let mut scenario = load_scenario(&text).with_context(|| format!("in {source}"))?;
    if scenario.name.is_empty() {
        if let Some(stem) = path.file_stem() {
            scenario.name = stem.to_string_lossy().into_owned();
        }
    }
    Ok(scenario)
}

fn write_output(text: &str, output: &OutputArgs) -> Result<()> {
    match &output.out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_cells(list: &str) -> Result<Vec<Cell>> {
    list.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (x, y) = pair
                .trim()
                .split_once(',')
                .with_context(|| format!("task `{pair}` is not `x,y`"))?;
            Ok(Cell::new(
                x.trim()
                    .parse()
                    .with_context(|| format!("bad x in `{pair}`"))?,
                y.trim()
                    .parse()
                    .with_context(|| format!("bad y in `{pair}`"))?,
            ))
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Plan {
            scenario,
            robot,
            perf,
        } => {
            let scenario = load(&scenario)?;
            let Some(task) = scenario.task(robot) else {
                bail!("scenario `{}` has no robot {robot}", scenario.name);
            };
            let out = plan_multi_leg(&scenario.grid, task, &perf.spec())?;
            println!(
                "robot {robot} rate {} expansions {} skipped {}",
                perf.rate, out.expansions, out.skipped
            );
            if !out.is_found() {
                println!("no path found");
                return Ok(ExitCode::from(2));
            }
            println!("length {}", out.path.len() - 1);
            let cells: Vec<String> = out.path.iter().map(Cell::to_string).collect();
            println!("path {}", cells.join(" "));
            print!("{}", render_path(&scenario.grid, &out.path));
        }
        Command::Simulate {
            scenario,
            perf,
            trace,
        } => {
            let scenario = load(&scenario)?;
            let report = simulate(&scenario, &perf.spec())?;
            for (id, out) in &report.outcomes {
                match out.edges() {
                    Some(len) => println!("robot {id} length {len} expansions {}", out.expansions),
                    None => println!("robot {id} no path"),
                }
            }
            println!("collisions {}", report.collisions.len());
            for event in &report.collisions {
                let (kind, cells) = match event.cells {
                    CollisionCells::Vertex(c) => ("vertex", c.to_string()),
                    CollisionCells::Edge(a, b) => ("edge", format!("{a}-{b}")),
                };
                println!(
                    "{},{kind},{},{},{cells}",
                    event.t, event.robots.0, event.robots.1
                );
            }
            print!("{}", render_simulation(&scenario.grid, &report));
            if trace {
                println!("{TRACE_HEADER}");
                for t in 0..=report.makespan {
                    for tl in &report.timelines {
                        let c = tl.positions[t];
                        println!("{t},{},{},{}", tl.robot_id, c.x, c.y);
                    }
                }
            }
        }
        Command::Sweep {
            scenario,
            rates,
            cases,
            seed,
            mode: m,
            reps,
            output,
        } => {
            let scenario = load(&scenario)?;
            let config = SweepConfig {
                rates: rates.unwrap_or_else(Rate::ladder),
                n_cases: cases,
                seed,
                mode: mode(m, seed, EndArg::Tail),
                wall_reps: reps,
            };
            let rows = sweep(&scenario.grid, &config)?;
            write_output(&emit_reports(&rows, output.format)?, &output)?;
        }
        Command::Collisions {
            scenario,
            rates,
            trials,
            seed,
            mode: m,
            output,
        } => {
            let scenario = load(&scenario)?;
            let mut config = CollisionConfig {
                n_trials: trials,
                seed,
                mode: mode(m, seed, EndArg::Tail),
                ..CollisionConfig::default()
            };
            if let Some(rates) = rates {
                config.rates = rates;
            }
            let rows = collision_study(&scenario, &config)?;
            write_output(&emit_reports(&rows, output.format)?, &output)?;
        }
        Command::Assign { scenario, tasks } => {
            let scenario = load(&scenario)?;
            let task_cells = parse_cells(&tasks)?;
            let robot_cells: Vec<Cell> = scenario.tasks.iter().map(|t| t.start).collect();
            let costs = build_cost_matrix(&scenario.grid, &robot_cells, &task_cells)?;
            let assignment = hungarian(&costs);
            println!("robot_id,task_index,cost");
            for (robot, &task) in assignment.mapping.iter().enumerate() {
                println!(
                    "{},{task},{}",
                    scenario.tasks[robot].robot_id,
                    costs.get(robot, task)
                );
            }
            eprintln!("total cost {}", assignment.total_cost);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
