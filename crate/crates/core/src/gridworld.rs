//! Occupancy grids, robot tasks and the line-oriented scenario format.
//!
//! A scenario file looks like this:
//!
//! ```text
//! # scenario: demo
//! map 4 3
//! ....
//! .##.
//! ....
//! robot 1 start 0,0 via 3,0 goal 3,2
//! ```
//!
//! Row 0 of the map block is `y = 0`. Lines starting with `#` outside the map
//! block are comments; a leading `# scenario: <name>` comment names the
//! scenario.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

const WAREHOUSE: &str = include_str!("../scenarios/warehouse.txt");
const ROOM: &str = include_str!("../scenarios/room.txt");

const NAME_PREFIX: &str = "# scenario:";

/// A grid coordinate. Ordering is row-major: `y` first, then `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub x: u32,
    pub y: u32,
}

impl Cell {
    pub const fn new(x: u32, y: u32) -> Self {
        Cell { x, y }
    }

    pub fn manhattan(self, other: Cell) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn is_adjacent(self, other: Cell) -> bool {
        self.manhattan(other) == 1
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("invalid grid dimensions {width}x{height}")]
    Dimensions { width: u32, height: u32 },
    #[error("blocked cell {0} is outside the grid")]
    OutOfRange(Cell),
    #[error("grid has no free cell")]
    NoFreeCell,
    #[error("grid has fewer than two mutually reachable free cells")]
    TooFewReachable,
}

/// Rectangular 4-connected occupancy grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: u32,
    height: u32,
    blocked: Vec<bool>,
}

impl GridMap {
    pub fn new(
        width: u32,
        height: u32,
        blocked: impl IntoIterator<Item = Cell>,
    ) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::Dimensions { width, height });
        }
        let mut grid = GridMap {
            width,
            height,
            blocked: vec![false; width as usize * height as usize],
        };
        for cell in blocked {
            if !grid.in_bounds(cell) {
                return Err(GridError::OutOfRange(cell));
            }
            let idx = grid.index(cell);
            grid.blocked[idx] = true;
        }
        if grid.blocked.iter().all(|&b| b) {
            return Err(GridError::NoFreeCell);
        }
        Ok(grid)
    }

    /// An obstacle-free grid.
    pub fn open(width: u32, height: u32) -> Result<Self, GridError> {
        Self::new(width, height, std::iter::empty())
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.blocked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocked.is_empty()
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.x < self.width && cell.y < self.height
    }

    /// Row-major index of an in-bounds cell.
    pub fn index(&self, cell: Cell) -> usize {
        cell.y as usize * self.width as usize + cell.x as usize
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        let w = self.width as usize;
        Cell::new((index % w) as u32, (index / w) as u32)
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        self.in_bounds(cell) && !self.blocked[self.index(cell)]
    }

    pub fn is_blocked(&self, cell: Cell) -> bool {
        self.in_bounds(cell) && self.blocked[self.index(cell)]
    }

    pub fn blocked_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.blocked.len())
            .filter(|&i| self.blocked[i])
            .map(|i| self.cell_at(i))
    }

    pub fn free_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.blocked.len())
            .filter(|&i| !self.blocked[i])
            .map(|i| self.cell_at(i))
    }

    /// Free 4-neighbours in row-major order: up, left, right, down.
    pub fn neighbors(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        let Cell { x, y } = cell;
        let candidates = [
            y.checked_sub(1).map(|y| Cell::new(x, y)),
            x.checked_sub(1).map(|x| Cell::new(x, y)),
            Some(Cell::new(x + 1, y)),
            Some(Cell::new(x, y + 1)),
        ];
        candidates
            .into_iter()
            .flatten()
            .filter(move |&c| self.is_free(c))
    }

    /// Connected-component label per cell (`None` for blocked cells).
    pub fn components(&self) -> Vec<Option<usize>> {
        let mut label = vec![None; self.len()];
        let mut next = 0;
        for seed in 0..self.len() {
            if self.blocked[seed] || label[seed].is_some() {
                continue;
            }
            label[seed] = Some(next);
            let mut queue = VecDeque::from([self.cell_at(seed)]);
            while let Some(cell) = queue.pop_front() {
                for n in self.neighbors(cell) {
                    let i = self.index(n);
                    if label[i].is_none() {
                        label[i] = Some(next);
                        queue.push_back(n);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobotTask {
    pub robot_id: u32,
    pub start: Cell,
    pub waypoints: Vec<Cell>,
    pub goal: Cell,
}

impl RobotTask {
    pub fn new(robot_id: u32, start: Cell, goal: Cell) -> Self {
        RobotTask {
            robot_id,
            start,
            waypoints: Vec::new(),
            goal,
        }
    }

    pub fn with_waypoints(mut self, waypoints: Vec<Cell>) -> Self {
        self.waypoints = waypoints;
        self
    }

    /// Start, waypoints and goal in travel order.
    pub fn stops(&self) -> Vec<Cell> {
        let mut stops = Vec::with_capacity(self.waypoints.len() + 2);
        stops.push(self.start);
        stops.extend_from_slice(&self.waypoints);
        stops.push(self.goal);
        stops
    }

    pub fn validate(&self, grid: &GridMap) -> Result<(), TaskError> {
        let roles = std::iter::once(("start", self.start))
            .chain(self.waypoints.iter().map(|&c| ("waypoint", c)))
            .chain(std::iter::once(("goal", self.goal)));
        for (role, cell) in roles {
            if !grid.in_bounds(cell) {
                return Err(TaskError::OutOfRange {
                    robot: self.robot_id,
                    cell,
                });
            }
            if grid.is_blocked(cell) {
                return Err(TaskError::Blocked {
                    robot: self.robot_id,
                    role,
                    cell,
                });
            }
        }
        if self.start == self.goal && self.waypoints.is_empty() {
            return Err(TaskError::StartIsGoal(self.robot_id));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("robot {robot}: cell {cell} out of range")]
    OutOfRange { robot: u32, cell: Cell },
    #[error("robot {robot}: {role} on blocked cell {cell}")]
    Blocked {
        robot: u32,
        role: &'static str,
        cell: Cell,
    },
    #[error("robot {0}: start equals goal and no waypoints are given")]
    StartIsGoal(u32),
    #[error("duplicate robot id {0}")]
    DuplicateId(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {line}: malformed map header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: malformed map row: {reason}")]
    Row { line: usize, reason: String },
    #[error("line {line}: malformed robot line: {reason}")]
    Robot { line: usize, reason: String },
    #[error("unexpected end of input: expected {expected} map rows, found {found}")]
    Truncated { expected: u32, found: u32 },
    #[error("missing `map <width> <height>` header")]
    MissingHeader,
    #[error("line {line}: {source}")]
    Grid {
        line: usize,
        #[source]
        source: GridError,
    },
    #[error("line {line}: {source}")]
    Task {
        line: usize,
        #[source]
        source: TaskError,
    },
    #[error(transparent)]
    Invalid(#[from] TaskError),
    #[error("unknown built-in scenario `{0}` (expected `warehouse` or `room`)")]
    UnknownBuiltin(String),
}

impl ScenarioError {
    /// Source line of the error, when it came from parsing.
    pub fn line(&self) -> Option<usize> {
        match self {
            ScenarioError::Header { line, .. }
            | ScenarioError::Row { line, .. }
            | ScenarioError::Robot { line, .. }
            | ScenarioError::Grid { line, .. }
            | ScenarioError::Task { line, .. } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub grid: GridMap,
    pub tasks: Vec<RobotTask>,
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        grid: GridMap,
        tasks: Vec<RobotTask>,
    ) -> Result<Self, TaskError> {
        let mut seen = BTreeSet::new();
        for task in &tasks {
            if !seen.insert(task.robot_id) {
                return Err(TaskError::DuplicateId(task.robot_id));
            }
            task.validate(&grid)?;
        }
        Ok(Scenario {
            name: name.into(),
            grid,
            tasks,
        })
    }

    pub fn task(&self, robot_id: u32) -> Option<&RobotTask> {
        self.tasks.iter().find(|t| t.robot_id == robot_id)
    }

    /// Canonical text form; `load_scenario(&s.render()) == Ok(s)`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str(&format!("{NAME_PREFIX} {}\n", self.name));
        }
        out.push_str(&format!("map {} {}\n", self.grid.width, self.grid.height));
        for y in 0..self.grid.height {
            for x in 0..self.grid.width {
                out.push(if self.grid.is_blocked(Cell::new(x, y)) {
                    '#'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        for task in &self.tasks {
            out.push_str(&format!(
                "robot {} start {},{}",
                task.robot_id, task.start.x, task.start.y
            ));
            if !task.waypoints.is_empty() {
                let via: Vec<String> = task
                    .waypoints
                    .iter()
                    .map(|c| format!("{},{}", c.x, c.y))
                    .collect();
                out.push_str(&format!(" via {}", via.join(";")));
            }
            out.push_str(&format!(" goal {},{}\n", task.goal.x, task.goal.y));
        }
        out
    }
}

fn parse_cell(token: &str) -> Option<Cell> {
    let (x, y) = token.split_once(',')?;
    Some(Cell::new(x.trim().parse().ok()?, y.trim().parse().ok()?))
}

fn parse_robot_line(line: usize, text: &str) -> Result<RobotTask, ScenarioError> {
    let err = |reason: &str| ScenarioError::Robot {
        line,
        reason: reason.to_string(),
    };
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let cell = |tok: Option<&&str>| {
        tok.and_then(|t| parse_cell(t))
            .ok_or_else(|| err("expected a cell as `x,y`"))
    };
    if tokens.first() != Some(&"robot") {
        return Err(err("expected `robot`"));
    }
    let robot_id: u32 = tokens
        .get(1)
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err("expected a numeric robot id"))?;
    if tokens.get(2) != Some(&"start") {
        return Err(err("expected `start`"));
    }
    let start = cell(tokens.get(3))?;
    let mut pos = 4;
    let mut waypoints = Vec::new();
    if tokens.get(pos) == Some(&"via") {
        let list = tokens.get(pos + 1).ok_or_else(|| err("empty `via` list"))?;
        for part in list.split(';') {
            waypoints.push(parse_cell(part).ok_or_else(|| err("bad `via` cell"))?);
        }
        pos += 2;
    }
    if tokens.get(pos) != Some(&"goal") {
        return Err(err("expected `goal`"));
    }
    let goal = cell(tokens.get(pos + 1))?;
    if tokens.len() != pos + 2 {
        return Err(err("trailing tokens"));
    }
    Ok(RobotTask {
        robot_id,
        start,
        waypoints,
        goal,
    })
}

/// Parses and validates scenario text.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut name = String::new();

    let (header_line, width, height) = loop {
        let Some((n, raw)) = lines.next() else {
            return Err(ScenarioError::MissingHeader);
        };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(NAME_PREFIX) {
            if name.is_empty() {
                name = rest.trim().to_string();
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let header = |reason: &str| ScenarioError::Header {
            line: n,
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "map" {
            return Err(header("expected `map <width> <height>`"));
        }
        let width: u32 = parts[1].parse().map_err(|_| header("bad width"))?;
        let height: u32 = parts[2].parse().map_err(|_| header("bad height"))?;
        if width == 0 || height == 0 {
            return Err(header("dimensions must be at least 1"));
        }
        break (n, width, height);
    };

    let mut blocked = Vec::new();
    for y in 0..height {
        let Some((n, raw)) = lines.next() else {
            return Err(ScenarioError::Truncated {
                expected: height,
                found: y,
            });
        };
        let row = raw.trim_end_matches('\r');
        if row.chars().count() != width as usize {
            return Err(ScenarioError::Row {
                line: n,
                reason: format!("expected {width} cells, found {}", row.chars().count()),
            });
        }
        for (x, ch) in row.chars().enumerate() {
            match ch {
                '.' => {}
                '#' => blocked.push(Cell::new(x as u32, y)),
                other => {
                    return Err(ScenarioError::Row {
                        line: n,
                        reason: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
    }
    let grid = GridMap::new(width, height, blocked).map_err(|source| ScenarioError::Grid {
        line: header_line,
        source,
    })?;

    let mut tasks: Vec<RobotTask> = Vec::new();
    for (n, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let task = parse_robot_line(n, line)?;
        let at = |source| ScenarioError::Task { line: n, source };
        if tasks.iter().any(|t| t.robot_id == task.robot_id) {
            return Err(at(TaskError::DuplicateId(task.robot_id)));
        }
        task.validate(&grid).map_err(at)?;
        tasks.push(task);
    }

    Ok(Scenario { name, grid, tasks })
}

pub fn builtin_scenario(name: &str) -> Result<Scenario, ScenarioError> {
    match name {
        "warehouse" => load_scenario(WAREHOUSE),
        "room" => load_scenario(ROOM),
        other => Err(ScenarioError::UnknownBuiltin(other.to_string())),
    }
}

/// Raw text of a built-in scenario file.
pub fn builtin_text(name: &str) -> Option<&'static str> {
    match name {
        "warehouse" => Some(WAREHOUSE),
        "room" => Some(ROOM),
        _ => None,
    }
}

/// Draws `n` (start, goal) pairs of distinct, mutually reachable free cells.
///
/// Starts are uniform over free cells that share a component with at least
/// one other cell; goals are uniform over the rest of that component. Fully
/// determined by `seed`.
pub fn random_endpoints(
    grid: &GridMap,
    seed: u64,
    n: usize,
) -> Result<Vec<(Cell, Cell)>, GridError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_endpoints(grid, &mut rng, n)
}

pub(crate) fn sample_endpoints(
    grid: &GridMap,
    rng: &mut impl Rng,
    n: usize,
) -> Result<Vec<(Cell, Cell)>, GridError> {
    let labels = grid.components();
    let mut sizes = Vec::new();
    for label in labels.iter().flatten() {
        if *label >= sizes.len() {
            sizes.resize(label + 1, 0usize);
        }
        sizes[*label] += 1;
    }
    let candidates: Vec<Cell> = grid
        .free_cells()
        .filter(|&c| labels[grid.index(c)].is_some_and(|l| sizes[l] >= 2))
        .collect();
    if candidates.is_empty() {
        return Err(GridError::TooFewReachable);
    }
    let mut pairs = Vec::with_capacity(n);
    while pairs.len() < n {
        let start = candidates[rng.random_range(0..candidates.len())];
        let goal = candidates[rng.random_range(0..candidates.len())];
        // rejection keeps the pair uniform over reachable ordered pairs
        if start != goal && labels[grid.index(start)] == labels[grid.index(goal)] {
            pairs.push((start, goal));
        }
    }
    Ok(pairs)
}
