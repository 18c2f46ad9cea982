//! One-task-per-robot assignment with the Hungarian method.

use thiserror::Error;

use crate::gridworld::{Cell, GridMap};
use crate::planner::{astar_exact, PlanError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("robot and task lists must be non-empty")]
    Empty,
    #[error("{robots} robots but {tasks} tasks; the matrix must be square")]
    NotSquare { robots: usize, tasks: usize },
    #[error("cost matrix has {len} entries, expected {n}x{n}")]
    Shape { n: usize, len: usize },
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Square matrix of non-negative integer costs, row = robot, column = task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    n: usize,
    costs: Vec<u64>,
}

impl CostMatrix {
    pub fn new(n: usize, costs: Vec<u64>) -> Result<Self, AssignmentError> {
        if n == 0 {
            return Err(AssignmentError::Empty);
        }
        if costs.len() != n * n {
            return Err(AssignmentError::Shape {
                n,
                len: costs.len(),
            });
        }
        Ok(CostMatrix { n, costs })
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self, AssignmentError> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(AssignmentError::NotSquare {
                robots: n,
                tasks: bad.len(),
            });
        }
        Self::new(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, robot: usize, task: usize) -> u64 {
        self.costs[robot * self.n + task]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.costs.chunks(self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    /// `mapping[robot] = task`.
    pub mapping: Vec<usize>,
    pub total_cost: u64,
}

/// Cost recorded for a robot that cannot reach a task: one more than the
/// number of cells, which no simple path can reach.
pub fn unreachable_cost(grid: &GridMap) -> u64 {
    grid.len() as u64 + 1
}

/// Exact A* path lengths from every robot cell to every task cell.
pub fn build_cost_matrix(
    grid: &GridMap,
    robot_cells: &[Cell],
    task_cells: &[Cell],
) -> Result<CostMatrix, AssignmentError> {
    if robot_cells.is_empty() || task_cells.is_empty() {
        return Err(AssignmentError::Empty);
    }
    if robot_cells.len() != task_cells.len() {
        return Err(AssignmentError::NotSquare {
            robots: robot_cells.len(),
            tasks: task_cells.len(),
        });
    }
    let sentinel = unreachable_cost(grid);
    let mut costs = Vec::with_capacity(robot_cells.len() * task_cells.len());
    for &r in robot_cells {
        for &t in task_cells {
            let out = astar_exact(grid, r, t)?;
            costs.push(out.edges().map_or(sentinel, |e| e as u64));
        }
    }
    CostMatrix::new(robot_cells.len(), costs)
}

/// Minimum-cost perfect assignment over `rows x cols` of `cost`, returning
/// `(total, mapping)` with `mapping[i]` an index into `cols`.
fn solve(cost: &CostMatrix, rows: &[usize], cols: &[usize]) -> (u64, Vec<usize>) {
    let n = rows.len();
    if n == 0 {
        return (0, Vec::new());
    }
    let c = |i: usize, j: usize| cost.get(rows[i - 1], cols[j - 1]) as i128;
    let inf = i128::MAX / 4;
    // 1-based potentials; column 0 is the virtual source
    let mut u = vec![0i128; n + 1];
    let mut v = vec![0i128; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut min_to = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = c(i0, j) - u[i0] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut mapping = vec![0; n];
    for j in 1..=n {
        mapping[owner[j] - 1] = j - 1;
    }
    let total = (0..n).map(|i| cost.get(rows[i], cols[mapping[i]])).sum();
    (total, mapping)
}

/// Minimum-cost assignment. Among optimal assignments the lexicographically
/// smallest mapping is returned.
pub fn hungarian(cost: &CostMatrix) -> Assignment {
    let n = cost.n;
    let rows: Vec<usize> = (0..n).collect();
    let (optimum, _) = solve(cost, &rows, &rows);

    // fix robots in order to the smallest task that keeps the optimum reachable
    let mut mapping = Vec::with_capacity(n);
    let mut free_tasks: Vec<usize> = (0..n).collect();
    let mut spent = 0;
    for robot in 0..n {
        let rest_rows: Vec<usize> = (robot + 1..n).collect();
        let chosen = free_tasks
            .iter()
            .position(|&task| {
                let rest_cols: Vec<usize> =
                    free_tasks.iter().copied().filter(|&t| t != task).collect();
                let (rest, _) = solve(cost, &rest_rows, &rest_cols);
                spent + cost.get(robot, task) + rest == optimum
            })
            .expect("some task extends an optimal assignment");
        let task = free_tasks.remove(chosen);
        spent += cost.get(robot, task);
        mapping.push(task);
    }
    Assignment {
        mapping,
        total_cost: optimum,
    }
}
