//! Exact and loop-perforated A* on 4-connected grids.
//!
//! The perforated loop is the open-list expansion loop. Every node drawn from
//! the open list is goal-tested first; a non-goal node whose iteration the
//! schedule drops is closed without generating successors.

mod perforation;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::gridworld::{Cell, GridMap, RobotTask};

pub use perforation::{
    perforation_schedule, Decision, PerforationMode, PerforationSpec, Rate, RateError, TruncateAt,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("{role} {cell} is outside the grid")]
    OutOfRange { role: &'static str, cell: Cell },
    #[error("{role} {cell} is a blocked cell")]
    Blocked { role: &'static str, cell: Cell },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStatus {
    Found,
    /// No path; `leg` is the index of the failing leg (0 for single queries).
    NotFound {
        leg: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanOutcome {
    pub status: PlanStatus,
    /// Empty iff not found.
    pub path: Vec<Cell>,
    /// Executed main-loop iterations.
    pub expansions: u64,
    /// Perforated (dropped) main-loop iterations.
    pub skipped: u64,
}

impl PlanOutcome {
    pub fn is_found(&self) -> bool {
        self.status == PlanStatus::Found
    }

    /// Path length in edges.
    pub fn edges(&self) -> Option<usize> {
        self.is_found().then(|| self.path.len() - 1)
    }
}

/// True if every cell is free and consecutive cells are 4-adjacent.
pub fn path_is_valid(grid: &GridMap, path: &[Cell]) -> bool {
    path.iter().all(|&c| grid.is_free(c)) && path.windows(2).all(|w| w[0].is_adjacent(w[1]))
}

fn check_endpoint(grid: &GridMap, role: &'static str, cell: Cell) -> Result<(), PlanError> {
    if !grid.in_bounds(cell) {
        Err(PlanError::OutOfRange { role, cell })
    } else if grid.is_blocked(cell) {
        Err(PlanError::Blocked { role, cell })
    } else {
        Ok(())
    }
}

/// A* core. `gate(i)` decides iteration `i` of the expansion loop.
fn search(
    grid: &GridMap,
    start: Cell,
    goal: Cell,
    mut gate: impl FnMut(u64) -> Decision,
) -> PlanOutcome {
    let n = grid.len();
    let goal_idx = grid.index(goal);
    let mut g = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    // min-heap on (f, h, row-major index)
    let mut open = BinaryHeap::new();

    let start_idx = grid.index(start);
    let h0 = start.manhattan(goal);
    g[start_idx] = 0;
    open.push(Reverse((h0, h0, start_idx, 0)));

    let mut iteration = 0u64;
    let mut expansions = 0u64;
    let mut skipped = 0u64;

    while let Some(Reverse((_, _, idx, entry_g))) = open.pop() {
        if closed[idx] || entry_g != g[idx] {
            // stale duplicate entry
            continue;
        }
        let i = iteration;
        iteration += 1;
        if idx == goal_idx {
            expansions += 1;
            let mut path = vec![goal];
            let mut cur = idx;
            while cur != start_idx {
                cur = parent[cur];
                path.push(grid.cell_at(cur));
            }
            path.reverse();
            return PlanOutcome {
                status: PlanStatus::Found,
                path,
                expansions,
                skipped,
            };
        }
        if gate(i) == Decision::Skip {
            skipped += 1;
            closed[idx] = true;
            continue;
        }
        expansions += 1;
        let next_g = g[idx] + 1;
        for nb in grid.neighbors(grid.cell_at(idx)) {
            let j = grid.index(nb);
            if closed[j] || next_g >= g[j] {
                continue;
            }
            g[j] = next_g;
            parent[j] = idx;
            let h = nb.manhattan(goal);
            open.push(Reverse((next_g + h, h, j, next_g)));
        }
    }

    PlanOutcome {
        status: PlanStatus::NotFound { leg: 0 },
        path: Vec::new(),
        expansions,
        skipped,
    }
}

/// Shortest 4-connected path with unit costs and a Manhattan heuristic.
pub fn astar_exact(grid: &GridMap, start: Cell, goal: Cell) -> Result<PlanOutcome, PlanError> {
    check_endpoint(grid, "start", start)?;
    check_endpoint(grid, "goal", goal)?;
    Ok(search(grid, start, goal, |_| Decision::Execute))
}

/// A* with its expansion loop gated by `spec`.
///
/// Truncation specs without an extent measure it with an exact run of the same
/// query first; that run is not counted in the returned outcome.
pub fn astar_perforated(
    grid: &GridMap,
    start: Cell,
    goal: Cell,
    spec: &PerforationSpec,
) -> Result<PlanOutcome, PlanError> {
    check_endpoint(grid, "start", start)?;
    check_endpoint(grid, "goal", goal)?;
    if spec.rate.is_zero() {
        return Ok(search(grid, start, goal, |_| Decision::Execute));
    }
    let extent = match spec.mode {
        PerforationMode::Truncation { extent: None, .. } => {
            search(grid, start, goal, |_| Decision::Execute).expansions
        }
        PerforationMode::Truncation {
            extent: Some(m), ..
        } => m,
        _ => 0,
    };
    Ok(search(grid, start, goal, |i| spec.decide(i, extent)))
}

/// Plans start -> waypoints -> goal leg by leg and joins the legs.
pub fn plan_multi_leg(
    grid: &GridMap,
    task: &RobotTask,
    spec: &PerforationSpec,
) -> Result<PlanOutcome, PlanError> {
    let stops = task.stops();
    let mut path: Vec<Cell> = vec![task.start];
    let mut expansions = 0;
    let mut skipped = 0;
    for (leg, pair) in stops.windows(2).enumerate() {
        let out = astar_perforated(grid, pair[0], pair[1], spec)?;
        expansions += out.expansions;
        skipped += out.skipped;
        if !out.is_found() {
            return Ok(PlanOutcome {
                status: PlanStatus::NotFound { leg },
                path: Vec::new(),
                expansions,
                skipped,
            });
        }
        path.extend_from_slice(&out.path[1..]);
    }
    Ok(PlanOutcome {
        status: PlanStatus::Found,
        path,
        expansions,
        skipped,
    })
}
