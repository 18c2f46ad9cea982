//! Discrete-time replay of planned paths and inter-robot collision checks.
//!
//! All robots leave at tick 0 and advance one cell per tick. A robot that has
//! arrived stays on its final cell and can still be hit.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::gridworld::{Cell, Scenario};
use crate::planner::{plan_multi_leg, PerforationSpec, PlanError, PlanOutcome, PlanStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("robot {0}: empty path")]
    EmptyPath(u32),
    #[error("robot {robot}: step {step} jumps from {from} to {to}")]
    NonAdjacent {
        robot: u32,
        step: usize,
        from: Cell,
        to: Cell,
    },
    #[error("robot {robot}: horizon {horizon} is shorter than the path ({edges} edges)")]
    HorizonTooShort {
        robot: u32,
        horizon: usize,
        edges: usize,
    },
    #[error(
        "timelines disagree on horizon: robot {robot} has {len} positions, expected {expected}"
    )]
    HorizonMismatch {
        robot: u32,
        len: usize,
        expected: usize,
    },
    #[error("robot {robot}: {source}")]
    Plan {
        robot: u32,
        #[source]
        source: PlanError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timeline {
    pub robot_id: u32,
    /// `positions[t]` is the cell held during tick `t`.
    pub positions: Vec<Cell>,
}

impl Timeline {
    pub fn horizon(&self) -> usize {
        self.positions.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CollisionKind {
    Vertex,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CollisionCells {
    Vertex(Cell),
    /// Lower-id robot moves `.0 -> .1`, the other robot moves `.1 -> .0`.
    Edge(Cell, Cell),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CollisionEvent {
    pub t: usize,
    /// `(a, b)` with `a < b`.
    pub robots: (u32, u32),
    pub kind: CollisionKind,
    pub cells: CollisionCells,
}

impl CollisionEvent {
    /// Cells to highlight in a render.
    pub fn cells(&self) -> Vec<Cell> {
        match self.cells {
            CollisionCells::Vertex(c) => vec![c],
            CollisionCells::Edge(a, b) => vec![a, b],
        }
    }
}

/// Pads `path` by parking on its last cell until `horizon`.
pub fn path_to_timeline(
    robot_id: u32,
    path: &[Cell],
    horizon: usize,
) -> Result<Timeline, ExecError> {
    let Some(&last) = path.last() else {
        return Err(ExecError::EmptyPath(robot_id));
    };
    for (step, w) in path.windows(2).enumerate() {
        if !w[0].is_adjacent(w[1]) {
            return Err(ExecError::NonAdjacent {
                robot: robot_id,
                step: step + 1,
                from: w[0],
                to: w[1],
            });
        }
    }
    if horizon + 1 < path.len() {
        return Err(ExecError::HorizonTooShort {
            robot: robot_id,
            horizon,
            edges: path.len() - 1,
        });
    }
    let mut positions = path.to_vec();
    positions.resize(horizon + 1, last);
    Ok(Timeline {
        robot_id,
        positions,
    })
}

/// All vertex and swap conflicts, sorted by `(t, robots)`.
pub fn detect_collisions(timelines: &[Timeline]) -> Result<Vec<CollisionEvent>, ExecError> {
    let Some(first) = timelines.first() else {
        return Ok(Vec::new());
    };
    let len = first.positions.len();
    if let Some(bad) = timelines.iter().find(|tl| tl.positions.len() != len) {
        return Err(ExecError::HorizonMismatch {
            robot: bad.robot_id,
            len: bad.positions.len(),
            expected: len,
        });
    }

    let mut events = Vec::new();
    let mut occupants: HashMap<Cell, Vec<usize>> = HashMap::new();
    let mut moves: HashMap<(Cell, Cell), Vec<usize>> = HashMap::new();
    for t in 0..len {
        occupants.clear();
        moves.clear();
        for (k, tl) in timelines.iter().enumerate() {
            occupants.entry(tl.positions[t]).or_default().push(k);
            if t > 0 && tl.positions[t - 1] != tl.positions[t] {
                moves
                    .entry((tl.positions[t - 1], tl.positions[t]))
                    .or_default()
                    .push(k);
            }
        }
        for (&cell, robots) in &occupants {
            for (i, &a) in robots.iter().enumerate() {
                for &b in &robots[i + 1..] {
                    events.push(CollisionEvent {
                        t,
                        robots: ordered(timelines[a].robot_id, timelines[b].robot_id),
                        kind: CollisionKind::Vertex,
                        cells: CollisionCells::Vertex(cell),
                    });
                }
            }
        }
        for (&(from, to), movers) in &moves {
            // each swap is seen from both directions; keep the one starting
            // from the lower robot's side
            let Some(counter) = moves.get(&(to, from)) else {
                continue;
            };
            for &a in movers {
                for &b in counter {
                    let (ida, idb) = (timelines[a].robot_id, timelines[b].robot_id);
                    if ida < idb {
                        events.push(CollisionEvent {
                            t,
                            robots: (ida, idb),
                            kind: CollisionKind::Edge,
                            cells: CollisionCells::Edge(from, to),
                        });
                    }
                }
            }
        }
    }
    events.sort();
    events.dedup();
    Ok(events)
}

fn ordered(a: u32, b: u32) -> (u32, u32) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    /// Per-robot plan, in scenario task order.
    pub outcomes: Vec<(u32, PlanOutcome)>,
    /// Timelines of robots whose plan was found.
    pub timelines: Vec<Timeline>,
    pub collisions: Vec<CollisionEvent>,
    pub makespan: usize,
}

impl SimulationReport {
    /// Robots without a plan, with the failing leg.
    pub fn failures(&self) -> Vec<(u32, usize)> {
        self.outcomes
            .iter()
            .filter_map(|(id, out)| match out.status {
                PlanStatus::NotFound { leg } => Some((*id, leg)),
                PlanStatus::Found => None,
            })
            .collect()
    }

    pub fn is_safe(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Plans every task with `spec`, replays the found paths in lockstep and
/// collects the collisions between them.
pub fn simulate(
    scenario: &Scenario,
    spec: &PerforationSpec,
) -> Result<SimulationReport, ExecError> {
    let outcomes = scenario
        .tasks
        .par_iter()
        .map(|task| {
            plan_multi_leg(&scenario.grid, task, spec)
                .map(|out| (task.robot_id, out))
                .map_err(|source| ExecError::Plan {
                    robot: task.robot_id,
                    source,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let makespan = outcomes
        .iter()
        .filter(|(_, o)| o.is_found())
        .map(|(_, o)| o.path.len() - 1)
        .max()
        .unwrap_or(0);
    let timelines = outcomes
        .iter()
        .filter(|(_, o)| o.is_found())
        .map(|(id, o)| path_to_timeline(*id, &o.path, makespan))
        .collect::<Result<Vec<_>, _>>()?;
    let collisions = detect_collisions(&timelines)?;

    Ok(SimulationReport {
        outcomes,
        timelines,
        collisions,
        makespan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::builtin_scenario;

    fn c(x: u32, y: u32) -> Cell {
        Cell::new(x, y)
    }

    #[test]
    fn stationary_robot() {
        let tl = path_to_timeline(1, &[c(2, 2)], 3).unwrap();
        assert_eq!(tl.positions, vec![c(2, 2); 4]);
    }

    #[test]
    fn exact_fit() {
        let path = [c(0, 0), c(1, 0), c(2, 0), c(2, 1), c(2, 2)];
        assert_eq!(
            path_to_timeline(1, &path, 4).unwrap().positions,
            path.to_vec()
        );
    }

    #[test]
    fn timeline_errors() {
        assert_eq!(path_to_timeline(3, &[], 2), Err(ExecError::EmptyPath(3)));
        assert!(matches!(
            path_to_timeline(1, &[c(0, 0), c(2, 0)], 3),
            Err(ExecError::NonAdjacent { step: 1, .. })
        ));
        assert!(matches!(
            path_to_timeline(1, &[c(0, 0), c(1, 0), c(2, 0)], 1),
            Err(ExecError::HorizonTooShort { .. })
        ));
    }

    #[test]
    fn disjoint_robots() {
        let a = path_to_timeline(1, &[c(0, 0), c(1, 0)], 1).unwrap();
        let b = path_to_timeline(2, &[c(0, 2), c(1, 2)], 1).unwrap();
        assert!(detect_collisions(&[a, b]).unwrap().is_empty());
    }

    #[test]
    fn forced_swap() {
        let a = path_to_timeline(1, &[c(0, 0), c(1, 0)], 1).unwrap();
        let b = path_to_timeline(2, &[c(1, 0), c(0, 0)], 1).unwrap();
        let events = detect_collisions(&[b, a]).unwrap();
        assert_eq!(
            events,
            vec![CollisionEvent {
                t: 1,
                robots: (1, 2),
                kind: CollisionKind::Edge,
                cells: CollisionCells::Edge(c(0, 0), c(1, 0)),
            }]
        );
    }

    #[test]
    fn following_is_not_a_collision() {
        let a = path_to_timeline(1, &[c(1, 0), c(2, 0)], 1).unwrap();
        let b = path_to_timeline(2, &[c(0, 0), c(1, 0)], 1).unwrap();
        assert!(detect_collisions(&[a, b]).unwrap().is_empty());
    }

    #[test]
    fn parked_robot_is_hit() {
        let a = path_to_timeline(1, &[c(3, 1), c(3, 2), c(3, 3)], 5).unwrap();
        let b = path_to_timeline(
            2,
            &[c(0, 3), c(1, 3), c(2, 3), c(2, 4), c(3, 4), c(3, 3)],
            5,
        )
        .unwrap();
        let events = detect_collisions(&[a, b]).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].t, 5);
        assert_eq!(events[0].cells, CollisionCells::Vertex(c(3, 3)));
    }

    #[test]
    fn mismatched_horizons() {
        let a = path_to_timeline(1, &[c(0, 0)], 1).unwrap();
        let b = path_to_timeline(2, &[c(1, 1)], 2).unwrap();
        assert!(matches!(
            detect_collisions(&[a, b]),
            Err(ExecError::HorizonMismatch { robot: 2, .. })
        ));
    }

    #[test]
    fn three_way_pileup() {
        let a = path_to_timeline(1, &[c(1, 0), c(1, 1)], 1).unwrap();
        let b = path_to_timeline(2, &[c(0, 1), c(1, 1)], 1).unwrap();
        let d = path_to_timeline(3, &[c(2, 1), c(1, 1)], 1).unwrap();
        let events = detect_collisions(&[d, b, a]).unwrap();
        let pairs: Vec<_> = events.iter().map(|e| e.robots).collect();
        assert_eq!(pairs, vec![(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn exact_builtins_are_collision_free() {
        for name in ["warehouse", "room"] {
            let s = builtin_scenario(name).unwrap();
            let report = simulate(&s, &PerforationSpec::exact()).unwrap();
            assert!(report.is_safe(), "{name}: {:?}", report.collisions);
            assert!(report.failures().is_empty());
        }
    }

    #[test]
    fn warehouse_replay_parks_at_dock() {
        let s = builtin_scenario("warehouse").unwrap();
        let report = simulate(&s, &PerforationSpec::exact()).unwrap();
        let (_, out) = &report.outcomes[0];
        let arrive = out.path.len() - 1;
        let tl = &report.timelines[0];
        assert_eq!(tl.positions[arrive], c(21, 19));
        assert!(tl.positions[arrive..].iter().all(|&p| p == c(21, 19)));
        assert_eq!(report.makespan, tl.horizon());
    }
}
