//! Reference implementations used as oracles by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use perfplan::assignment::CostMatrix;
use perfplan::executor::{
    path_to_timeline, CollisionCells, CollisionEvent, CollisionKind, Timeline,
};
use perfplan::{Cell, GridMap};

/// Breadth-first shortest distance in edges, `None` when unreachable.
pub fn bfs_distance(grid: &GridMap, start: Cell, goal: Cell) -> Option<usize> {
    let mut dist = vec![usize::MAX; grid.len()];
    let mut queue = VecDeque::from([start]);
    dist[grid.index(start)] = 0;
    while let Some(c) = queue.pop_front() {
        let d = dist[grid.index(c)];
        if c == goal {
            return Some(d);
        }
        for n in grid.neighbors(c) {
            let slot = &mut dist[grid.index(n)];
            if *slot == usize::MAX {
                *slot = d + 1;
                queue.push_back(n);
            }
        }
    }
    None
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

/// Minimum total and the lexicographically smallest optimal mapping.
pub fn brute_force_assignment(cost: &CostMatrix) -> (u64, Vec<usize>) {
    let mut perms = permutations(cost.n());
    perms.sort();
    let total = |p: &[usize]| {
        p.iter()
            .enumerate()
            .map(|(r, &t)| cost.get(r, t))
            .sum::<u64>()
    };
    let best = perms.iter().map(|p| total(p)).min().unwrap();
    let first = perms.into_iter().find(|p| total(p) == best).unwrap();
    (best, first)
}

/// Checks every robot pair at every tick, with no indexing tricks.
pub fn brute_force_collisions(timelines: &[Timeline]) -> Vec<CollisionEvent> {
    let mut events = Vec::new();
    let horizon = timelines[0].positions.len();
    for t in 0..horizon {
        for i in 0..timelines.len() {
            for j in 0..timelines.len() {
                let (a, b) = (&timelines[i], &timelines[j]);
                if a.robot_id >= b.robot_id {
                    continue;
                }
                let (pa, pb) = (&a.positions, &b.positions);
                if pa[t] == pb[t] {
                    events.push(CollisionEvent {
                        t,
                        robots: (a.robot_id, b.robot_id),
                        kind: CollisionKind::Vertex,
                        cells: CollisionCells::Vertex(pa[t]),
                    });
                }
                let moved = t > 0 && pa[t] != pa[t - 1] && pb[t] != pb[t - 1];
                if moved && pa[t] == pb[t - 1] && pb[t] == pa[t - 1] {
                    events.push(CollisionEvent {
                        t,
                        robots: (a.robot_id, b.robot_id),
                        kind: CollisionKind::Edge,
                        cells: CollisionCells::Edge(pa[t - 1], pa[t]),
                    });
                }
            }
        }
    }
    events.sort();
    events
}

pub fn cells(coords: &[(u32, u32)]) -> Vec<Cell> {
    coords.iter().map(|&(x, y)| Cell::new(x, y)).collect()
}

fn random_walk(rng: &mut ChaCha8Rng, grid: &GridMap, steps: usize) -> Vec<Cell> {
    let free: Vec<Cell> = grid.free_cells().collect();
    let mut path = vec![free[rng.random_range(0..free.len())]];
    for _ in 0..steps {
        let here = *path.last().unwrap();
        let next: Vec<Cell> = grid.neighbors(here).collect();
        path.push(next[rng.random_range(0..next.len())]);
    }
    path
}

/// Hand-built conflicts followed by seeded random walks on a 5x5 grid, each
/// fixture a list of 2 or 3 timelines sharing a horizon of at most 40.
pub fn collision_fixtures() -> Vec<Vec<Timeline>> {
    let forced: Vec<Vec<Vec<(u32, u32)>>> = vec![
        // head-on swap in a corridor
        vec![vec![(0, 0), (1, 0)], vec![(1, 0), (0, 0)]],
        // meet in the middle cell
        vec![vec![(0, 0), (1, 0), (2, 0)], vec![(2, 1), (2, 0), (1, 0)]],
        // crossing at an intersection
        vec![vec![(1, 0), (1, 1), (1, 2)], vec![(0, 1), (1, 1), (2, 1)]],
        // follow the leader, never overlapping
        vec![vec![(1, 0), (2, 0), (3, 0)], vec![(0, 0), (1, 0), (2, 0)]],
        // moving into a parked robot
        vec![vec![(2, 2)], vec![(0, 2), (1, 2), (2, 2), (3, 2)]],
        // same start cell
        vec![vec![(0, 0), (0, 1)], vec![(0, 0), (1, 0)]],
        // three robots converge
        vec![
            vec![(1, 0), (1, 1)],
            vec![(0, 1), (1, 1)],
            vec![(2, 1), (1, 1)],
        ],
        // swap plus a bystander
        vec![
            vec![(3, 3), (3, 4)],
            vec![(3, 4), (3, 3)],
            vec![(0, 0), (0, 1)],
        ],
        // rotation on a 2x2 block: no swap, no shared cell
        vec![
            vec![(0, 0), (1, 0)],
            vec![(1, 0), (1, 1)],
            vec![(1, 1), (0, 1)],
        ],
        // swap a tick later than a vertex hit
        vec![
            vec![(0, 0), (1, 0), (2, 0)],
            vec![(0, 1), (1, 1), (1, 0), (1, 1)],
        ],
    ];
    let mut fixtures: Vec<Vec<Timeline>> = forced
        .into_iter()
        .map(|paths| {
            let horizon = paths.iter().map(|p| p.len() - 1).max().unwrap();
            paths
                .iter()
                .enumerate()
                .map(|(k, p)| path_to_timeline(k as u32 + 1, &cells(p), horizon).unwrap())
                .collect()
        })
        .collect();

    let grid = GridMap::new(5, 5, [Cell::new(2, 2)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..60 {
        let robots = 2 + k % 2;
        let paths: Vec<Vec<Cell>> = (0..robots)
            .map(|_| {
                let steps = rng.random_range(0..=40);
                random_walk(&mut rng, &grid, steps)
            })
            .collect();
        let horizon = paths.iter().map(|p| p.len() - 1).max().unwrap();
        // ids out of order so sorting by id is exercised
        let ids = [5u32, 2, 9];
        fixtures.push(
            paths
                .iter()
                .zip(ids)
                .map(|(p, id)| path_to_timeline(id, p, horizon).unwrap())
                .collect(),
        );
    }
    fixtures
}
