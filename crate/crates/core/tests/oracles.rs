mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use perfplan::assignment::{hungarian, CostMatrix};
use perfplan::executor::{detect_collisions, CollisionKind};
use perfplan::gridworld::{builtin_scenario, random_endpoints};
use perfplan::planner::{astar_exact, astar_perforated, path_is_valid, PerforationSpec, Rate};
use perfplan::{Cell, GridMap};

use common::{bfs_distance, brute_force_assignment, brute_force_collisions, collision_fixtures};

fn random_grid(rng: &mut ChaCha8Rng, w: u32, h: u32, density: f64) -> GridMap {
    let blocked: Vec<Cell> = (0..h)
        .flat_map(|y| (0..w).map(move |x| Cell::new(x, y)))
        .filter(|_| rng.random_bool(density))
        .collect();
    GridMap::new(w, h, blocked).unwrap()
}

#[test]
fn exact_lengths_match_bfs_on_builtins() {
    for name in ["warehouse", "room"] {
        let grid = builtin_scenario(name).unwrap().grid;
        for (start, goal) in random_endpoints(&grid, 3, 150).unwrap() {
            let out = astar_exact(&grid, start, goal).unwrap();
            assert_eq!(
                out.edges(),
                bfs_distance(&grid, start, goal),
                "{name} {start}->{goal}"
            );
            assert!(path_is_valid(&grid, &out.path));
        }
    }
}

#[test]
fn exact_matches_bfs_on_cluttered_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let grid = random_grid(&mut rng, 12, 9, 0.3);
        let free: Vec<Cell> = grid.free_cells().collect();
        if free.len() < 2 {
            continue;
        }
        for _ in 0..10 {
            let s = free[rng.random_range(0..free.len())];
            let t = free[rng.random_range(0..free.len())];
            let out = astar_exact(&grid, s, t).unwrap();
            // unreachable goals included: both must say so
            assert_eq!(out.edges(), bfs_distance(&grid, s, t));
            assert_eq!(out.path.is_empty(), !out.is_found());
        }
    }
}

#[test]
fn perforated_paths_never_beat_bfs() {
    let grid = builtin_scenario("warehouse").unwrap().grid;
    let pairs = random_endpoints(&grid, 8, 40).unwrap();
    for rate in Rate::ladder() {
        for seed in [1, 2] {
            for spec in [
                PerforationSpec::modulo(rate),
                PerforationSpec::random(rate, seed),
            ] {
                for &(s, t) in &pairs {
                    let out = astar_perforated(&grid, s, t, &spec).unwrap();
                    if let Some(e) = out.edges() {
                        assert!(e >= bfs_distance(&grid, s, t).unwrap());
                        assert!(path_is_valid(&grid, &out.path));
                    }
                }
            }
        }
    }
}

#[test]
fn hungarian_matches_permutations_small_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=7 {
        for _ in 0..25 {
            // narrow cost range forces many ties
            let costs = (0..n * n).map(|_| rng.random_range(0..6)).collect();
            let m = CostMatrix::new(n, costs).unwrap();
            let (best, first) = brute_force_assignment(&m);
            let a = hungarian(&m);
            assert_eq!(a.total_cost, best);
            assert_eq!(a.mapping, first, "n = {n}");
        }
    }
}

#[test]
fn hungarian_matches_permutations_wide_costs() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let costs = (0..36).map(|_| rng.random_range(0..1_000_000)).collect();
        let m = CostMatrix::new(6, costs).unwrap();
        assert_eq!(hungarian(&m).total_cost, brute_force_assignment(&m).0);
    }
}

#[test]
fn collision_detector_matches_brute_force() {
    let fixtures = collision_fixtures();
    assert!(fixtures.len() >= 50);
    let mut kinds = (0, 0);
    for (k, timelines) in fixtures.iter().enumerate() {
        assert!(timelines[0].horizon() <= 40);
        let fast = detect_collisions(timelines).unwrap();
        assert_eq!(fast, brute_force_collisions(timelines), "fixture {k}");
        kinds.0 += fast
            .iter()
            .filter(|e| e.kind == CollisionKind::Vertex)
            .count();
        kinds.1 += fast
            .iter()
            .filter(|e| e.kind == CollisionKind::Edge)
            .count();
    }
    assert!(kinds.0 > 0 && kinds.1 > 0, "{kinds:?}");
}

#[test]
fn forced_cases_have_expected_kinds() {
    let fixtures = collision_fixtures();
    let swap = detect_collisions(&fixtures[0]).unwrap();
    assert_eq!(swap.len(), 1);
    assert_eq!(swap[0].kind, CollisionKind::Edge);
    assert!(detect_collisions(&fixtures[3]).unwrap().is_empty());
    assert!(detect_collisions(&fixtures[8]).unwrap().is_empty());
    let parked = detect_collisions(&fixtures[4]).unwrap();
    assert_eq!(parked.len(), 1);
    assert_eq!(parked[0].t, 2);
}
