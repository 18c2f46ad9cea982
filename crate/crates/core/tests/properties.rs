use proptest::prelude::*;

use perfplan::gridworld::{load_scenario, Scenario};
use perfplan::planner::{
    astar_exact, astar_perforated, path_is_valid, PerforationMode, PerforationSpec, Rate,
    TruncateAt,
};
use perfplan::{Cell, GridMap, RobotTask};

fn grid_strategy() -> impl Strategy<Value = GridMap> {
    (3u32..10, 3u32..10).prop_flat_map(|(w, h)| {
        prop::collection::vec(prop::bool::weighted(0.25), (w * h) as usize).prop_map(move |mask| {
            let blocked = mask
                .iter()
                .enumerate()
                .filter(|(_, b)| **b)
                .map(|(i, _)| Cell::new(i as u32 % w, i as u32 / w));
            GridMap::new(w, h, blocked).unwrap()
        })
    })
}

/// A grid with two distinct free cells picked from it.
fn query_strategy() -> impl Strategy<Value = (GridMap, Cell, Cell)> {
    grid_strategy()
        .prop_filter("needs two free cells", |g| g.free_cells().count() >= 2)
        .prop_flat_map(|g| {
            let n = g.free_cells().count();
            (Just(g), 0..n, 0..n)
        })
        .prop_filter("distinct endpoints", |(_, a, b)| a != b)
        .prop_map(|(g, a, b)| {
            let free: Vec<Cell> = g.free_cells().collect();
            let (s, t) = (free[a], free[b]);
            (g, s, t)
        })
}

fn rate_strategy() -> impl Strategy<Value = Rate> {
    (1u32..12)
        .prop_flat_map(|n| (0..n, Just(n)))
        .prop_map(|(k, n)| Rate::new(k, n).unwrap())
}

fn mode_strategy() -> impl Strategy<Value = PerforationMode> {
    prop_oneof![
        Just(PerforationMode::Modulo),
        Just(PerforationMode::Truncation {
            at: TruncateAt::Head,
            extent: None
        }),
        Just(PerforationMode::Truncation {
            at: TruncateAt::Tail,
            extent: None
        }),
        any::<u64>().prop_map(|seed| PerforationMode::Random { seed }),
    ]
}

fn shifted(grid: &GridMap, dx: u32, dy: u32) -> GridMap {
    let blocked = grid.blocked_cells().map(|c| Cell::new(c.x + dx, c.y + dy));
    GridMap::new(grid.width() + dx, grid.height() + dy, blocked).unwrap()
}

proptest! {
    #[test]
    fn rate_zero_is_exact((g, s, t) in query_strategy(), mode in mode_strategy()) {
        let spec = PerforationSpec { mode, rate: Rate::ZERO };
        prop_assert_eq!(astar_perforated(&g, s, t, &spec).unwrap(), astar_exact(&g, s, t).unwrap());
    }

    #[test]
    fn perforated_plans_are_safe_and_no_shorter(
        (g, s, t) in query_strategy(),
        mode in mode_strategy(),
        rate in rate_strategy(),
    ) {
        let exact = astar_exact(&g, s, t).unwrap();
        let out = astar_perforated(&g, s, t, &PerforationSpec { mode, rate }).unwrap();
        if out.is_found() {
            prop_assert!(path_is_valid(&g, &out.path));
            prop_assert_eq!(out.path.first(), Some(&s));
            prop_assert_eq!(out.path.last(), Some(&t));
            prop_assert!(out.edges() >= exact.edges());
            prop_assert!(out.expansions >= 1);
        } else {
            prop_assert!(out.path.is_empty());
        }
    }

    #[test]
    fn perforated_plans_are_deterministic(
        (g, s, t) in query_strategy(),
        mode in mode_strategy(),
        rate in rate_strategy(),
    ) {
        let spec = PerforationSpec { mode, rate };
        prop_assert_eq!(astar_perforated(&g, s, t, &spec).unwrap(), astar_perforated(&g, s, t, &spec).unwrap());
    }

    #[test]
    fn exact_length_is_symmetric((g, s, t) in query_strategy()) {
        prop_assert_eq!(astar_exact(&g, s, t).unwrap().edges(), astar_exact(&g, t, s).unwrap().edges());
    }

    #[test]
    fn exact_length_survives_translation((g, s, t) in query_strategy(), dx in 0u32..4, dy in 0u32..4) {
        // walled-off padding on the top and left; distances must not change
        let moved = shifted(&g, dx, dy);
        let walled = {
            let border = (0..moved.width())
                .flat_map(|x| (0..moved.height()).map(move |y| Cell::new(x, y)))
                .filter(|c| c.x < dx || c.y < dy);
            GridMap::new(moved.width(), moved.height(), moved.blocked_cells().chain(border)).unwrap()
        };
        let s2 = Cell::new(s.x + dx, s.y + dy);
        let t2 = Cell::new(t.x + dx, t.y + dy);
        prop_assert_eq!(astar_exact(&g, s, t).unwrap().edges(), astar_exact(&walled, s2, t2).unwrap().edges());
    }

    #[test]
    fn scenario_text_round_trips((g, s, t) in query_strategy(), name in "[a-z]{1,8}") {
        let task = RobotTask::new(3, s, t);
        let scenario = Scenario::new(name, g, vec![task]).unwrap();
        let text = scenario.render();
        let back = load_scenario(&text).unwrap();
        prop_assert_eq!(&back, &scenario);
        prop_assert_eq!(back.render(), text);
    }
}
