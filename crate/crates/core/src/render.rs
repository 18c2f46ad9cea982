//! ASCII renders of grids, paths and simulation runs.
//!
//! Legend: `#` blocked, `.` free, `S`/`G` start and goal of a single path,
//! robot trails use the last digit of the robot id, `+` marks cells crossed
//! by several robots and `X` marks collision cells.

use std::collections::BTreeSet;

use crate::executor::SimulationReport;
use crate::gridworld::{Cell, GridMap};

fn base(grid: &GridMap) -> Vec<Vec<char>> {
    (0..grid.height())
        .map(|y| {
            (0..grid.width())
                .map(|x| {
                    if grid.is_blocked(Cell::new(x, y)) {
                        '#'
                    } else {
                        '.'
                    }
                })
                .collect()
        })
        .collect()
}

fn finish(canvas: Vec<Vec<char>>) -> String {
    let mut out = String::new();
    for row in canvas {
        out.extend(row);
        out.push('\n');
    }
    out
}

pub fn render_path(grid: &GridMap, path: &[Cell]) -> String {
    let mut canvas = base(grid);
    for c in path {
        canvas[c.y as usize][c.x as usize] = '*';
    }
    if let (Some(first), Some(last)) = (path.first(), path.last()) {
        canvas[first.y as usize][first.x as usize] = 'S';
        canvas[last.y as usize][last.x as usize] = 'G';
    }
    finish(canvas)
}

pub fn render_simulation(grid: &GridMap, report: &SimulationReport) -> String {
    let mut canvas = base(grid);
    for tl in &report.timelines {
        let mark = char::from_digit(tl.robot_id % 10, 10).unwrap_or('?');
        let cells: BTreeSet<Cell> = tl.positions.iter().copied().collect();
        for c in cells {
            let slot = &mut canvas[c.y as usize][c.x as usize];
            *slot = if *slot == '.' { mark } else { '+' };
        }
    }
    for event in &report.collisions {
        for c in event.cells() {
            canvas[c.y as usize][c.x as usize] = 'X';
        }
    }
    finish(canvas)
}
