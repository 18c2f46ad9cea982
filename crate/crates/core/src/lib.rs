//! Loop-perforated A* path planning for grid-world robot fleets.
//!
//! * [`gridworld`]: occupancy grids, scenario files and the built-in
//!   warehouse and room layouts.
//! * [`planner`]: exact A* and its perforated variants.
//! * [`assignment`]: Hungarian robot-to-task assignment.
//! * [`executor`]: lockstep replay and vertex/swap collision detection.
//! * [`metrics`]: path-length error and expansion-count speedup.
//! * [`harness`]: seeded rate sweeps, collision studies and CSV reports.

pub mod assignment;
pub mod executor;
pub mod gridworld;
pub mod harness;
pub mod metrics;
pub mod planner;
pub mod render;

pub use gridworld::{Cell, GridMap, RobotTask, Scenario};
pub use planner::{PerforationMode, PerforationSpec, PlanOutcome, PlanStatus, Rate};
