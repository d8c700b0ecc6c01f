//! Cleaning schedules and their convergence: contraction profiles,
//! traces of `c β_{h_1} ⋯ β_{h_n}` against the balayage, schedules with
//! arbitrarily slow convergence, single-marker updates and the cleaning
//! planner.

mod imitation;
mod planner;
mod run;
mod schedule;
mod slow;
mod tree;

pub use imitation::{imitation_epsilon, single_marker_update};
pub use planner::{
    plan_cleaning, CleaningPlan, PlanStage, PLANNER_DECAY_RATIO, PLANNER_MARKER_CAP, PLANNER_PROBE_HORIZON,
};
pub use run::{contraction_profile, run_scaled_schedule, run_schedule, ConvergenceTrace, TraceRecord};
pub use schedule::{block_repeat, round_robin, ScaledSchedule, Schedule};
pub use slow::{slow_epsilon, slow_schedule, ChainFailure, SlowSchedule};
pub use tree::{adversarial_order, branchwise_order, non_summit_sweep, summit_sweep, SparseDirt, StageBounds, TreeSite};
