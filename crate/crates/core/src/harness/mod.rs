//! Verification and benchmarking: exact endpoints of piecewise-constant
//! inputs, random trajectory clouds, containment audits, Monte Carlo volumes
//! and the looseness of simple outer approximations.

mod audit;
mod bench;
mod gap;
mod sampling;
mod schedule;
mod volume;

pub use audit::{containment_audit, CloudReport, DirectionPlan, SupportGap};
pub use bench::{run_bench, BenchReport, Timing};
pub use gap::{
    overapprox_gap, polytope_directions, GapOptions, GapReport, OuterMethod, SupportPolytope,
};
pub use sampling::{random_cloud, random_unit, sample_input, sample_rng};
pub use schedule::{bang_bang_schedule, simulate_endpoint, InputSchedule};
pub use volume::{
    boundary_polygon, bounding_box, mc_volume, mc_volume_joint, shoelace_area, BlockVolume,
    VolumeReport,
};
