//! Time-stepped kinematic world.
//!
//! [`World`] is the single owner of mutable simulation state. It advances the
//! gait, moves the body by the stance feet's travel, resolves terrain, and
//! tracks static stability. Everything is deterministic: the same world and
//! the same sequence of calls always produce the same telemetry bytes.

mod scenario;
mod script;
mod stability;
mod telemetry;
mod world;

use thiserror::Error;

pub use scenario::Scenario;
pub use script::{run_script, RunOptions, RunOutcome, Script, ScriptRun};
pub use stability::{convex_hull, static_stability, strictly_inside_convex};
pub use telemetry::{write_ndjson, LegTelemetry, TelemetrySnapshot};
pub use world::{RobotState, TerrainSpan, TickReport, World};

/// Wall-clock length of one gait cycle.
pub const DEFAULT_CYCLE_SECONDS: f64 = 1.2;

/// Default integrator step as a fraction of the gait period.
pub const DEFAULT_STEPS_PER_CYCLE: f64 = 100.0;

/// Largest accepted step as a fraction of the gait period.
pub const MAX_STEP_FRACTION: f64 = 1.0 / 20.0;

pub const DEFAULT_SAMPLES_PER_CYCLE: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("time step {dt} outside (0, {max}]")]
    BadTimestep { dt: f64, max: f64 },
    #[error("robot toppled at t = {0}")]
    Toppled(f64),
    #[error("script times must be nondecreasing (line {line})")]
    BadScript { line: usize },
    #[error("invalid world: {0}")]
    InvalidWorld(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
