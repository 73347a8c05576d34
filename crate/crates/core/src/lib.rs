//! Kinematic model of a six-legged walker whose legs are single-DOF crank-link
//! mechanisms driven by continuous-rotation servos.
//!
//! The crate is organised bottom-up:
//!
//! - [`kinematics`]: one leg in isolation (lift profile, linkage, trajectory fitting)
//! - [`gait`]: tripod coordination state machine
//! - [`terrain`]: climb, pebble and load envelopes plus the posture reach model
//! - [`protocol`]: the single-byte teleop wire table
//! - [`sim`]: the time-stepped world, stability check, telemetry and replay

// `!(x <= y)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod gait;
pub mod kinematics;
pub mod protocol;
pub mod robot;
pub mod sim;
pub mod terrain;

pub use gait::{GaitConfig, GaitMode, GaitState, LegId, LegSet, Rank, Side};
pub use kinematics::{FootPoint, LegModel, LiftProfile, LinkageGeometry};
pub use protocol::{Command, DecodeEvent};
pub use robot::RobotSpec;
pub use sim::{RobotState, TelemetrySnapshot, World};
pub use terrain::{Difficulty, Posture, TerrainFeature};
