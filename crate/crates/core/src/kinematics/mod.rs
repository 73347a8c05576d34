//! Single-leg kinematics: the fitted lift profile, the crank-through-guide
//! linkage, and the trajectory analysis tools used to derive them.

mod export;
mod fit;
mod lift;
mod linkage;
mod smoothing;

use std::f64::consts::TAU;

use thiserror::Error;

pub use export::{write_trajectory_csv, TrajectoryRow, TRAJECTORY_HEADER};
pub use fit::{eval_polynomial, fit_polynomial};
pub use lift::{
    derive_period, LiftProfile, DEFAULT_CONTACT_THRESHOLD_MM, DEFAULT_LIFT_COEFFICIENTS,
    RECURRENCE_TOLERANCE_MM,
};
pub use linkage::{FootPoint, LinkageGeometry};
pub use smoothing::savitzky_golay;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("lift profile has no isolated recurrence in (0, 1000]")]
    NoPeriod,
    #[error("invalid lift profile: {0}")]
    InvalidProfile(String),
    #[error("invalid linkage geometry: {0}")]
    InvalidGeometry(String),
    #[error("crank tip coincides with the guide pivot at angle {0} rad")]
    DegenerateGeometry(f64),
    #[error("bad window: {0}")]
    BadWindow(String),
    #[error("samples are not uniformly spaced (step {index} deviates from mean spacing)")]
    NonUniform { index: usize },
    #[error("design matrix is numerically singular (condition {0:e})")]
    RankDeficient(f64),
    #[error("not enough samples: need more than {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

/// One leg: the lift profile drives height and stance, the linkage drives the
/// horizontal foot travel that propels the body.
///
/// Gait phase is measured in the profile's time-units. The crank angle is
/// aligned so that the linkage's lowest foot point coincides with the lift
/// profile's minimum.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LegModel {
    pub profile: LiftProfile,
    pub geometry: LinkageGeometry,
}

impl LegModel {
    pub fn new(profile: LiftProfile, geometry: LinkageGeometry) -> Self {
        Self { profile, geometry }
    }

    pub fn period(&self) -> f64 {
        self.profile.period()
    }

    pub fn crank_angle(&self, phase: f64) -> f64 {
        let t = self.profile.period();
        self.geometry.bottom_angle() + TAU * (phase - self.profile.stance_center()) / t
    }

    /// Foot point (leg frame) at the given gait phase.
    pub fn foot(&self, phase: f64) -> FootPoint {
        // Valid geometries never degenerate along the crank circle they were checked on.
        self.geometry
            .foot_position(self.crank_angle(phase))
            .unwrap_or(FootPoint { x: 0.0, y: 0.0 })
    }

    pub fn height(&self, phase: f64) -> f64 {
        self.profile.height(phase)
    }

    pub fn in_stance(&self, phase: f64) -> bool {
        self.profile.is_contact(phase)
    }

    /// Horizontal foot travel across one stance window, positive when the foot
    /// sweeps backward under forward crank rotation.
    pub fn stance_stroke(&self) -> f64 {
        let (enter, exit) = self.profile.stance_window();
        self.foot(enter).x - self.foot(exit).x
    }
}
