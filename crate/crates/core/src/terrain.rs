//! Performance envelopes: climb and pebble classes, load capacity, and the
//! coordinated-posture step reach.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::LiftProfile;
use crate::robot::RobotSpec;

pub const EASY_CLIMB_MAX_CM: f64 = 5.0;
pub const DIFFICULT_CLIMB_MAX_CM: f64 = 8.0;
pub const EASY_PEBBLE_MAX_CM: f64 = 3.0;

/// Load anchors: (servo rating kgf·cm, capacity kg).
pub const LOAD_ANCHORS: [(f64, f64); 2] = [(10.0, 2.5), (20.0, 5.0)];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TerrainError {
    #[error("step height {0} cm is negative")]
    NegativeHeight(f64),
    #[error("pebble diameter {0} cm is negative")]
    NegativeDiameter(f64),
    #[error("posture lift {value} mm for {rank} is outside [0, {max}]")]
    PostureOutOfRange {
        rank: &'static str,
        value: f64,
        max: f64,
    },
    #[error("invalid load configuration: {0}")]
    InvalidLoad(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Difficulty {
    Easy,
    Difficult,
    Impossible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TerrainFeature {
    Flat,
    Step { height_cm: f64 },
    Pebbles { diameter_cm: f64 },
    Grass,
}

impl TerrainFeature {
    pub fn validate(&self) -> Result<(), TerrainError> {
        match *self {
            TerrainFeature::Step { height_cm } if !(height_cm >= 0.0) => {
                Err(TerrainError::NegativeHeight(height_cm))
            }
            TerrainFeature::Pebbles { diameter_cm } if !(diameter_cm >= 0.0) => {
                Err(TerrainError::NegativeDiameter(diameter_cm))
            }
            _ => Ok(()),
        }
    }

    /// Difficulty of crossing the feature at all. Grass walks like flat ground.
    pub fn difficulty(&self) -> Result<Difficulty, TerrainError> {
        match *self {
            TerrainFeature::Flat | TerrainFeature::Grass => Ok(Difficulty::Easy),
            TerrainFeature::Step { height_cm } => climb_class(height_cm),
            TerrainFeature::Pebbles { diameter_cm } => pebble_class(diameter_cm),
        }
    }
}

impl fmt::Display for TerrainFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TerrainFeature::Flat => f.write_str("flat"),
            TerrainFeature::Grass => f.write_str("grass"),
            TerrainFeature::Step { height_cm } => write!(f, "step:{height_cm}cm"),
            TerrainFeature::Pebbles { diameter_cm } => write!(f, "pebbles:{diameter_cm}cm"),
        }
    }
}

/// Upper band edges are inclusive on the easier class: 5 cm is easy, 8 cm is difficult.
pub fn climb_class(height_cm: f64) -> Result<Difficulty, TerrainError> {
    if !(height_cm >= 0.0) {
        return Err(TerrainError::NegativeHeight(height_cm));
    }
    Ok(if height_cm <= EASY_CLIMB_MAX_CM {
        Difficulty::Easy
    } else if height_cm <= DIFFICULT_CLIMB_MAX_CM {
        Difficulty::Difficult
    } else {
        Difficulty::Impossible
    })
}

pub fn pebble_class(diameter_cm: f64) -> Result<Difficulty, TerrainError> {
    if !(diameter_cm >= 0.0) {
        return Err(TerrainError::NegativeDiameter(diameter_cm));
    }
    Ok(if diameter_cm <= EASY_PEBBLE_MAX_CM {
        Difficulty::Easy
    } else {
        Difficulty::Difficult
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadConfig {
    pub payload: f64,
    pub servo_rating: f64,
}

impl LoadConfig {
    pub fn new(payload: f64, servo_rating: f64) -> Result<Self, TerrainError> {
        if !(payload >= 0.0 && payload.is_finite()) {
            return Err(TerrainError::InvalidLoad(format!("payload {payload} kg")));
        }
        if !(servo_rating > 0.0 && servo_rating.is_finite()) {
            return Err(TerrainError::InvalidLoad(format!(
                "servo rating {servo_rating} kgf·cm"
            )));
        }
        Ok(Self {
            payload,
            servo_rating,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoadVerdict {
    Supported,
    Oversized,
}

/// Payload capacity in kg, linear through the two anchors and floored at zero.
pub fn capacity_kg(servo_rating: f64) -> f64 {
    let [(r0, c0), (r1, c1)] = LOAD_ANCHORS;
    (c0 + (servo_rating - r0) * (c1 - c0) / (r1 - r0)).max(0.0)
}

pub fn load_capacity(cfg: &LoadConfig) -> LoadVerdict {
    if cfg.payload <= capacity_kg(cfg.servo_rating) {
        LoadVerdict::Supported
    } else {
        LoadVerdict::Oversized
    }
}

/// Per-rank foot lift in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Posture {
    pub rear: f64,
    pub middle: f64,
    pub front: f64,
}

impl Posture {
    pub fn new(rear: f64, middle: f64, front: f64, max_lift: f64) -> Result<Self, TerrainError> {
        for (rank, value) in [("rear", rear), ("middle", middle), ("front", front)] {
            if !(0.0..=max_lift).contains(&value) {
                return Err(TerrainError::PostureOutOfRange {
                    rank,
                    value,
                    max: max_lift,
                });
            }
        }
        Ok(Self {
            rear,
            middle,
            front,
        })
    }

    /// Rear legs lowest, middle and front legs at full single-leg lift.
    pub fn optimal(profile: &LiftProfile) -> Self {
        Self {
            rear: 0.0,
            middle: profile.peak(),
            front: profile.peak(),
        }
    }

    /// Body pitch (rad, nose up positive) the posture induces.
    pub fn pitch(&self, spec: &RobotSpec) -> f64 {
        let [x_rear, x_middle, _] = spec.leg_mount_x;
        ((self.middle - self.rear) / (x_middle - x_rear)).atan()
    }
}

/// Height in mm the front foot can reach: the body pivots about the rear feet
/// so the middle lift tilts the nose up, then the front leg adds its own lift.
pub fn max_step_reach(spec: &RobotSpec, posture: &Posture) -> f64 {
    let [_, x_middle, x_front] = spec.leg_mount_x;
    posture.middle + (x_front - x_middle) * posture.pitch(spec).tan() + posture.front
}
