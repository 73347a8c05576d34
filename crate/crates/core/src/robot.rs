use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gait::{LegId, Rank, Side};

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("dimension `{0}` must be strictly positive and finite")]
    NonPositive(&'static str),
    #[error("leg mounts must be strictly increasing rear to front, got {0:?}")]
    MountOrder([f64; 3]),
    #[error("robot must have exactly six legs, got {0}")]
    LegCount(usize),
}

/// Fixed geometry, mass and actuator constants of the machine.
///
/// Lengths are in millimetres, mass in kilograms and torque in kgf·cm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub body_length: f64,
    pub body_width: f64,
    pub body_height: f64,
    pub mass: f64,
    pub servo_torque: f64,
    /// Mount position of each leg pair along the body axis: rear, middle, front.
    pub leg_mount_x: [f64; 3],
    pub leg_count: usize,
}

impl Default for RobotSpec {
    fn default() -> Self {
        Self {
            body_length: 310.0,
            body_width: 200.0,
            body_height: 120.0,
            mass: 1.75,
            servo_torque: 10.0,
            leg_mount_x: [-120.0, 0.0, 120.0],
            leg_count: 6,
        }
    }
}

impl RobotSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let dims = [
            ("body_length", self.body_length),
            ("body_width", self.body_width),
            ("body_height", self.body_height),
            ("mass", self.mass),
            ("servo_torque", self.servo_torque),
        ];
        for (name, v) in dims {
            if !(v.is_finite() && v > 0.0) {
                return Err(SpecError::NonPositive(name));
            }
        }
        if self.leg_count != 6 {
            return Err(SpecError::LegCount(self.leg_count));
        }
        let [rear, middle, front] = self.leg_mount_x;
        if !(rear < middle && middle < front) {
            return Err(SpecError::MountOrder(self.leg_mount_x));
        }
        Ok(())
    }

    pub fn mount_x(&self, rank: Rank) -> f64 {
        match rank {
            Rank::Rear => self.leg_mount_x[0],
            Rank::Middle => self.leg_mount_x[1],
            Rank::Front => self.leg_mount_x[2],
        }
    }

    /// Leg mount in the body frame: x forward, y to the left.
    pub fn mount(&self, leg: LegId) -> [f64; 2] {
        let y = match leg.side {
            Side::Left => self.body_width / 2.0,
            Side::Right => -self.body_width / 2.0,
        };
        [self.mount_x(leg.rank), y]
    }

    /// Distance between the left and right foot lines.
    pub fn track(&self) -> f64 {
        self.body_width
    }
}
