use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use super::KinematicsError;

const DEGENERATE_EPS: f64 = 1e-9;
const GROUND_SAMPLES: usize = 4096;

/// Foot point in the leg frame: `x` forward along the body, `y` height above
/// the linkage's lowest reachable point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FootPoint {
    pub x: f64,
    pub y: f64,
}

/// Planar crank-through-guide leg.
///
/// The crank of radius `crank_radius` turns about the leg origin. A rigid link
/// is pinned to the crank tip and slides through a pivoting guide at
/// `guide_pivot`; the foot sits `link_length + foot_offset` from the crank tip
/// along the link.
///
/// Defaults were fixed by a grid search over crank radius and link length so
/// that the peak foot clearance matches the lift profile's peak (27.66 mm).
/// With the guide on the vertical axis the clearance is exactly twice the
/// crank radius, and the link length sets the stance stroke.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkageGeometry {
    crank_radius: f64,
    link_length: f64,
    guide_pivot: [f64; 2],
    foot_offset: f64,
    ground_y: f64,
    bottom_angle: f64,
}

pub const DEFAULT_CRANK_RADIUS_MM: f64 = 13.83;
pub const DEFAULT_LINK_LENGTH_MM: f64 = 100.0;
pub const DEFAULT_GUIDE_PIVOT_MM: [f64; 2] = [0.0, -45.0];
pub const DEFAULT_FOOT_OFFSET_MM: f64 = 15.0;

impl Default for LinkageGeometry {
    fn default() -> Self {
        Self::new(
            DEFAULT_CRANK_RADIUS_MM,
            DEFAULT_LINK_LENGTH_MM,
            DEFAULT_GUIDE_PIVOT_MM,
            DEFAULT_FOOT_OFFSET_MM,
        )
        .expect("default linkage is valid")
    }
}

impl LinkageGeometry {
    pub fn new(
        crank_radius: f64,
        link_length: f64,
        guide_pivot: [f64; 2],
        foot_offset: f64,
    ) -> Result<Self, KinematicsError> {
        let finite = [
            crank_radius,
            link_length,
            guide_pivot[0],
            guide_pivot[1],
            foot_offset,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(KinematicsError::InvalidGeometry(
                "non-finite parameter".into(),
            ));
        }
        if crank_radius <= 0.0 {
            return Err(KinematicsError::InvalidGeometry(format!(
                "crank radius {crank_radius} must be positive"
            )));
        }
        let reach = guide_pivot[0].hypot(guide_pivot[1]) + crank_radius;
        if link_length <= reach {
            return Err(KinematicsError::InvalidGeometry(format!(
                "link length {link_length} cannot pass the guide (needs > {reach})"
            )));
        }
        let mut geom = Self {
            crank_radius,
            link_length,
            guide_pivot,
            foot_offset,
            ground_y: 0.0,
            bottom_angle: -FRAC_PI_2,
        };
        let mut lowest = (f64::INFINITY, 0.0);
        for i in 0..GROUND_SAMPLES {
            let th = TAU * i as f64 / GROUND_SAMPLES as f64;
            let y = geom.raw_foot(th)?[1];
            if y < lowest.0 {
                lowest = (y, th);
            }
        }
        // golden-section refine around the sampled minimum
        let h = TAU / GROUND_SAMPLES as f64;
        let (mut a, mut b) = (lowest.1 - h, lowest.1 + h);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if geom.raw_foot(c)?[1] < geom.raw_foot(d)?[1] {
                b = d;
            } else {
                a = c;
            }
        }
        let th = 0.5 * (a + b);
        geom.bottom_angle = th.sin().atan2(th.cos());
        geom.ground_y = geom.raw_foot(th)?[1].min(lowest.0);
        Ok(geom)
    }

    pub fn crank_radius(&self) -> f64 {
        self.crank_radius
    }

    pub fn link_length(&self) -> f64 {
        self.link_length
    }

    pub fn guide_pivot(&self) -> [f64; 2] {
        self.guide_pivot
    }

    pub fn foot_offset(&self) -> f64 {
        self.foot_offset
    }

    /// Crank angle at which the foot is lowest.
    pub fn bottom_angle(&self) -> f64 {
        self.bottom_angle
    }

    fn raw_foot(&self, theta: f64) -> Result<[f64; 2], KinematicsError> {
        let p = [
            self.crank_radius * theta.cos(),
            self.crank_radius * theta.sin(),
        ];
        let d = [self.guide_pivot[0] - p[0], self.guide_pivot[1] - p[1]];
        let n = d[0].hypot(d[1]);
        if n < DEGENERATE_EPS {
            return Err(KinematicsError::DegenerateGeometry(theta));
        }
        let s = (self.link_length + self.foot_offset) / n;
        Ok([p[0] + s * d[0], p[1] + s * d[1]])
    }

    /// Foot position for a crank angle in radians.
    pub fn foot_position(&self, crank_angle: f64) -> Result<FootPoint, KinematicsError> {
        let [x, y] = self.raw_foot(crank_angle)?;
        Ok(FootPoint {
            x,
            y: y - self.ground_y,
        })
    }

    /// Crank tip position, useful for checking the link-length identity.
    pub fn crank_tip(&self, crank_angle: f64) -> [f64; 2] {
        [
            self.crank_radius * crank_angle.cos(),
            self.crank_radius * crank_angle.sin(),
        ]
    }

    /// Peak foot clearance over a full crank turn, by dense sampling.
    pub fn max_clearance(&self, samples: usize) -> f64 {
        (0..samples)
            .filter_map(|i| self.foot_position(TAU * i as f64 / samples as f64).ok())
            .map(|f| f.y)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
