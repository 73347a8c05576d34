use crate::gait::{phase_delta, GaitConfig, GaitState, LegId, LegSet, Side};
use crate::kinematics::LegModel;
use crate::protocol::Command;
use crate::robot::RobotSpec;
use crate::terrain::{climb_class, max_step_reach, Difficulty, Posture, TerrainFeature};

use super::{
    static_stability, SimError, TelemetrySnapshot, DEFAULT_STEPS_PER_CYCLE, MAX_STEP_FRACTION,
};

/// Beyond this pitch the body is considered toppled.
pub const MAX_PITCH_RAD: f64 = std::f64::consts::PI / 6.0;

/// Stride multiplier while the front of the body is over difficult terrain.
pub const DIFFICULT_STRIDE_FACTOR: f64 = 0.5;

/// A terrain feature occupying `[start_mm, end_mm)` along the world x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainSpan {
    pub start_mm: f64,
    pub end_mm: f64,
    pub feature: TerrainFeature,
}

impl TerrainSpan {
    fn overlaps(&self, lo: f64, hi: f64) -> bool {
        hi > self.start_mm && lo < self.end_mm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    /// Body centre in the world frame, mm.
    pub position: [f64; 2],
    /// Radians, counter-clockwise from the world x axis.
    pub heading: f64,
    /// Radians, nose up positive.
    pub pitch: f64,
    pub gait: GaitState,
    pub stance: LegSet,
    pub grounded: bool,
    pub stable: bool,
    pub toppled: bool,
    /// Gait progress (time-units) accumulated while statically unstable.
    pub unstable_progress: f64,
}

/// What happened during one tick, for callers that care about more than the state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TickReport {
    pub displacement: f64,
    pub heading_change: f64,
    pub refused: bool,
    pub toppled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub spec: RobotSpec,
    pub leg: LegModel,
    pub gait_cfg: GaitConfig,
    pub climb_posture: Posture,
    pub robot: RobotState,
    pub time: f64,
    features: Vec<TerrainSpan>,
    annotations: Vec<String>,
    blocked_by: Option<usize>,
    climbing: Option<usize>,
}

impl Default for World {
    fn default() -> Self {
        let leg = LegModel::default();
        let cfg = GaitConfig::new(&leg.profile);
        Self::new(RobotSpec::default(), leg, cfg, Vec::new()).expect("default world is valid")
    }
}

impl World {
    pub fn new(
        spec: RobotSpec,
        leg: LegModel,
        gait_cfg: GaitConfig,
        mut features: Vec<TerrainSpan>,
    ) -> Result<Self, SimError> {
        spec.validate()
            .map_err(|e| SimError::InvalidWorld(e.to_string()))?;
        gait_cfg
            .validate()
            .map_err(|e| SimError::InvalidWorld(e.to_string()))?;
        features.sort_by(|a, b| a.start_mm.total_cmp(&b.start_mm));
        for f in &features {
            f.feature
                .validate()
                .map_err(|e| SimError::InvalidWorld(e.to_string()))?;
            if !(f.start_mm < f.end_mm) {
                return Err(SimError::InvalidWorld(format!(
                    "feature range [{}, {}) is empty",
                    f.start_mm, f.end_mm
                )));
            }
        }
        if let Some(w) = features.windows(2).find(|w| w[1].start_mm < w[0].end_mm) {
            return Err(SimError::InvalidWorld(format!(
                "features overlap at {} mm",
                w[1].start_mm
            )));
        }
        let gait = GaitState::neutral(&gait_cfg);
        let mut robot = RobotState {
            position: [0.0, 0.0],
            heading: 0.0,
            pitch: 0.0,
            stance: gait.stance_set(&leg.profile),
            gait,
            grounded: false,
            stable: false,
            toppled: false,
            unstable_progress: 0.0,
        };
        robot.grounded = !robot.stance.is_empty();
        robot.stable = static_stability(&robot, &spec, &leg);
        Ok(Self {
            climb_posture: Posture::optimal(&leg.profile),
            spec,
            leg,
            gait_cfg,
            robot,
            time: 0.0,
            features,
            annotations: Vec::new(),
            blocked_by: None,
            climbing: None,
        })
    }

    pub fn features(&self) -> &[TerrainSpan] {
        &self.features
    }

    pub fn period(&self) -> f64 {
        self.leg.period()
    }

    pub fn default_dt(&self) -> f64 {
        self.period() / DEFAULT_STEPS_PER_CYCLE
    }

    pub fn set_pose(&mut self, position: [f64; 2], heading: f64) {
        self.robot.position = position;
        self.robot.heading = heading;
    }

    /// Applies a teleop command at the current tick boundary.
    pub fn apply(&mut self, cmd: Command) {
        self.robot.gait = self.robot.gait.apply_command(&self.gait_cfg, cmd);
        self.refresh_contacts();
    }

    /// Clears a latched topple and returns the legs to the neutral stance.
    pub fn reset(&mut self) {
        self.robot.gait = GaitState::neutral(&self.gait_cfg);
        self.robot.pitch = 0.0;
        self.robot.toppled = false;
        self.robot.unstable_progress = 0.0;
        self.refresh_contacts();
        self.annotate("event:reset".to_string());
    }

    pub fn annotate(&mut self, note: String) {
        self.annotations.push(note);
    }

    fn refresh_contacts(&mut self) {
        self.robot.stance = self.robot.gait.stance_set(&self.leg.profile);
        self.robot.grounded = !self.robot.stance.is_empty();
        self.robot.stable = static_stability(&self.robot, &self.spec, &self.leg);
    }

    fn half_extent(&self, heading: f64) -> f64 {
        0.5 * self.spec.body_length * heading.cos().abs()
    }

    fn front_x(&self) -> f64 {
        self.robot.position[0] + 0.5 * self.spec.body_length * self.robot.heading.cos()
    }

    /// Feature under the front of the body.
    pub fn active_feature(&self) -> Option<&TerrainSpan> {
        let x = self.front_x();
        self.features
            .iter()
            .find(|f| x >= f.start_mm && x < f.end_mm)
    }

    /// Whether a step can be surmounted with the configured climb posture.
    pub fn can_climb(&self, feature: &TerrainFeature) -> bool {
        match *feature {
            TerrainFeature::Step { height_cm } => {
                climb_class(height_cm).is_ok_and(|c| c != Difficulty::Impossible)
                    && max_step_reach(&self.spec, &self.climb_posture) >= height_cm * 10.0
            }
            _ => true,
        }
    }

    /// Advances the world by `dt` time-units.
    pub fn tick(&mut self, dt: f64) -> Result<TickReport, SimError> {
        if self.robot.toppled {
            return Err(SimError::Toppled(self.time));
        }
        let period = self.period();
        let max = period * MAX_STEP_FRACTION;
        if !(dt > 0.0 && dt <= max * (1.0 + 1e-12)) {
            return Err(SimError::BadTimestep { dt, max });
        }

        let old = self.robot.gait.clone();
        let new = old.advance(&self.gait_cfg, dt);

        // Stance feet stay planted: the body moves opposite to their travel.
        let mut side_sum = [0.0f64; 2];
        let mut side_count = [0usize; 2];
        let mut progress = 0.0f64;
        for leg in LegId::ALL {
            let (p0, p1) = (old.phase(leg), new.phase(leg));
            let dphase = phase_delta(p0, p1, period);
            progress = progress.max(dphase.abs());
            if !self.leg.in_stance(p0 + 0.5 * dphase) {
                continue;
            }
            let s = match leg.side {
                Side::Left => 0,
                Side::Right => 1,
            };
            side_sum[s] -= self.leg.foot(p1).x - self.leg.foot(p0).x;
            side_count[s] += 1;
        }
        let side = |s: usize| {
            if side_count[s] == 0 {
                0.0
            } else {
                side_sum[s] / side_count[s] as f64
            }
        };
        let (left, right) = (side(0), side(1));
        let mut distance = 0.5 * (left + right);
        let heading_change = (right - left) / self.spec.track();

        if let Some(f) = self.active_feature() {
            if f.feature
                .difficulty()
                .is_ok_and(|d| d == Difficulty::Difficult)
            {
                distance *= DIFFICULT_STRIDE_FACTOR;
            }
        }

        let new_heading = self.robot.heading + heading_change;
        let mid = self.robot.heading + 0.5 * heading_change;
        let (dir_x, dir_y) = (mid.cos(), mid.sin());
        let refused = self.clamp_for_refused_steps(&mut distance, dir_x, new_heading);

        let r = &mut self.robot;
        r.position[0] += distance * dir_x;
        r.position[1] += distance * dir_y;
        r.heading = new_heading;
        r.gait = new;
        self.time += dt;

        self.update_pitch(dt);
        self.refresh_contacts();

        let mut report = TickReport {
            displacement: distance,
            heading_change,
            refused,
            toppled: false,
        };
        if !self.robot.grounded {
            self.annotate("state:not_grounded".to_string());
        }
        if self.robot.stable {
            self.robot.unstable_progress = 0.0;
        } else {
            self.robot.unstable_progress += progress;
        }
        if self.robot.unstable_progress > period || self.robot.pitch.abs() > MAX_PITCH_RAD {
            self.robot.toppled = true;
            report.toppled = true;
            let t = self.time;
            self.annotate(format!("event:toppled@t={t}"));
        }
        Ok(report)
    }

    /// Shortens `distance` so the body stops at the edge of a step it cannot climb.
    fn clamp_for_refused_steps(
        &mut self,
        distance: &mut f64,
        dir_x: f64,
        new_heading: f64,
    ) -> bool {
        let x0 = self.robot.position[0];
        let (h0, h1) = (
            self.half_extent(self.robot.heading),
            self.half_extent(new_heading),
        );
        let x1 = x0 + *distance * dir_x;
        let mut refused_at = None;
        for (i, f) in self.features.iter().enumerate() {
            if self.can_climb(&f.feature) {
                continue;
            }
            if f.overlaps(x0 - h0, x0 + h0) || !f.overlaps(x1 - h1, x1 + h1) {
                continue;
            }
            let allowed_x = if x1 > x0 {
                (f.start_mm - h1).max(x0)
            } else {
                (f.end_mm + h1).min(x0)
            };
            *distance = if dir_x.abs() > 0.0 {
                (allowed_x - x0) / dir_x
            } else {
                0.0
            };
            refused_at = Some(i);
            break;
        }
        match refused_at {
            Some(i) => {
                if self.blocked_by != Some(i) {
                    let f = self.features[i];
                    self.annotate(format!("terrain:refused:{}@x={}", f.feature, f.start_mm));
                }
                self.blocked_by = Some(i);
                true
            }
            None => {
                // stay latched while the body rests against the edge
                let x = x0 + *distance * dir_x;
                let at_edge = self.blocked_by.is_some_and(|i| {
                    let f = &self.features[i];
                    (x + h1 - f.start_mm).abs() < 1e-9 || (x - h1 - f.end_mm).abs() < 1e-9
                });
                if !at_edge {
                    self.blocked_by = None;
                }
                false
            }
        }
    }

    /// Pitch ramps over one gait cycle toward the climb posture's pitch while
    /// a step edge lies under the body, and back to level otherwise.
    fn update_pitch(&mut self, dt: f64) {
        let x = self.robot.position[0];
        let h = self.half_extent(self.robot.heading);
        let (rear, front) = (x - h, x + h);
        let climb = self.climb_posture.pitch(&self.spec);
        let mut target = 0.0;
        let mut edge = None;
        for (i, f) in self.features.iter().enumerate() {
            if !matches!(f.feature, TerrainFeature::Step { .. }) || !self.can_climb(&f.feature) {
                continue;
            }
            if f.start_mm > rear && f.start_mm < front {
                target = climb;
                edge = Some(i);
                break;
            }
            if f.end_mm > rear && f.end_mm < front {
                target = -climb;
                edge = Some(i);
                break;
            }
        }
        if let Some(i) = edge {
            if self.climbing != Some(i) {
                let f = self.features[i];
                self.annotate(format!("terrain:climb:{}@x={}", f.feature, f.start_mm));
            }
        }
        self.climbing = edge;
        let rate = climb.abs() / self.period();
        let step = rate * dt;
        let p = self.robot.pitch;
        self.robot.pitch = if (target - p).abs() <= step {
            target
        } else {
            p + step * (target - p).signum()
        };
    }

    /// Current telemetry record; drains pending annotations.
    pub fn snapshot(&mut self) -> TelemetrySnapshot {
        let ann = std::mem::take(&mut self.annotations);
        TelemetrySnapshot::capture(self, ann)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_features_are_rejected() {
        let leg = LegModel::default();
        let cfg = GaitConfig::new(&leg.profile);
        let feats = vec![
            TerrainSpan {
                start_mm: 0.0,
                end_mm: 100.0,
                feature: TerrainFeature::Grass,
            },
            TerrainSpan {
                start_mm: 50.0,
                end_mm: 150.0,
                feature: TerrainFeature::Flat,
            },
        ];
        assert!(matches!(
            World::new(RobotSpec::default(), leg, cfg, feats),
            Err(SimError::InvalidWorld(_))
        ));
    }

    #[test]
    fn timestep_bounds() {
        let mut w = World::default();
        let t = w.period();
        assert!(matches!(w.tick(0.0), Err(SimError::BadTimestep { .. })));
        assert!(matches!(
            w.tick(t / 10.0),
            Err(SimError::BadTimestep { .. })
        ));
        assert!(w.tick(t / 20.0).is_ok());
    }

    #[test]
    fn neutral_world_is_grounded_and_stable() {
        let w = World::default();
        assert_eq!(w.robot.stance.len(), 6);
        assert!(w.robot.grounded);
        assert!(w.robot.stable);
    }

    #[test]
    fn toppled_is_latched_until_reset() {
        let mut w = World::default();
        w.robot.toppled = true;
        assert!(matches!(w.tick(w.default_dt()), Err(SimError::Toppled(_))));
        w.reset();
        assert!(w.tick(w.default_dt()).is_ok());
    }
}
