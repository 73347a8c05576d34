use std::str::FromStr;

use crate::gait::GaitConfig;
use crate::kinematics::LegModel;
use crate::robot::RobotSpec;
use crate::terrain::{Posture, TerrainFeature};

use super::{SimError, TerrainSpan, World};

/// Terrain layout, starting pose and gait overrides.
///
/// Line-oriented text, `#` starts a comment:
///
/// ```text
/// feature <start_mm> <end_mm> flat|grass
/// feature <start_mm> <end_mm> step <height_cm>
/// feature <start_mm> <end_mm> pebbles <diameter_cm>
/// pose <x_mm> <y_mm> <heading_rad>
/// phase_offset <degrees>
/// turn_ratio <fraction>
/// posture <rear_mm> <middle_mm> <front_mm>
/// ```
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scenario {
    pub features: Vec<TerrainSpan>,
    pub pose: Option<([f64; 2], f64)>,
    pub phase_offset: Option<f64>,
    pub turn_ratio: Option<f64>,
    pub posture: Option<[f64; 3]>,
}

impl Scenario {
    pub fn build_world(&self) -> Result<World, SimError> {
        let leg = LegModel::default();
        let mut cfg = GaitConfig::new(&leg.profile);
        if let Some(deg) = self.phase_offset {
            cfg.phase_offset = deg;
        }
        if let Some(r) = self.turn_ratio {
            cfg.turn_speed_ratio = r;
        }
        let peak = leg.profile.peak();
        let mut world = World::new(RobotSpec::default(), leg, cfg, self.features.clone())?;
        if let Some(([x, y], heading)) = self.pose {
            world.set_pose([x, y], heading);
        }
        if let Some([rear, middle, front]) = self.posture {
            world.climb_posture = Posture::new(rear, middle, front, peak)
                .map_err(|e| SimError::InvalidWorld(e.to_string()))?;
        }
        Ok(world)
    }
}

fn numbers<const N: usize>(args: &[&str], line: usize) -> Result<[f64; N], SimError> {
    if args.len() != N {
        return Err(SimError::Parse {
            line,
            message: format!("expected {N} numbers, got {}", args.len()),
        });
    }
    let mut out = [0.0; N];
    for (slot, a) in out.iter_mut().zip(args) {
        *slot = a
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| SimError::Parse {
                line,
                message: format!("bad number `{a}`"),
            })?;
    }
    Ok(out)
}

impl FromStr for Scenario {
    type Err = SimError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut sc = Scenario::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let words: Vec<&str> = body.split_whitespace().collect();
            let err = |message: String| SimError::Parse { line, message };
            match words[0] {
                "feature" => {
                    if words.len() < 4 {
                        return Err(err("feature needs a range and a kind".into()));
                    }
                    let [start, end] = numbers::<2>(&words[1..3], line)?;
                    let feature = match (words[3], &words[4..]) {
                        ("flat", []) => TerrainFeature::Flat,
                        ("grass", []) => TerrainFeature::Grass,
                        ("step", rest) => {
                            let [h] = numbers::<1>(rest, line)?;
                            TerrainFeature::Step { height_cm: h }
                        }
                        ("pebbles", rest) => {
                            let [d] = numbers::<1>(rest, line)?;
                            TerrainFeature::Pebbles { diameter_cm: d }
                        }
                        (kind, _) => return Err(err(format!("unknown feature `{kind}`"))),
                    };
                    feature.validate().map_err(|e| err(e.to_string()))?;
                    if !(start < end) {
                        return Err(err(format!("empty range [{start}, {end})")));
                    }
                    sc.features.push(TerrainSpan {
                        start_mm: start,
                        end_mm: end,
                        feature,
                    });
                }
                "pose" => {
                    let [x, y, h] = numbers::<3>(&words[1..], line)?;
                    sc.pose = Some(([x, y], h));
                }
                "phase_offset" => {
                    let [d] = numbers::<1>(&words[1..], line)?;
                    sc.phase_offset = Some(d);
                }
                "turn_ratio" => {
                    let [r] = numbers::<1>(&words[1..], line)?;
                    sc.turn_ratio = Some(r);
                }
                "posture" => {
                    sc.posture = Some(numbers::<3>(&words[1..], line)?);
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        Ok(sc)
    }
}
