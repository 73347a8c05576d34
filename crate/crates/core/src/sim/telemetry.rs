use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::gait::LegId;

use super::World;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegTelemetry {
    pub id: String,
    pub phase: f64,
    pub h: f64,
    pub stance: bool,
}

/// One telemetry record. Field names are part of the wire contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetrySnapshot {
    pub t: f64,
    pub pos: [f64; 2],
    pub heading: f64,
    pub pitch: f64,
    pub legs: Vec<LegTelemetry>,
    pub mode: String,
    pub stable: bool,
    pub terrain: String,
    pub ann: Vec<String>,
}

impl TelemetrySnapshot {
    pub(crate) fn capture(world: &World, ann: Vec<String>) -> Self {
        let r = &world.robot;
        let legs = LegId::ALL
            .iter()
            .map(|&leg| {
                let phase = r.gait.phase(leg);
                LegTelemetry {
                    id: leg.code().to_string(),
                    phase,
                    h: world.leg.height(phase),
                    stance: r.stance.contains(leg),
                }
            })
            .collect();
        let mode = if r.toppled {
            "toppled".to_string()
        } else {
            r.gait.mode.to_string()
        };
        let terrain = world
            .active_feature()
            .map(|f| f.feature.to_string())
            .unwrap_or_else(|| "flat".to_string());
        Self {
            t: world.time,
            pos: r.position,
            heading: r.heading,
            pitch: r.pitch,
            legs,
            mode,
            stable: r.stable,
            terrain,
            ann,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("snapshot serializes")
    }
}

/// Newline-delimited JSON, one snapshot per line.
pub fn write_ndjson<W: Write>(mut out: W, snapshots: &[TelemetrySnapshot]) -> io::Result<()> {
    for s in snapshots {
        out.write_all(s.to_json_line().as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
