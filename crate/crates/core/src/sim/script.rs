use std::str::FromStr;

use crate::protocol::Command;

use super::{SimError, TelemetrySnapshot, World, DEFAULT_SAMPLES_PER_CYCLE};

/// Timed command list. Text form: one `<time_units> <command-letter>` per
/// line; blank lines and `#` comments are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Script {
    pub entries: Vec<(f64, Command)>,
}

impl Script {
    pub fn new(entries: Vec<(f64, Command)>) -> Result<Self, SimError> {
        for (i, w) in entries.windows(2).enumerate() {
            if !(w[1].0 >= w[0].0) {
                return Err(SimError::BadScript { line: i + 2 });
            }
        }
        if let Some((t, _)) = entries.first() {
            if !t.is_finite() {
                return Err(SimError::BadScript { line: 1 });
            }
        }
        Ok(Self { entries })
    }

    pub fn last_time(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.0)
    }
}

impl FromStr for Script {
    type Err = SimError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut entries = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let parse_err = |message: String| SimError::Parse { line, message };
            let mut parts = body.split_whitespace();
            let (Some(t), Some(letter), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(parse_err(format!(
                    "expected `<time> <letter>`, got `{body}`"
                )));
            };
            let t: f64 = t
                .parse()
                .map_err(|_| parse_err(format!("bad time `{t}`")))?;
            if !(t.is_finite() && t >= 0.0) {
                return Err(parse_err(format!(
                    "time {t} must be finite and nonnegative"
                )));
            }
            let byte = match letter.as_bytes() {
                [b] => *b,
                _ => {
                    return Err(parse_err(format!(
                        "command must be one character, got `{letter}`"
                    )))
                }
            };
            let cmd = Command::decode(byte).map_err(|e| parse_err(e.to_string()))?;
            if t < last {
                return Err(SimError::BadScript { line });
            }
            last = t;
            entries.push((t, cmd));
        }
        Ok(Self { entries })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Integrator step, time-units.
    pub dt: f64,
    /// Telemetry sample spacing, time-units (rounded to whole ticks).
    pub sample_interval: f64,
    /// Total simulated time, time-units.
    pub duration: f64,
}

impl RunOptions {
    pub fn for_world(world: &World, duration: f64) -> Self {
        Self {
            dt: world.default_dt(),
            sample_interval: world.period() / DEFAULT_SAMPLES_PER_CYCLE,
            duration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunOutcome {
    Completed,
    Toppled { time: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptRun {
    pub snapshots: Vec<TelemetrySnapshot>,
    pub outcome: RunOutcome,
}

/// Deterministic replay of a script against a world.
///
/// Commands take effect at the first tick boundary at or after their time.
/// The run stops early if the robot topples.
pub fn run_script(
    world: &mut World,
    script: &Script,
    opts: RunOptions,
) -> Result<ScriptRun, SimError> {
    let checked = Script::new(script.entries.clone())?;
    let dt = opts.dt;
    let n_ticks = (opts.duration / dt - 1e-9).ceil().max(0.0) as u64;
    let every = ((opts.sample_interval / dt).round() as u64).max(1);
    let slack = 1e-9 * world.period();
    let start = world.time;

    let mut next = 0;
    let mut snapshots = Vec::new();
    let mut outcome = RunOutcome::Completed;
    for k in 0..=n_ticks {
        let now = k as f64 * dt;
        while next < checked.entries.len() && checked.entries[next].0 <= now + slack {
            world.apply(checked.entries[next].1);
            next += 1;
        }
        if k % every == 0 || k == n_ticks {
            snapshots.push(world.snapshot());
        }
        if k == n_ticks {
            break;
        }
        let report = world.tick(dt)?;
        world.time = start + (k + 1) as f64 * dt;
        if report.toppled {
            snapshots.push(world.snapshot());
            outcome = RunOutcome::Toppled { time: world.time };
            break;
        }
    }
    Ok(ScriptRun { snapshots, outcome })
}
