use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use hexsim_core::kinematics::{write_trajectory_csv, TrajectoryRow};
use hexsim_core::sim::{
    run_script, write_ndjson, RunOptions, RunOutcome, Scenario, Script, SimError,
};
use hexsim_core::terrain::max_step_reach;
use hexsim_core::{Command, LegModel, Posture, RobotSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: SimError },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    /// Process exit status: 3 for unparsable input, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::InvalidArgument(_) => 3,
            _ => 1,
        }
    }
}

/// Exit status when a run ends with the robot on its side.
pub const EXIT_TOPPLED: u8 = 2;

#[derive(Debug, Clone, Default)]
pub struct SimulateArgs {
    pub scenario: Option<PathBuf>,
    pub script: PathBuf,
    /// Seconds of gait time; defaults to two cycles past the last command
    /// and never less than three cycles.
    pub duration: Option<f64>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_scenario(path: Option<&Path>) -> Result<Scenario, CliError> {
    match path {
        None => Ok(Scenario::default()),
        Some(p) => read(p)?.parse().map_err(|source| CliError::Parse {
            path: p.to_path_buf(),
            source,
        }),
    }
}

/// Runs a script and writes NDJSON telemetry. Returns the outcome so the
/// caller can map a topple to [`EXIT_TOPPLED`].
pub fn simulate<W: Write>(args: &SimulateArgs, out: W) -> Result<RunOutcome, CliError> {
    let scenario = load_scenario(args.scenario.as_deref())?;
    let script: Script = read(&args.script)?
        .parse()
        .map_err(|source| CliError::Parse {
            path: args.script.clone(),
            source,
        })?;
    let mut world = scenario.build_world().map_err(|source| CliError::Parse {
        path: args.scenario.clone().unwrap_or_default(),
        source,
    })?;
    let period = world.period();
    let duration = match args.duration {
        Some(d) if d.is_finite() && d > 0.0 => d,
        Some(d) => return Err(CliError::InvalidArgument(format!("duration {d}"))),
        None => (script.last_time() + 2.0 * period).max(3.0 * period),
    };
    let opts = RunOptions::for_world(&world, duration);
    let run = run_script(&mut world, &script, opts)?;
    write_ndjson(out, &run.snapshots)?;
    Ok(run.outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisKind {
    /// Foot x from the linkage paired with the lift height over one period.
    LiftProfile,
    /// Closed foot path of the linkage over one crank turn.
    FootPath,
    /// Front-foot reach over a grid of per-rank lift postures.
    ClimbEnvelope,
}

impl std::str::FromStr for AnalysisKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lift-profile" => Ok(Self::LiftProfile),
            "foot-path" => Ok(Self::FootPath),
            "climb-envelope" => Ok(Self::ClimbEnvelope),
            other => Err(CliError::InvalidArgument(format!(
                "unknown analysis kind {other:?}"
            ))),
        }
    }
}

pub const ENVELOPE_HEADER: &str = "rear_mm,middle_mm,front_mm,reach_mm";

pub fn analyze<W: Write>(kind: AnalysisKind, samples: usize, mut out: W) -> Result<(), CliError> {
    if samples < 2 {
        return Err(CliError::InvalidArgument(format!("samples {samples} < 2")));
    }
    let leg = LegModel::default();
    let period = leg.period();
    match kind {
        AnalysisKind::LiftProfile => {
            let rows: Vec<_> = (0..samples)
                .map(|i| {
                    let t = period * i as f64 / samples as f64;
                    TrajectoryRow {
                        t,
                        x_mm: leg.foot(t).x,
                        y_mm: leg.height(t),
                    }
                })
                .collect();
            write_trajectory_csv(out, &rows)?;
        }
        AnalysisKind::FootPath => {
            let rows: Vec<_> = (0..=samples)
                .map(|i| {
                    let t = period * i as f64 / samples as f64;
                    let p = leg.foot(t);
                    TrajectoryRow {
                        t,
                        x_mm: p.x,
                        y_mm: p.y,
                    }
                })
                .collect();
            write_trajectory_csv(out, &rows)?;
        }
        AnalysisKind::ClimbEnvelope => {
            let spec = RobotSpec::default();
            let peak = leg.profile.peak();
            writeln!(out, "{ENVELOPE_HEADER}")?;
            for (rear, middle, front, reach) in climb_envelope(&spec, peak, samples) {
                writeln!(out, "{rear},{middle},{front},{reach}")?;
            }
        }
    }
    Ok(())
}

/// Reach over an `n`^3 grid of postures spanning `[0, peak]` on every rank.
pub fn climb_envelope(spec: &RobotSpec, peak: f64, n: usize) -> Vec<(f64, f64, f64, f64)> {
    let level = |i: usize| peak * i as f64 / (n - 1) as f64;
    let mut rows = Vec::with_capacity(n * n * n);
    for r in 0..n {
        for m in 0..n {
            for f in 0..n {
                let (rear, middle, front) = (level(r), level(m), level(f));
                let posture = Posture {
                    rear,
                    middle,
                    front,
                };
                rows.push((rear, middle, front, max_step_reach(spec, &posture)));
            }
        }
    }
    rows
}

/// One line per wire command: byte, printable character and name.
pub fn protocol_table<W: Write>(mut out: W) -> io::Result<()> {
    writeln!(out, "byte,char,command")?;
    for cmd in Command::ALL {
        let b = cmd.encode();
        writeln!(out, "0x{b:02x},{},{}", b as char, cmd.name())?;
    }
    Ok(())
}
