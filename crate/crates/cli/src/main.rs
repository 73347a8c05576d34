use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use hexsim_cli::commands::{load_scenario, EXIT_TOPPLED};
use hexsim_cli::service::{DEFAULT_COMMAND_PORT, DEFAULT_TELEMETRY_PORT, DEFAULT_TICK_RATE_HZ};
use hexsim_cli::{
    analyze, protocol_table, simulate, AnalysisKind, CliError, Service, ServiceConfig, SimulateArgs,
};
use hexsim_core::sim::RunOutcome;

#[derive(Parser)]
#[command(
    name = "hexsim",
    version,
    about = "Hexapod crank-leg simulator and teleop service"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the live simulator with command and telemetry ports.
    Serve {
        #[arg(long, default_value_t = DEFAULT_COMMAND_PORT)]
        command_port: u16,
        #[arg(long, default_value_t = DEFAULT_TELEMETRY_PORT)]
        telemetry_port: u16,
        #[arg(long, default_value_t = DEFAULT_TICK_RATE_HZ)]
        tick_rate: f64,
        #[arg(long, default_value = "127.0.0.1")]
        bind: std::net::IpAddr,
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Replay a timed command script and write NDJSON telemetry.
    Simulate {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        script: PathBuf,
        /// Output file, stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Gait time units to simulate.
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Export kinematic curves or the climb envelope as CSV.
    Analyze {
        /// lift-profile, foot-path or climb-envelope
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Samples per curve, or grid levels per rank for the envelope.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Print the wire command table.
    ProtocolTable,
}

fn output(path: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn report(err: CliError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code())
}

async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    let service = Service::start(config).await?;
    println!(
        "commands on {} telemetry on {}",
        service.command_addr(),
        service.telemetry_addr()
    );
    tokio::signal::ctrl_c().await?;
    service.shutdown().await;
    Ok(())
}

fn main() -> anyhow::Result<ExitCode> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Cmd::Serve {
            command_port,
            telemetry_port,
            tick_rate,
            bind,
            scenario,
        } => {
            let scenario = match load_scenario(scenario.as_deref()) {
                Ok(s) => s,
                Err(e) => return Ok(report(e)),
            };
            let config = ServiceConfig {
                bind,
                command_port,
                telemetry_port,
                tick_rate_hz: tick_rate,
                scenario,
            };
            tokio::runtime::Runtime::new()?.block_on(serve(config))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Simulate {
            scenario,
            script,
            out,
            duration,
        } => {
            let args = SimulateArgs {
                scenario,
                script,
                duration,
            };
            let mut sink = output(out.as_ref())?;
            let outcome = match simulate(&args, &mut sink) {
                Ok(o) => o,
                Err(e) => return Ok(report(e)),
            };
            sink.flush()?;
            Ok(match outcome {
                RunOutcome::Completed => ExitCode::SUCCESS,
                RunOutcome::Toppled { time } => {
                    eprintln!("robot toppled at t = {time}");
                    ExitCode::from(EXIT_TOPPLED)
                }
            })
        }
        Cmd::Analyze { kind, out, samples } => {
            let kind: AnalysisKind = match kind.parse() {
                Ok(k) => k,
                Err(e) => return Ok(report(e)),
            };
            let samples = samples.unwrap_or(match kind {
                AnalysisKind::ClimbEnvelope => 22,
                _ => 200,
            });
            let mut sink = output(out.as_ref())?;
            if let Err(e) = analyze(kind, samples, &mut sink) {
                return Ok(report(e));
            }
            sink.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ProtocolTable => {
            protocol_table(io::stdout().lock())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
