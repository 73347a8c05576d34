//! Live teleop service.
//!
//! One task owns the [`World`] and advances it at a fixed tick rate. Command
//! bytes arrive on a raw TCP port and are queued for the next tick boundary.
//! Each tick publishes one NDJSON telemetry line to every subscriber of the
//! telemetry port, which speaks either raw NDJSON over TCP or websocket text
//! frames when the client opens with an HTTP upgrade.

use std::io;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use hexsim_core::protocol::decode_stream;
use hexsim_core::sim::{Scenario, SimError, DEFAULT_CYCLE_SECONDS, DEFAULT_STEPS_PER_CYCLE};
use hexsim_core::{Command, DecodeEvent, World};
use log::{debug, info, warn};
use thiserror::Error;
use tokio::io::{AsyncBufReadExt, AsyncReadExt, AsyncWriteExt, BufReader};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::{broadcast, mpsc, watch};
use tokio::task::JoinHandle;
use tokio_tungstenite::tungstenite::Message;

pub const DEFAULT_COMMAND_PORT: u16 = 7060;
pub const DEFAULT_TELEMETRY_PORT: u16 = 7061;
pub const DEFAULT_TICK_RATE_HZ: f64 = 50.0;
pub const TICK_RATE_RANGE_HZ: (f64, f64) = (10.0, 1000.0);

/// Telemetry lines buffered per subscriber before the oldest are dropped.
const TELEMETRY_BACKLOG: usize = 256;
const INPUT_QUEUE: usize = 4096;
/// How long a telemetry client gets to start a websocket handshake before it
/// is treated as a raw NDJSON reader.
const HANDSHAKE_WINDOW: Duration = Duration::from_millis(150);

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("port {port} is already in use")]
    PortInUse { port: u16 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("scenario rejected: {0}")]
    Scenario(#[from] SimError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: IpAddr,
    pub command_port: u16,
    pub telemetry_port: u16,
    pub tick_rate_hz: f64,
    pub scenario: Scenario,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: IpAddr::V4(Ipv4Addr::LOCALHOST),
            command_port: DEFAULT_COMMAND_PORT,
            telemetry_port: DEFAULT_TELEMETRY_PORT,
            tick_rate_hz: DEFAULT_TICK_RATE_HZ,
            scenario: Scenario::default(),
        }
    }
}

impl ServiceConfig {
    /// Same as the default but on ephemeral ports, for tests and embedding.
    pub fn ephemeral() -> Self {
        Self {
            command_port: 0,
            telemetry_port: 0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        if self.command_port != 0 && self.command_port == self.telemetry_port {
            return Err(ServiceError::InvalidConfig(format!(
                "command and telemetry ports are both {}",
                self.command_port
            )));
        }
        let (lo, hi) = TICK_RATE_RANGE_HZ;
        if !(lo..=hi).contains(&self.tick_rate_hz) {
            return Err(ServiceError::InvalidConfig(format!(
                "tick rate {} Hz outside [{lo}, {hi}]",
                self.tick_rate_hz
            )));
        }
        Ok(())
    }
}

/// Counters readable while the service runs.
#[derive(Debug, Default)]
pub struct ServiceStats {
    pub ticks: AtomicU64,
    pub commands: AtomicU64,
    pub unknown_bytes: AtomicU64,
    pub dropped_lines: AtomicU64,
    pub toppled: AtomicBool,
}

#[derive(Debug, Clone, Copy)]
enum Input {
    Command(Command),
    Unknown(u8),
    Reset,
}

pub struct Service {
    command_addr: SocketAddr,
    telemetry_addr: SocketAddr,
    stats: Arc<ServiceStats>,
    shutdown: watch::Sender<bool>,
    tasks: Vec<JoinHandle<()>>,
}

async fn bind(ip: IpAddr, port: u16) -> Result<TcpListener, ServiceError> {
    TcpListener::bind((ip, port))
        .await
        .map_err(|e| match e.kind() {
            io::ErrorKind::AddrInUse => ServiceError::PortInUse { port },
            _ => ServiceError::Io(e),
        })
}

impl Service {
    /// Binds both ports and starts the tick loop. Must run inside a tokio runtime.
    pub async fn start(config: ServiceConfig) -> Result<Self, ServiceError> {
        config.validate()?;
        let world = config.scenario.build_world()?;
        let cmd_listener = bind(config.bind, config.command_port).await?;
        let tel_listener = bind(config.bind, config.telemetry_port).await?;
        let command_addr = cmd_listener.local_addr()?;
        let telemetry_addr = tel_listener.local_addr()?;

        let stats = Arc::new(ServiceStats::default());
        let (shutdown, shutdown_rx) = watch::channel(false);
        let (input_tx, input_rx) = mpsc::channel(INPUT_QUEUE);
        let (tel_tx, _) = broadcast::channel::<Arc<str>>(TELEMETRY_BACKLOG);

        let tasks = vec![
            tokio::spawn(tick_loop(
                world,
                config.tick_rate_hz,
                input_rx,
                tel_tx.clone(),
                stats.clone(),
                shutdown_rx.clone(),
            )),
            tokio::spawn(accept_commands(
                cmd_listener,
                input_tx.clone(),
                stats.clone(),
                shutdown_rx.clone(),
            )),
            tokio::spawn(accept_telemetry(
                tel_listener,
                tel_tx,
                input_tx,
                stats.clone(),
                shutdown_rx,
            )),
        ];
        info!("command port {command_addr}, telemetry port {telemetry_addr}");
        Ok(Self {
            command_addr,
            telemetry_addr,
            stats,
            shutdown,
            tasks,
        })
    }

    pub fn command_addr(&self) -> SocketAddr {
        self.command_addr
    }

    pub fn telemetry_addr(&self) -> SocketAddr {
        self.telemetry_addr
    }

    pub fn stats(&self) -> &ServiceStats {
        &self.stats
    }

    /// Stops accepting, ends the tick loop and waits for the tasks to exit.
    pub async fn shutdown(self) {
        let _ = self.shutdown.send(true);
        for task in self.tasks {
            let _ = task.await;
        }
    }
}

async fn tick_loop(
    mut world: World,
    tick_rate_hz: f64,
    mut inputs: mpsc::Receiver<Input>,
    telemetry: broadcast::Sender<Arc<str>>,
    stats: Arc<ServiceStats>,
    mut shutdown: watch::Receiver<bool>,
) {
    // one gait cycle takes DEFAULT_CYCLE_SECONDS of wall time
    let period = world.period();
    let per_tick = period / (DEFAULT_CYCLE_SECONDS * tick_rate_hz);
    let substeps = (per_tick / (period / DEFAULT_STEPS_PER_CYCLE))
        .ceil()
        .max(1.0);
    let dt = per_tick / substeps;
    let mut interval = tokio::time::interval(Duration::from_secs_f64(1.0 / tick_rate_hz));
    interval.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    loop {
        tokio::select! {
            _ = interval.tick() => {}
            _ = shutdown.changed() => break,
        }
        while let Ok(input) = inputs.try_recv() {
            match input {
                Input::Reset => {
                    world.reset();
                    world.annotate("event:reset".to_string());
                }
                Input::Unknown(b) => world.annotate(format!("protocol:unknown_byte:0x{b:02x}")),
                Input::Command(cmd) if world.robot.toppled => {
                    world.annotate(format!("state:toppled:ignored:{}", cmd.name()));
                }
                Input::Command(cmd) => {
                    stats.commands.fetch_add(1, Ordering::Relaxed);
                    world.apply(cmd);
                }
            }
        }
        if !world.robot.toppled {
            for _ in 0..substeps as usize {
                if world.tick(dt).is_err() {
                    break;
                }
                if world.robot.toppled {
                    warn!("robot toppled at t = {}", world.time);
                    break;
                }
            }
        }
        stats.toppled.store(world.robot.toppled, Ordering::Relaxed);
        stats.ticks.fetch_add(1, Ordering::Relaxed);
        // no subscribers is not an error
        let _ = telemetry.send(Arc::from(world.snapshot().to_json_line()));
    }
}

async fn accept_commands(
    listener: TcpListener,
    inputs: mpsc::Sender<Input>,
    stats: Arc<ServiceStats>,
    mut shutdown: watch::Receiver<bool>,
) {
    loop {
        let (stream, peer) = tokio::select! {
            r = listener.accept() => match r {
                Ok(x) => x,
                Err(e) => {
                    warn!("command accept failed: {e}");
                    continue;
                }
            },
            _ = shutdown.changed() => return,
        };
        debug!("command client {peer}");
        tokio::spawn(read_commands(
            stream,
            inputs.clone(),
            stats.clone(),
            shutdown.clone(),
        ));
    }
}

async fn forward_bytes(bytes: &[u8], inputs: &mpsc::Sender<Input>, stats: &ServiceStats) -> bool {
    for event in decode_stream(bytes) {
        let input = match event {
            DecodeEvent::Command(c) => Input::Command(c),
            DecodeEvent::Unknown(b) => {
                stats.unknown_bytes.fetch_add(1, Ordering::Relaxed);
                Input::Unknown(b)
            }
        };
        if inputs.send(input).await.is_err() {
            return false;
        }
    }
    true
}

async fn read_commands(
    mut stream: TcpStream,
    inputs: mpsc::Sender<Input>,
    stats: Arc<ServiceStats>,
    mut shutdown: watch::Receiver<bool>,
) {
    let mut buf = [0u8; 1024];
    loop {
        let n = tokio::select! {
            r = stream.read(&mut buf) => match r {
                Ok(0) | Err(_) => return,
                Ok(n) => n,
            },
            _ = shutdown.changed() => return,
        };
        if !forward_bytes(&buf[..n], &inputs, &stats).await {
            return;
        }
    }
}

/// Text received on the telemetry channel: `reset` clears a topple, anything
/// else is decoded byte by byte as wire commands.
async fn handle_text(text: &str, inputs: &mpsc::Sender<Input>, stats: &ServiceStats) -> bool {
    let text = text.trim();
    if text.eq_ignore_ascii_case("reset") {
        return inputs.send(Input::Reset).await.is_ok();
    }
    forward_bytes(text.as_bytes(), inputs, stats).await
}

async fn accept_telemetry(
    listener: TcpListener,
    telemetry: broadcast::Sender<Arc<str>>,
    inputs: mpsc::Sender<Input>,
    stats: Arc<ServiceStats>,
    mut shutdown: watch::Receiver<bool>,
) {
    loop {
        let (stream, peer) = tokio::select! {
            r = listener.accept() => match r {
                Ok(x) => x,
                Err(e) => {
                    warn!("telemetry accept failed: {e}");
                    continue;
                }
            },
            _ = shutdown.changed() => return,
        };
        debug!("telemetry client {peer}");
        let rx = telemetry.subscribe();
        let (inputs, stats, shutdown) = (inputs.clone(), stats.clone(), shutdown.clone());
        tokio::spawn(async move {
            let mut probe = [0u8; 4];
            let is_ws = matches!(
                tokio::time::timeout(HANDSHAKE_WINDOW, stream.peek(&mut probe)).await,
                Ok(Ok(4)) if &probe == b"GET "
            );
            if is_ws {
                serve_websocket(stream, rx, inputs, stats, shutdown).await;
            } else {
                serve_raw(stream, rx, inputs, stats, shutdown).await;
            }
        });
    }
}

async fn next_line(
    rx: &mut broadcast::Receiver<Arc<str>>,
    stats: &ServiceStats,
) -> Option<Arc<str>> {
    loop {
        match rx.recv().await {
            Ok(line) => return Some(line),
            Err(broadcast::error::RecvError::Lagged(n)) => {
                stats.dropped_lines.fetch_add(n, Ordering::Relaxed);
            }
            Err(broadcast::error::RecvError::Closed) => return None,
        }
    }
}

async fn serve_raw(
    stream: TcpStream,
    mut rx: broadcast::Receiver<Arc<str>>,
    inputs: mpsc::Sender<Input>,
    stats: Arc<ServiceStats>,
    mut shutdown: watch::Receiver<bool>,
) {
    let (read_half, mut write_half) = stream.into_split();
    let mut lines = BufReader::new(read_half).lines();
    let mut reading = true;
    loop {
        tokio::select! {
            line = next_line(&mut rx, &stats) => {
                let Some(line) = line else { return };
                if write_half.write_all(line.as_bytes()).await.is_err()
                    || write_half.write_all(b"\n").await.is_err()
                {
                    return;
                }
            }
            incoming = lines.next_line(), if reading => match incoming {
                Ok(Some(text)) => {
                    if !handle_text(&text, &inputs, &stats).await {
                        return;
                    }
                }
                _ => reading = false,
            },
            _ = shutdown.changed() => return,
        }
    }
}

async fn serve_websocket(
    stream: TcpStream,
    mut rx: broadcast::Receiver<Arc<str>>,
    inputs: mpsc::Sender<Input>,
    stats: Arc<ServiceStats>,
    mut shutdown: watch::Receiver<bool>,
) {
    let ws = match tokio_tungstenite::accept_async(stream).await {
        Ok(ws) => ws,
        Err(e) => {
            debug!("websocket handshake failed: {e}");
            return;
        }
    };
    let (mut sink, mut source) = ws.split();
    loop {
        tokio::select! {
            line = next_line(&mut rx, &stats) => {
                let Some(line) = line else { break };
                if sink.send(Message::text(line.to_string())).await.is_err() {
                    return;
                }
            }
            msg = source.next() => match msg {
                Some(Ok(Message::Text(text))) => {
                    if !handle_text(text.as_str(), &inputs, &stats).await {
                        break;
                    }
                }
                Some(Ok(Message::Binary(bytes))) => {
                    if !forward_bytes(&bytes, &inputs, &stats).await {
                        break;
                    }
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                Some(Ok(_)) => {}
            },
            _ = shutdown.changed() => break,
        }
    }
    let _ = sink.close().await;
}
