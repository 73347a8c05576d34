mod common;

use std::collections::HashMap;
use std::sync::atomic::Ordering;
use std::time::Duration;

use common::{send_bytes, RawClient, WsClient};
use hexsim_cli::{Service, ServiceConfig, ServiceError};
use hexsim_core::protocol::decode_stream;
use hexsim_core::{DecodeEvent, LegModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TICK_RATE: f64 = 50.0;

async fn start() -> Service {
    Service::start(ServiceConfig {
        tick_rate_hz: TICK_RATE,
        ..ServiceConfig::ephemeral()
    })
    .await
    .unwrap()
}

fn per_tick() -> f64 {
    LegModel::default().period() / (1.2 * TICK_RATE)
}

#[test]
fn config_validation() {
    let mut c = ServiceConfig::default();
    assert_eq!((c.command_port, c.telemetry_port), (7060, 7061));
    assert!(c.validate().is_ok());
    c.telemetry_port = c.command_port;
    assert!(matches!(c.validate(), Err(ServiceError::InvalidConfig(_))));
    let mut c = ServiceConfig::default();
    for rate in [5.0, 2000.0, f64::NAN] {
        c.tick_rate_hz = rate;
        assert!(c.validate().is_err(), "{rate}");
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn occupied_port_is_reported() {
    let first = start().await;
    let taken = first.command_addr().port();
    let err = Service::start(ServiceConfig {
        command_port: taken,
        ..ServiceConfig::ephemeral()
    })
    .await
    .err()
    .unwrap();
    assert!(
        matches!(err, ServiceError::PortInUse { port } if port == taken),
        "{err}"
    );
    first.shutdown().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn forward_byte_takes_effect_within_two_ticks() {
    let service = start().await;
    let mut tel = RawClient::connect(service.telemetry_addr()).await;
    assert_eq!(tel.snapshot().await.mode, "idle");
    let _cmd = send_bytes(service.command_addr(), b"F").await;
    let sent_at = service.stats().ticks.load(Ordering::SeqCst);
    loop {
        let s = tel.snapshot().await;
        if s.mode == "walking:forward" {
            let tick = (s.t / per_tick()).round() as u64;
            assert!(
                tick <= sent_at + 2,
                "applied at tick {tick}, sent after {sent_at}"
            );
            break;
        }
        assert_eq!(s.mode, "idle");
    }
    assert_eq!(service.stats().commands.load(Ordering::SeqCst), 1);
    service.shutdown().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn subscribers_see_the_same_stream() {
    let service = start().await;
    let mut raw = RawClient::connect(service.telemetry_addr()).await;
    let mut ws = WsClient::connect(service.telemetry_addr()).await;
    let _cmd = send_bytes(service.command_addr(), b"L").await;
    let mut seen = HashMap::new();
    for _ in 0..30 {
        let line = raw.line().await;
        let t: f64 = serde_json::from_str::<serde_json::Value>(&line).unwrap()["t"]
            .as_f64()
            .unwrap();
        seen.insert(t.to_bits(), line);
    }
    let mut matched = 0;
    for _ in 0..20 {
        let line = ws.line().await;
        let t: f64 = serde_json::from_str::<serde_json::Value>(&line).unwrap()["t"]
            .as_f64()
            .unwrap();
        if let Some(other) = seen.get(&t.to_bits()) {
            assert_eq!(other, &line);
            matched += 1;
        }
    }
    assert!(matched >= 10, "{matched}");
    service.shutdown().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn random_bytes_leave_the_service_healthy() {
    let service = start().await;
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let bytes: Vec<u8> = (0..500).map(|_| rng.random()).collect();
    let unknown = decode_stream(&bytes)
        .filter(|e| matches!(e, DecodeEvent::Unknown(_)))
        .count() as u64;
    let _cmd = send_bytes(service.command_addr(), &bytes).await;
    let mut tel = RawClient::connect(service.telemetry_addr()).await;
    let mut annotated = 0;
    let deadline = tokio::time::Instant::now() + Duration::from_secs(3);
    while service.stats().unknown_bytes.load(Ordering::SeqCst) < unknown || annotated < unknown {
        assert!(
            tokio::time::Instant::now() < deadline,
            "fuzz input not fully processed"
        );
        let s = tel.snapshot().await;
        annotated += s
            .ann
            .iter()
            .filter(|a| a.starts_with("protocol:unknown_byte"))
            .count() as u64;
    }
    assert_eq!(
        service.stats().unknown_bytes.load(Ordering::SeqCst),
        unknown
    );
    let ticks = service.stats().ticks.load(Ordering::SeqCst);
    // a fresh subscriber still receives well-formed telemetry and the loop keeps ticking
    let mut fresh = WsClient::connect(service.telemetry_addr()).await;
    for _ in 0..3 {
        assert_eq!(fresh.snapshot().await.legs.len(), 6);
    }
    assert!(service.stats().ticks.load(Ordering::SeqCst) > ticks);
    service.shutdown().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn websocket_commands_topple_and_reset() {
    let service = start().await;
    let mut ws = WsClient::connect(service.telemetry_addr()).await;
    ws.send("F").await;
    // wait until every foot is off the ground, then stop and jog one leg alone
    let mut airborne = false;
    for _ in 0..200 {
        let s = ws.snapshot().await;
        if s.mode == "walking:forward" && s.legs.iter().all(|l| !l.stance) {
            airborne = true;
            break;
        }
    }
    assert!(airborne);
    ws.send("Sa").await;
    let mut toppled = false;
    for _ in 0..400 {
        let s = ws.snapshot().await;
        if s.mode == "toppled" {
            toppled = true;
            break;
        }
    }
    assert!(toppled);
    assert!(service.stats().toppled.load(Ordering::SeqCst));
    ws.send("F").await;
    ws.send("reset").await;
    let mut ignored = false;
    loop {
        let s = ws.snapshot().await;
        ignored |= s.ann.iter().any(|a| a.starts_with("state:toppled:ignored"));
        if s.ann.iter().any(|a| a == "event:reset") {
            assert_eq!(s.mode, "idle");
            break;
        }
    }
    assert!(ignored);
    service.shutdown().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn raw_subscriber_lines_are_commands_too() {
    let service = start().await;
    let mut tel = RawClient::connect(service.telemetry_addr()).await;
    tel.snapshot().await;
    tel.send_line("B").await;
    for _ in 0..50 {
        if tel.snapshot().await.mode == "walking:backward" {
            service.shutdown().await;
            return;
        }
    }
    panic!("backward never applied");
}
