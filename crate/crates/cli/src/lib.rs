//! Offline commands and the networked teleop service behind the `hexsim` binary.

pub mod commands;
pub mod service;

pub use commands::{analyze, protocol_table, simulate, AnalysisKind, CliError, SimulateArgs};
pub use service::{Service, ServiceConfig, ServiceError, ServiceStats};
