//! Gateway: CLI commands, the HTTP service, the attempt log and batch
//! evaluation.

pub mod attempt_log;
pub mod batch;
pub mod cli;
pub mod server;
