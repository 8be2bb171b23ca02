//! Command-line front end: configuration, reproducible workloads and the
//! four run modes.

pub mod commands;
pub mod config;
pub mod csv;
pub mod systems;
