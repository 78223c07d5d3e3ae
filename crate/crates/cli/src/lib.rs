//! Library surface of the experiment runner, shared by the `entsim` binary
//! and the integration tests.

pub mod config;
pub mod presets;
pub mod runner;
pub mod svg;
