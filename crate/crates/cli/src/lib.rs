//! Config-driven experiment runner behind the `topamp` binary.

pub mod config;
pub mod emit;
pub mod experiments;
pub mod table;
