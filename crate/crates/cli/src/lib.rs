//! Experiment driver for the curve shortening flow near the Abresch-Langer
//! curves: stationary profiles, single evolutions, ε sweeps and the
//! acceptance checks.

pub mod commands;
pub mod config;
pub mod experiment;
pub mod verify;
