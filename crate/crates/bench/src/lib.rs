//! Benchmark harness for the relaxproj solvers: configuration, experiment
//! drivers, empirical-rate fitting and CSV output.

pub mod commands;
pub mod config;
pub mod experiments;
pub mod methods;
pub mod output;
pub mod rates;

pub use config::BenchConfig;
pub use methods::Method;
