//! Benchmark catalogue, convergence studies, and reporting.

pub mod cases;
pub mod config;
pub mod convergence;
pub mod fields;
pub mod report;
pub mod study;
pub mod verify;
