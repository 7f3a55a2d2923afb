//! Shared error type and small fixed-size vector helpers for the isoshell crates.

pub mod error;
pub mod math;

pub use error::{Error, Result};
