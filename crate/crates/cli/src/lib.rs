//! The std companion to `qmlkit-core`: dataset ingestion, experiment
//! configuration, file formats, parallel Gram/quanvolution wrappers, and the
//! experiment runner behind the `qmlkit` binary.

pub mod config;
pub mod data;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod runner;
pub mod synthetic;

pub use error::RunError;
