//! File formats, configuration, the experiment driver and report writers
//! built on `edpfill-core`.

pub mod config;
pub mod csvio;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod report;

pub use edpfill_core as core;
pub use error::{Error, Result};
