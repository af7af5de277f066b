//! File formats, run configuration, reports and the command line around
//! `conceptmine-core`.

pub mod cli;
pub mod config;
mod error;
pub mod formats;
pub mod pipeline;
pub mod report;
pub mod run;

pub use error::{Error, Result, StageContext};
