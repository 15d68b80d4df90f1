//! Seeded verification scenarios over `wittquant`, and the pieces of the
//! `wittquant` command: configuration, sampling, named checks, reports and
//! suites.

pub mod checks;
pub mod config;
pub mod error;
pub mod eval;
pub mod registry;
pub mod report;
pub mod sampling;
pub mod scenarios;
pub mod spans;
pub mod suite;

pub use config::{ConfigPatch, Mutation, ScenarioConfig};
pub use error::{HarnessError, Result};
pub use report::{Format, ScenarioReport, Verdict, Witness};
pub use scenarios::{replay, run_scenario};
pub use suite::{run_configs, run_suite, Profile, SuiteReport};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/harness.md")]
mod book_harness {}
