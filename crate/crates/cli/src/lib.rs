// SPDX-License-Identifier: Apache-2.0

//! Scenario runner and geometry shell for set semiflows.

#![forbid(unsafe_code)]

pub mod builtins;
pub mod checks;
pub mod error;
pub mod format;
pub mod geom;
pub mod registry;
pub mod runner;
pub mod scenario;

pub use error::CliError;
pub use registry::Registry;
pub use runner::{run, Report, Status};
pub use scenario::Scenario;
