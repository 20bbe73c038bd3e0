//! Scenario files, the example gallery, the runner and file formats on top
//! of `fixlab-core`.

pub mod cli;
pub mod gallery;
pub mod output;
pub mod runner;
pub mod scenario;

pub use runner::{run, Options, Outcome, RunError, RunReport};
pub use scenario::{parse, validate, validate_source, Diagnostic, Scenario};
