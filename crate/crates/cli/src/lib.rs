//! Command-line front end: runs JSON scenarios and writes CSV.

pub mod error;
pub mod format;
pub mod run;
pub mod scenario;

pub use error::CliError;
pub use run::{run, RunOptions};
pub use scenario::{ModeOverride, Scenario};
