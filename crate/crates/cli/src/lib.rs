//! Configuration, presets, scans and table output for `adnovel-core`.

pub mod config;
pub mod error;
pub mod presets;
pub mod runner;
pub mod table;

pub use config::{Format, RunConfig};
pub use error::{CliError, Result};
pub use runner::{run, scan};
pub use table::ResultTable;
