//! Batch front end for `exptest-core`: one scenario per invocation, driven
//! by a TOML config, emitting CSV and JSON artifacts plus a manifest.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_config_unvalidated, serialize_config, Mode, ScenarioConfig, ScenarioKind};
pub use error::{CliError, CliResult};
pub use run::{run_scenario, RunManifest, RunOptions};

/// Exit code for a manipulation run that finished without certification.
pub const EXIT_UNCERTIFIED: i32 = 13;
