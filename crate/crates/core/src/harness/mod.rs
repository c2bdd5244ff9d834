//! Configuration, persistence and the operations behind the command line.

pub mod commands;
pub mod config;
pub mod csv;
pub mod snapshot;

pub use commands::{diagnose, mollify_datum, prepare_datum, run, sweep, twin, RunOutcome};
pub use config::{parse_config, RunConfig};
pub use csv::{emit_diagnostics_csv, format_diagnostics_csv, COLUMNS};
pub use snapshot::{decode_snapshot, encode_snapshot, read_snapshot, write_snapshot};

/// Reads and parses a configuration file.
pub fn load_config(path: &std::path::Path) -> Result<RunConfig, crate::error::HarnessError> {
    parse_config(&std::fs::read_to_string(path)?)
}
