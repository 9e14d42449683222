//! Batch front-end for the UAV hotspot network model: configuration
//! files, parameter sweeps over both engines, optimum-height search and
//! the oracle self-test.

pub mod config;
pub mod error;
pub mod optimum;
pub mod oracle;
pub mod sweep;

pub use config::{load_with_overrides, parse_config, ConfigFile, Engine, SweepAxis, SweepConfig};
pub use error::CliError;
pub use optimum::{find_optimum_height, Optimum};
pub use sweep::{run_sweep, write_csv, write_outputs, Row};
