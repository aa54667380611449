//! Configuration-driven experiment runner with CSV artifacts.

pub mod config;
pub mod converge;
pub mod provenance;
pub mod runner;
pub mod units;

pub use config::{parse_config, parse_config_unchecked, ConfigError, Experiment, RunConfig};
pub use provenance::ProvenanceHeader;
pub use runner::{run_experiment, RunError, RunReport};
