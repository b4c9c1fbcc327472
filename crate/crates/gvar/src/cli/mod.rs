//! Command-line harness: config schema, command runners, and the verify
//! suite. Exit-code contract: 0 all checks pass, 1 an assertion failed,
//! 2 config/premise error.

mod commands;
mod config;
mod verify;

pub use commands::{cmd_conditions, cmd_construct, cmd_oracle_check, cmd_variation, CliError};
pub use config::{ConfigError, ConstructionKind, ExperimentConfig, ExponentSpec, LambdaSpec};
pub use verify::{cmd_verify, run_verify, Assertion, VerifyOutcome};
