//! Experiments on the states of the equator and its rotations: figure data
//! as CSV, and the acceptance suite.

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod pair;
pub mod table;

pub use config::{AlphaSpec, Command, ExperimentConfig, Profile};
pub use error::{Error, Result};
pub use experiments::{run, Check, Outcome};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "LAGFID_THREADS";

/// Thread count requested through [`THREADS_VAR`], if any.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{THREADS_VAR} must be a positive integer, got `{text}`"
            ))),
        },
    }
}
