//! Command-line tools and file formats for [`lmse_core`].
//!
//! Provides the `lmse` binary (`partition`, `resample` and `benchmark`
//! subcommands), the CSV readers and writers it uses, and a rayon-backed
//! Monte Carlo driver that produces the same records as the sequential one.

pub mod cli;
pub mod error;
pub mod io;
pub mod runner;

pub use error::{exit, CliError};
pub use runner::run_benchmark_parallel;
