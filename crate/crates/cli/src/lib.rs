//! File formats, threaded drivers and the `zgraphon` command line for
//! [`zgraphon_core`].

pub mod cli;
pub mod error;
pub mod format;
pub mod parallel;

pub use cli::run;
pub use error::CliError;
