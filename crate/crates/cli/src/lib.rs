//! Library side of the `x0star` command: the classification pipeline, golden
//! tables with their regeneration, and the on-disk cache.

pub mod cache;
pub mod error;
pub mod pipeline;
pub mod tables;

pub use error::{CliError, Result};
