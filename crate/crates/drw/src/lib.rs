//! File formats, CSV export, parallel batches and the `drw` command line on
//! top of `drw-core`.

pub mod cli;
pub mod error;
pub mod export;
pub mod formats;
pub mod run;
pub mod table;

pub use error::{Error, Result};
