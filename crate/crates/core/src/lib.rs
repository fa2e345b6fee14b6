pub mod cli;
pub mod codec;
pub mod data;
pub mod error;
pub mod metrics;
pub mod numerics;
pub mod privacy;

pub use error::{Error, FormatError, Result};
