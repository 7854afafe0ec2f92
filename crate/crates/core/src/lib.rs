pub mod error;
pub mod geometry;
pub mod irs;
pub mod locator;
pub mod scheduler;
pub mod comms;
pub mod signal;
pub mod simkit;

pub use error::{Error, Result};
