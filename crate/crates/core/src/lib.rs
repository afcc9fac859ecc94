pub mod dde;
pub mod error;
pub mod freq;
pub mod model;
pub mod scenarios;
pub mod spatial;

pub use error::{Error, Result};
