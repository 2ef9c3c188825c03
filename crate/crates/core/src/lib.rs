pub mod error;
pub mod metrics;
pub mod model;
pub mod montecarlo;
pub mod specfun;

pub use error::{Error, Result};
