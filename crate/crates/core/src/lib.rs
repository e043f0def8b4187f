pub mod birkhoff;
pub mod cli;
pub mod cones;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod polyfactor;
pub mod oracle;
pub mod spectral;

pub use error::{Error, Result};
