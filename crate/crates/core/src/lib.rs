pub mod distributions;
pub mod entropy_bounds;
pub mod error;
pub mod figures;
pub mod mi_bounds;
pub mod moment_core;
pub mod optimize;
pub mod quadrature;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
