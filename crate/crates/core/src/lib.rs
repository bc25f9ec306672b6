pub mod correlators;
pub mod density;
pub mod emit;
pub mod error;
pub mod model;
pub mod quadrature;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};
