pub mod dictionary;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
