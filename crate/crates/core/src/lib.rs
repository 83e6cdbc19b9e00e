pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod fracspace;
pub mod fractime;
pub mod lab;

pub use error::{Error, Result};
