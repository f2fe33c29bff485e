pub mod error;
pub mod harness;
pub mod io;
pub mod localfield;
pub mod matalg;
pub mod orbint;
pub mod orbitspace;
pub mod schwartz;

pub use error::{Error, Result};
