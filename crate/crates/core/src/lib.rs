pub mod arith;
pub mod conventions;
pub mod curve;
pub mod energy;
pub mod error;
pub mod hodge;
pub mod psi;
pub mod recursion;
pub mod session;
pub mod verify;

pub use error::{Error, Result};
