pub mod certify;
pub mod constructions;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod onebit;
pub mod sampling;
pub mod sdp;

pub use error::{Error, Result};
