pub mod error;
pub mod linalg;
pub mod morse;
pub mod nondegen;
pub mod polyring;
pub mod polytope;
pub mod relax;
pub mod sdp;
mod ser;

pub use error::{Error, Result};
