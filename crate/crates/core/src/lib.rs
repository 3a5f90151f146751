mod bigser;
pub mod cli;
pub mod dimension;
pub mod equidist;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod matrix;
pub mod periodic;
pub mod smith;
pub mod spectral;
pub mod surd;

pub use error::{Error, Rejection, Result};
pub use matrix::IntMatrix;
pub use surd::QuadraticSurd;
