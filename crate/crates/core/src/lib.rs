//! Numeric verification of the geometry of Schrödinger manifolds.

pub mod ambient;
pub mod bargmann;
pub mod error;
pub mod geometry;
pub mod homogeneous;
pub mod numkernel;
pub mod report;

pub use error::{Error, Result};
