//! Exact rational polyhedral geometry, McNaughton-style Z-maps and
//! rationally outgoing tangent certificates.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod mcnaughton;
pub(crate) mod mesh;
pub mod rational;
pub mod report;
pub mod svg;
pub mod tangents;
pub mod triangulation;
pub mod witness;

pub use error::{Error, Result};
pub use rational::{Point, Rational};
