//! Numerical toolkit for Sobolev homeomorphic extensions of boundary
//! parametrizations of planar Jordan domains.

pub mod cli;
pub mod conformal;
pub mod counterexample;
pub mod crosscut;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod svg;

pub use error::{Error, Result};
