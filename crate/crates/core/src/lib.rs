//! Pseudo-spectral simulation and verification toolkit for the density-dependent
//! incompressible Euler equations on the 2D torus.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod harness;
pub mod norms;
pub mod pressure;
pub mod spectral;

pub use error::*;
pub use field::{ScalarField, VectorField};
pub use grid::Grid;
