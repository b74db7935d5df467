//! Numerical experiments on nodal sets and doubling indices of Dirichlet
//! Laplace eigenfunctions on Lipschitz polygons.

pub mod doubling;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod meshing;
pub mod nodal;
pub mod sampling;
pub mod spectral;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
