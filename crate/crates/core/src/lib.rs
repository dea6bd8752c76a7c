//! Spectral toolkit for two-layer potential-flow interfaces: geometry of the
//! free boundary, harmonic extensions, energy functionals, linear theory and
//! a graph-interface time integrator with conservation and virial monitors.

pub mod dynamics;
pub mod energetics;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod io;
pub mod linear;
pub mod spectral;

pub use error::{Error, Result};
