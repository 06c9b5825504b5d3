//! Numerical library for the conjugate conductivity equations
//! Delta u + (alpha/x) du/dx = 0 with integer alpha, posed on the disk
//! D(a, 1) in the right half-plane.
//!
//! The crate evaluates interior solutions from Dirichlet/Neumann boundary
//! data through Riemann-Hilbert integral representations (separately for even
//! and odd alpha), converts Dirichlet data to Neumann data for even alpha via
//! the global relation, and ships independent ground-truth machinery (exact
//! polynomial and rational solutions, a finite-difference reference solver)
//! for validation.

pub mod boundary;
pub mod dtn;
pub mod error;
pub mod field;
pub mod geometry;
pub mod lax;
pub mod oracles;
pub mod quad;
pub mod rh_even;
pub mod rh_odd;

#[cfg(test)]
pub(crate) mod probe;

pub use boundary::{BoundaryData, BoundaryDoc, TrigSeries};
pub use error::{Error, Result};
pub use geometry::{DiskDomain, CirclePoint};
