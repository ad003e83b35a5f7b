//! Free-fermion analysis of a two-sublattice spin-1/2 chain with alternating
//! nearest-neighbour, three-spin and four-spin exchange.
//!
//! The chain maps onto a number-conserving quadratic fermion model, so most
//! quantities reduce to sums over two-band Bogoliubov data per momentum mode.
//! Modules:
//!
//! * [`model`]: dispersion, critical lines, phase classification, ground-state
//!   energy and magnetisation.
//! * [`geometry`]: quantum information metric, Ricci scalar, geodesics and
//!   Fubini-Study complexity.
//! * [`quench`]: static and time-dependent Nielsen complexity, Loschmidt echo
//!   and the multi-segment quench engine (also driving the transverse XY chain).
//! * [`realspace`]: real-space hopping matrices and correlation-matrix
//!   entanglement entropy.
//! * [`ed`]: exact diagonalisation of the spin Hamiltonian for small chains.
//! * [`lanczos`], [`numeric`]: shared numerical kernels.

extern crate blas_src;

pub mod ed;
pub mod error;
pub mod geometry;
pub mod lanczos;
pub mod model;
pub mod numeric;
pub mod params;
pub mod quench;
pub mod realspace;

pub use error::{Error, Result};
pub use params::{GeneralCouplings, ReducedParams};
