//! Two-site DMRG for open spin-1/2 chains with short-range multi-spin exchange.
//!
//! Hamiltonians are given as sums of [`operator::OperatorString`]s, compiled
//! into an MPO by [`mpo::compile_mpo`], and solved by [`dmrg::dmrg_ground`].
//! [`chain`] builds the strings of the two-sublattice chain.

pub mod chain;
pub mod dmrg;
pub mod mpo;
pub mod mps;
pub mod operator;

pub use chain::{chain_mpo, chain_strings};
pub use dmrg::{dmrg_ground, dmrg_ground_seeds, expectation, DmrgResult, SweepConfig};
pub use mpo::{compile_mpo, Mpo};
pub use mps::Mps;
pub use operator::{LocalOp, OperatorString};
