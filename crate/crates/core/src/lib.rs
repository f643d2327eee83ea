//! Compactly supported orthogonal wavelets from Douglas–Rachford iterations
//! on matrix-ensemble feasibility problems.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, timing and the
//! command line live in the `drw` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ensemble;
pub mod error;
pub mod filters;
pub mod fourier;
pub mod grid;
pub mod projections;
pub mod render;
pub mod solver;
pub mod unitary;
pub mod verify;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
