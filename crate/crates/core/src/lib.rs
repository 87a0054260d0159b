//! Numerical core for estimating a full matrix of structural responses from a
//! budgeted subset of nonlinear simulations.
//!
//! The crate is `no_std` and only needs an allocator. Everything that touches
//! files, threads, or the command line lives in the `edpfill` companion crate.
//!
//! Module map:
//!
//! * [`data`]: response matrices, observation masks, feature tables, and the
//!   masked relative error.
//! * [`lowdisc`]: Latin hypercube, Halton, and Sobol samplers plus the
//!   Gaussian marginal transform.
//! * [`gm`]: synthetic ground motions and the 31-entry intensity-measure vector.
//! * [`structsim`]: bilinear hysteretic shear building with Newmark integration.
//! * [`cluster`]: feature standardization and PAM k-medoids.
//! * [`masking`]: uniform and cluster-stratified observation masks.
//! * [`completion`]: regularized alternating least squares.
//! * [`regression`]: linear and RBF kernel ridge regression, and the two-model
//!   ensemble.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cluster;
pub mod completion;
pub mod data;
mod error;
pub mod gm;
pub mod linalg;
pub mod lowdisc;
pub mod masking;
pub mod regression;
pub mod seed;
pub mod structsim;

pub use error::{Error, Result};
pub use linalg::Dense;
