//! Software emulator of p-bit Ising machines for 3-regular 3-XORSAT.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! * [`instance`]: planted instance generation, exact GF(2) ground energies,
//!   cubic / quadratic / binary Ising encodings and their file formats.
//! * [`coloring`]: DSATUR graph colorings and strong hypergraph colorings that
//!   define the parallel update blocks.
//! * [`sampler`]: chromatic Gibbs sampling of p-bit networks, hardware-style
//!   fixed-point mode and master-graph multiplexing.
//! * [`apt`]: adaptive parallel tempering (ladder preprocessing, replica
//!   exchange solve, campaigns).
//! * [`benchmark`]: time-to-solution curves, bootstrap quantiles, scaling fits
//!   and reports.
//! * [`validate`]: the invariant suites shared by the CLI and the tests.

pub mod apt;
pub mod benchmark;
pub mod coloring;
pub mod error;
pub mod instance;
pub mod sampler;
pub mod seed;
pub mod validate;

pub use error::{Error, Result};
pub use instance::{Convention, IsingModel, XorsatInstance};
