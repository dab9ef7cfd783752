//! Simulation of a flux-coupled mechanical interferometer.

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decoherence;
pub mod device;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod phasespace;
pub mod protocol;
pub mod quadrature;

pub use error::{Error, Result};
