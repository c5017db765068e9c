//! Closed constant-torsion elastic rods, their Backlund transformations and
//! the knot and ribbon invariants of the resulting curves.

pub mod backlund;
pub mod cli;
pub mod curves;
pub mod elliptic;
pub mod error;
pub mod invariants;
pub mod rod;
pub mod spectral;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex<f64>;
