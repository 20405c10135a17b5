//! ewlab — a numerical laboratory for entanglement witnesses.
//!
//! Builds the Φ^(n,k) family of positive-but-not-completely-positive maps,
//! turns maps into witnesses through the Choi–Jamiołkowski isomorphism, and
//! checks witness axioms, optimality evidence, spanning properties,
//! decomposability and structural physical approximations, all with seeded,
//! reproducible numerics.
//!
//! Core math is generic over the real scalar (f32 or f64) through
//! [`scalar::Scalar`]; the aliases below fix the default f64 instantiation
//! used by the CLI and the JSON formats.

pub mod decomp;
pub mod error;
pub mod json;
pub mod linalg;
pub mod optimality;
pub mod posmaps;
pub mod rng;
pub mod scalar;
pub mod witness;

pub use error::{Error, Result};

/// Default-precision matrix.
pub type Matrix = linalg::ComplexMatrix<f64>;
/// Default-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Default-precision elementary map.
pub type Map = posmaps::ElementaryMap<f64>;
/// Default-precision witness.
pub type Wit = witness::Witness<f64>;
