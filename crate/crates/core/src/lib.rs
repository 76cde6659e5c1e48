//! Regular F-manifolds as truncated power series.
//!
//! Every structure (multiplications, vector fields, metrics, connection
//! matrices) is a jet at the origin of a coordinate chart, and every axiom
//! is checked as the uniform norm of a jet residual.

pub mod error;
pub mod fman;
pub mod frob;
pub mod jets;
pub mod linalg;
pub mod malgrange;
pub mod regend;
pub mod report;
pub mod saito;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default truncation order for jets.
pub const DEFAULT_ORDER: usize = 4;

/// Default absolute residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
