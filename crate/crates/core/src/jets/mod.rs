//! Truncated multivariate power series with complex coefficients, and
//! vectors and matrices of them.

mod jet;
mod layout;
mod matrix;
mod vector;

pub use jet::Jet;
pub use matrix::JetMatrix;
pub use vector::JetVector;
