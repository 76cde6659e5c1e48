use thiserror::Error;

/// Errors raised by the jet kernel and the geometric constructions built on it.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range for {what} of size {size}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("singular input: {0}")]
    Singular(String),

    #[error("branch anchor {anchor} is not a square root of {value}")]
    InvalidAnchor { anchor: String, value: String },

    #[error("endomorphism is not regular (best reciprocal condition {rcond:.3e})")]
    NotRegular { rcond: f64 },

    #[error("ambiguous eigenvalue clustering: gap {gap:.3e} is within a factor 10 of the threshold {threshold:.3e}")]
    AmbiguousClustering { gap: f64, threshold: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("vector is not cyclic (reciprocal condition {rcond:.3e})")]
    NotCyclic { rcond: f64 },

    #[error("operation out of scope: {0}")]
    Scope(String),

    #[error("no isomorphism: {0}")]
    NoIsomorphism(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),

    #[error("one-form is not invertible: {0}")]
    NotInvertible(String),

    #[error("section is not primitive: {0}")]
    NotPrimitive(String),

    #[error("section is not homogeneous: |R_inf s - q s| = {residual:.3e}")]
    NotHomogeneous { residual: f64 },

    #[error("chart degeneracy: {0}")]
    ChartDegeneracy(String),

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("construction inconsistency: {0}")]
    ConstructionInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
