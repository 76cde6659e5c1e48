//! Named residuals shared by all verification reports.

use serde::Serialize;

use crate::jets::{Jet, JetMatrix, JetVector};

/// Uniform norm of one jet identity, with the jet order at which it was
/// evaluated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub order: usize,
}

impl Residual {
    pub fn new(name: impl Into<String>, value: f64, order: usize) -> Residual {
        Residual {
            name: name.into(),
            value,
            order,
        }
    }
}

/// Reports that reduce to a list of named residuals.
pub trait Residuals {
    fn residuals(&self) -> Vec<Residual>;

    fn max_residual(&self) -> f64 {
        self.residuals().iter().map(|r| r.value).fold(0.0, f64::max)
    }

    /// True when every residual is at most `tol` (NaN never passes).
    fn passes(&self, tol: f64) -> bool {
        self.residuals().iter().all(|r| r.value <= tol)
    }
}

/// Running maximum of residual norms together with the smallest trusted
/// order seen.
#[derive(Clone, Copy, Debug)]
pub(crate) struct MaxNorm {
    pub value: f64,
    pub order: usize,
}

impl MaxNorm {
    pub fn new(order: usize) -> MaxNorm {
        MaxNorm { value: 0.0, order }
    }

    pub fn push(&mut self, value: f64, order: usize) {
        if value.is_nan() || value > self.value {
            self.value = if self.value.is_nan() {
                self.value
            } else {
                value
            };
        }
        self.order = self.order.min(order);
    }

    pub fn jet(&mut self, j: &Jet) {
        self.push(j.residual_norm(), j.valid_order());
    }

    pub fn vector(&mut self, v: &JetVector) {
        self.push(v.residual_norm(), v.min_valid_order());
    }

    pub fn matrix(&mut self, m: &JetMatrix) {
        self.push(m.residual_norm(), m.min_valid_order());
    }

    pub fn residual(&self, name: &str) -> Residual {
        Residual::new(name, self.value, self.order)
    }
}
