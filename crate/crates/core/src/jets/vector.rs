use std::ops::{Add, Index, Sub};

use nalgebra::DVector;
use num_complex::Complex64;

use super::{Jet, JetMatrix};
use crate::error::{Error, Result};

/// Non-empty list of jets sharing `(num_vars, order)`. Used both for vector
/// fields (components in the coordinate frame) and for maps between charts
/// (one coordinate function per component).
#[derive(Clone, Debug, PartialEq)]
pub struct JetVector {
    comps: Vec<Jet>,
}

impl JetVector {
    pub fn new(comps: Vec<Jet>) -> Result<JetVector> {
        let first = comps
            .first()
            .ok_or_else(|| Error::Shape("empty jet vector".into()))?;
        if let Some(bad) = comps.iter().find(|c| !c.same_shape(first)) {
            return Err(Error::Shape(format!(
                "jet vector mixes (num_vars, order) = ({}, {}) and ({}, {})",
                first.num_vars(),
                first.order(),
                bad.num_vars(),
                bad.order()
            )));
        }
        Ok(JetVector { comps })
    }

    pub fn zeros(len: usize, num_vars: usize, order: usize) -> JetVector {
        assert!(len > 0, "empty jet vector");
        JetVector {
            comps: vec![Jet::zero(num_vars, order); len],
        }
    }

    /// The coordinate map `t ↦ t`.
    pub fn identity(num_vars: usize, order: usize) -> JetVector {
        JetVector {
            comps: (0..num_vars)
                .map(|i| Jet::var(num_vars, order, i).expect("variable in range"))
                .collect(),
        }
    }

    /// Constant coordinate field `∂_i`.
    pub fn basis(len: usize, num_vars: usize, order: usize, i: usize) -> JetVector {
        let mut v = JetVector::zeros(len, num_vars, order);
        v.comps[i] = Jet::real(num_vars, order, 1.0);
        v
    }

    pub fn from_constant(values: &[Complex64], num_vars: usize, order: usize) -> JetVector {
        JetVector::new(
            values
                .iter()
                .map(|&c| Jet::constant(num_vars, order, c))
                .collect(),
        )
        .expect("non-empty constant vector")
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn num_vars(&self) -> usize {
        self.comps[0].num_vars()
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    pub fn min_valid_order(&self) -> usize {
        self.comps.iter().map(Jet::valid_order).min().unwrap_or(0)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Jet> {
        self.comps.iter()
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Jet> {
        self.comps
    }

    pub fn set(&mut self, i: usize, value: Jet) {
        assert!(
            value.same_shape(&self.comps[0]),
            "jet shape mismatch in set"
        );
        self.comps[i] = value;
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> JetVector {
        JetVector {
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> JetVector {
        self.map(|a| a.scale(c))
    }

    pub fn scale_real(&self, c: f64) -> JetVector {
        self.map(|a| a.scale_real(c))
    }

    /// Pointwise product with a scalar jet.
    pub fn mul_jet(&self, f: &Jet) -> JetVector {
        self.map(|a| a * f)
    }

    pub fn checked_add(&self, other: &JetVector) -> Result<JetVector> {
        self.zip_with(other, Jet::checked_add)
    }

    pub fn checked_sub(&self, other: &JetVector) -> Result<JetVector> {
        self.zip_with(other, Jet::checked_sub)
    }

    fn zip_with(
        &self,
        other: &JetVector,
        f: impl Fn(&Jet, &Jet) -> Result<Jet>,
    ) -> Result<JetVector> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "jet vectors of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| f(a, b))
            .collect::<Result<_>>()?;
        Ok(JetVector { comps })
    }

    /// Derivative of `f` along the vector field: `Σ_k X^k ∂_k f`.
    pub fn derivative(&self, f: &Jet) -> Result<Jet> {
        if self.len() != f.num_vars() {
            return Err(Error::Shape(format!(
                "vector field with {} components acting on a jet in {} variables",
                self.len(),
                f.num_vars()
            )));
        }
        let mut out = Jet::zero(f.num_vars(), f.order());
        for (k, xk) in self.comps.iter().enumerate() {
            out += &xk.checked_mul(&f.partial(k)?)?;
        }
        Ok(out)
    }

    /// Lie bracket of vector fields, `[X, Y]^k = X(Y^k) − Y(X^k)`.
    pub fn bracket(&self, other: &JetVector) -> Result<JetVector> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(xk, yk)| self.derivative(yk)?.checked_sub(&other.derivative(xk)?))
            .collect::<Result<_>>()?;
        JetVector::new(comps)
    }

    /// Componentwise composition `X^k ∘ φ`.
    pub fn compose(&self, subs: &JetVector) -> Result<JetVector> {
        JetVector::new(
            self.comps
                .iter()
                .map(|a| a.compose(subs))
                .collect::<Result<_>>()?,
        )
    }

    pub fn partial(&self, i: usize) -> Result<JetVector> {
        JetVector::new(
            self.comps
                .iter()
                .map(|a| a.partial(i))
                .collect::<Result<_>>()?,
        )
    }

    pub fn to_order(&self, order: usize) -> JetVector {
        self.map(|a| a.to_order(order))
    }

    pub fn with_valid_order(&self, valid: usize) -> JetVector {
        self.map(|a| a.clone().with_valid_order(valid))
    }

    /// Jacobian matrix `J[k][l] = ∂_l X^k` of a map given by its coordinate
    /// functions.
    pub fn jacobian(&self) -> Result<JetMatrix> {
        let nv = self.num_vars();
        let mut entries = Vec::with_capacity(self.len() * nv);
        for a in &self.comps {
            for l in 0..nv {
                entries.push(a.partial(l)?);
            }
        }
        JetMatrix::new(self.len(), nv, entries)
    }

    /// Compositional inverse of a map germ `φ` with `φ(0) = 0` and
    /// invertible linear part, by the fixed-point iteration
    /// `ψ ← ψ − L^{-1}(φ∘ψ − id)` with `L = Dφ(0)`; each step gains one order.
    pub fn inverse_map(&self) -> Result<JetVector> {
        let n = self.len();
        if n != self.num_vars() {
            return Err(Error::Shape(format!(
                "inverse of a map from {} to {} variables",
                self.num_vars(),
                n
            )));
        }
        if self.comps.iter().any(|c| c.constant_term().norm() != 0.0) {
            return Err(Error::Shape(
                "inverse of a map germ not fixing the origin".into(),
            ));
        }
        let lin = self.jacobian()?.constant_part();
        let lin_inv = lin
            .try_inverse()
            .ok_or_else(|| Error::Singular("map germ with singular linear part".into()))?;
        let lin_inv = JetMatrix::from_constant(&lin_inv, n, self.order());
        let id = JetVector::identity(n, self.order());
        let mut psi = lin_inv.mul_vec(&id)?;
        for _ in 0..self.order() {
            let defect = self.compose(&psi)?.checked_sub(&id)?;
            psi = psi.checked_sub(&lin_inv.mul_vec(&defect)?)?;
        }
        Ok(psi.with_valid_order(self.min_valid_order()))
    }

    pub fn constant_part(&self) -> DVector<Complex64> {
        DVector::from_iterator(self.len(), self.comps.iter().map(Jet::constant_term))
    }

    pub fn residual_norm(&self) -> f64 {
        self.comps
            .iter()
            .map(Jet::residual_norm)
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(Jet::max_abs).fold(0.0, f64::max)
    }
}

impl Index<usize> for JetVector {
    type Output = Jet;
    fn index(&self, i: usize) -> &Jet {
        &self.comps[i]
    }
}

impl<'a> IntoIterator for &'a JetVector {
    type Item = &'a Jet;
    type IntoIter = std::slice::Iter<'a, Jet>;
    fn into_iter(self) -> Self::IntoIter {
        self.comps.iter()
    }
}

impl<'a> Add<&'a JetVector> for &'a JetVector {
    type Output = JetVector;
    fn add(self, rhs: &'a JetVector) -> JetVector {
        self.checked_add(rhs)
            .expect("jet vector shape mismatch in +")
    }
}

impl<'a> Sub<&'a JetVector> for &'a JetVector {
    type Output = JetVector;
    fn sub(self, rhs: &'a JetVector) -> JetVector {
        self.checked_sub(rhs)
            .expect("jet vector shape mismatch in -")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_mixed_vectors_are_rejected() {
        assert!(JetVector::new(vec![]).is_err());
        assert!(JetVector::new(vec![Jet::zero(1, 2), Jet::zero(1, 3)]).is_err());
    }

    #[test]
    fn bracket_of_euler_like_fields() {
        // [∂0, t0 ∂0] = ∂0
        let d0 = JetVector::basis(1, 1, 3, 0);
        let x = JetVector::identity(1, 3);
        let b = d0.bracket(&x).unwrap();
        assert_eq!(b[0], Jet::real(1, 3, 1.0));
    }

    #[test]
    fn inverse_map_round_trip() {
        let t0 = Jet::var(2, 4, 0).unwrap();
        let t1 = Jet::var(2, 4, 1).unwrap();
        let phi =
            JetVector::new(vec![&t0 + &(&t1 * &t1), &t1 + &(&t0 * &t1).scale_real(0.5)]).unwrap();
        let psi = phi.inverse_map().unwrap();
        let back = phi.compose(&psi).unwrap();
        assert!((&back - &JetVector::identity(2, 4)).max_abs() < 1e-14);
        let back = psi.compose(&phi).unwrap();
        assert!((&back - &JetVector::identity(2, 4)).max_abs() < 1e-14);
    }

    #[test]
    fn derivative_along_field() {
        let f = &Jet::var(2, 3, 0).unwrap() * &Jet::var(2, 3, 1).unwrap();
        let x = JetVector::identity(2, 3);
        // Euler vector field doubles a quadratic
        let d = x.derivative(&f).unwrap();
        assert_eq!(d.coeffs(), f.scale_real(2.0).coeffs());
    }
}
