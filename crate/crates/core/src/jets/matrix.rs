use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Jet, JetVector};
use crate::error::{Error, Result};

/// Rectangular grid of jets with uniform `(num_vars, order)`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct JetMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Jet>,
}

impl JetMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Jet>) -> Result<JetMatrix> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {}x{} jet matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        if entries.iter().any(|e| !e.same_shape(&entries[0])) {
            return Err(Error::Shape("jet matrix entries of mixed shape".into()));
        }
        Ok(JetMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize, num_vars: usize, order: usize) -> JetMatrix {
        JetMatrix {
            rows,
            cols,
            entries: vec![Jet::zero(num_vars, order); rows * cols],
        }
    }

    pub fn identity(n: usize, num_vars: usize, order: usize) -> JetMatrix {
        let mut m = JetMatrix::zeros(n, n, num_vars, order);
        for i in 0..n {
            m.entries[i * n + i] = Jet::real(num_vars, order, 1.0);
        }
        m
    }

    pub fn from_constant(a: &DMatrix<Complex64>, num_vars: usize, order: usize) -> JetMatrix {
        let (rows, cols) = a.shape();
        let entries = (0..rows * cols)
            .map(|k| Jet::constant(num_vars, order, a[(k / cols, k % cols)]))
            .collect();
        JetMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Jet,
    ) -> Result<JetMatrix> {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        JetMatrix::new(rows, cols, entries)
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[JetVector]) -> Result<JetMatrix> {
        let rows = cols.first().map_or(0, JetVector::len);
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::Shape("columns of different lengths".into()));
        }
        JetMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn num_vars(&self) -> usize {
        self.entries[0].num_vars()
    }

    pub fn order(&self) -> usize {
        self.entries[0].order()
    }

    pub fn min_valid_order(&self) -> usize {
        self.entries.iter().map(Jet::valid_order).min().unwrap_or(0)
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet {
        assert!(
            i < self.rows && j < self.cols,
            "jet matrix index out of range"
        );
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Jet) {
        assert!(
            i < self.rows && j < self.cols,
            "jet matrix index out of range"
        );
        assert!(
            value.same_shape(&self.entries[0]),
            "jet shape mismatch in set"
        );
        self.entries[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[Jet] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> JetVector {
        JetVector::new((0..self.rows).map(|i| self.get(i, j).clone()).collect())
            .expect("non-empty column")
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> JetMatrix {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    fn same_dims(&self, other: &JetMatrix, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{op} of {}x{} and {}x{} jet matrices",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &JetMatrix) -> Result<JetMatrix> {
        self.same_dims(other, "sum")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_>>()?;
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn checked_sub(&self, other: &JetMatrix) -> Result<JetMatrix> {
        self.same_dims(other, "difference")?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<_>>()?;
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn checked_matmul(&self, other: &JetMatrix) -> Result<JetMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "product of {}x{} and {}x{} jet matrices",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (nv, ord) = (self.num_vars(), self.order());
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Jet::zero(nv, ord);
                for k in 0..self.cols {
                    acc += &self.get(i, k).checked_mul(other.get(k, j))?;
                }
                entries.push(acc);
            }
        }
        Ok(JetMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    pub fn mul_vec(&self, v: &JetVector) -> Result<JetVector> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "{}x{} jet matrix applied to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let comps = (0..self.rows)
            .map(|i| {
                let mut acc = Jet::zero(self.num_vars(), self.order());
                for k in 0..self.cols {
                    acc += &self.get(i, k).checked_mul(&v[k])?;
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        JetVector::new(comps)
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &JetMatrix) -> Result<JetMatrix> {
        self.checked_matmul(other)?
            .checked_sub(&other.checked_matmul(self)?)
    }

    pub fn scale(&self, c: Complex64) -> JetMatrix {
        self.map(|a| a.scale(c))
    }

    pub fn scale_real(&self, c: f64) -> JetMatrix {
        self.map(|a| a.scale_real(c))
    }

    pub fn mul_jet(&self, f: &Jet) -> JetMatrix {
        self.map(|a| a * f)
    }

    pub fn transpose(&self) -> JetMatrix {
        JetMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
            .expect("transpose keeps shape")
    }

    pub fn partial(&self, i: usize) -> Result<JetMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|a| a.partial(i))
            .collect::<Result<_>>()?;
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn compose(&self, subs: &JetVector) -> Result<JetMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|a| a.compose(subs))
            .collect::<Result<_>>()?;
        JetMatrix::new(self.rows, self.cols, entries)
    }

    pub fn trace(&self) -> Result<Jet> {
        if !self.is_square() {
            return Err(Error::Shape("trace of a non-square jet matrix".into()));
        }
        let mut acc = Jet::zero(self.num_vars(), self.order());
        for i in 0..self.rows {
            acc += self.get(i, i);
        }
        Ok(acc)
    }

    pub fn pow(&self, k: usize) -> Result<JetMatrix> {
        if !self.is_square() {
            return Err(Error::Shape("power of a non-square jet matrix".into()));
        }
        let mut out = JetMatrix::identity(self.rows, self.num_vars(), self.order());
        for _ in 0..k {
            out = out.checked_matmul(self)?;
        }
        Ok(out)
    }

    /// Inverse of a square jet matrix with invertible constant part, by the
    /// series `Σ_k (−A_0^{-1} R)^k A_0^{-1}` where `A = A_0 + R`.
    pub fn inverse(&self) -> Result<JetMatrix> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of a non-square jet matrix".into()));
        }
        let a0 = self.constant_part();
        let a0_inv = a0
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("jet matrix with singular constant part".into()))?;
        let (nv, ord) = (self.num_vars(), self.order());
        let a0_inv_j = JetMatrix::from_constant(&a0_inv, nv, ord);
        let rest = self.checked_sub(&JetMatrix::from_constant(&a0, nv, ord))?;
        let step = a0_inv_j.checked_matmul(&rest)?.scale_real(-1.0);
        let mut term = JetMatrix::identity(self.rows, nv, ord);
        let mut sum = term.clone();
        for _ in 0..ord {
            term = term.checked_matmul(&step)?;
            sum = sum.checked_add(&term)?;
        }
        let out = sum.checked_matmul(&a0_inv_j)?;
        let valid = self.min_valid_order();
        Ok(out.map(|a| a.clone().with_valid_order(valid)))
    }

    /// Solves `A X = B` for square `A` with invertible constant part.
    pub fn solve(&self, rhs: &JetMatrix) -> Result<JetMatrix> {
        self.inverse()?.checked_matmul(rhs)
    }

    pub fn solve_vec(&self, rhs: &JetVector) -> Result<JetVector> {
        self.inverse()?.mul_vec(rhs)
    }

    pub fn constant_part(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).constant_term())
    }

    pub fn to_order(&self, order: usize) -> JetMatrix {
        self.map(|a| a.to_order(order))
    }

    pub fn with_valid_order(&self, valid: usize) -> JetMatrix {
        self.map(|a| a.clone().with_valid_order(valid))
    }

    pub fn residual_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(Jet::residual_norm)
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(Jet::max_abs).fold(0.0, f64::max)
    }
}

impl<'a> Add<&'a JetMatrix> for &'a JetMatrix {
    type Output = JetMatrix;
    fn add(self, rhs: &'a JetMatrix) -> JetMatrix {
        self.checked_add(rhs)
            .expect("jet matrix shape mismatch in +")
    }
}

impl<'a> Sub<&'a JetMatrix> for &'a JetMatrix {
    type Output = JetMatrix;
    fn sub(self, rhs: &'a JetMatrix) -> JetMatrix {
        self.checked_sub(rhs)
            .expect("jet matrix shape mismatch in -")
    }
}

impl<'a> Mul<&'a JetMatrix> for &'a JetMatrix {
    type Output = JetMatrix;
    fn mul(self, rhs: &'a JetMatrix) -> JetMatrix {
        self.checked_matmul(rhs)
            .expect("jet matrix shape mismatch in *")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn inverse_of_lower_triangular_jet_matrix() {
        let t = Jet::var(2, 3, 0).unwrap();
        let one = Jet::real(2, 3, 1.0);
        let a = JetMatrix::new(
            2,
            2,
            vec![
                one.add_constant(c(1.0)),
                Jet::zero(2, 3),
                t.clone(),
                &one + &t,
            ],
        )
        .unwrap();
        let prod = &a * &a.inverse().unwrap();
        let err = &prod - &JetMatrix::identity(2, 2, 3);
        assert!(err.residual_norm() < 1e-14);
    }

    #[test]
    fn singular_constant_part_is_rejected() {
        let t = Jet::var(1, 2, 0).unwrap();
        let a = JetMatrix::new(1, 1, vec![t]).unwrap();
        assert!(matches!(a.inverse(), Err(Error::Singular(_))));
    }

    #[test]
    fn commutator_of_constant_nilpotents() {
        let e = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        let f = e.transpose();
        let com = JetMatrix::from_constant(&e, 1, 2)
            .commutator(&JetMatrix::from_constant(&f, 1, 2))
            .unwrap();
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        assert_eq!(com.constant_part(), h);
    }

    #[test]
    fn mismatched_product_is_an_error() {
        let a = JetMatrix::zeros(2, 3, 1, 2);
        assert!(a.checked_matmul(&a).is_err());
        assert!(JetMatrix::new(2, 2, vec![Jet::zero(1, 1); 3]).is_err());
    }
}
