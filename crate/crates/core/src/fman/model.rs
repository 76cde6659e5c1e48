use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jets::{Jet, JetMatrix, JetVector};
use crate::regend::JordanSpectrum;
use crate::report::{MaxNorm, Residual, Residuals};

/// F-manifold germ at the origin of a coordinate chart: structure
/// constants `∂_i ∘ ∂_j = c_{ij}^k ∂_k`, unit field and Euler field, all as
/// jets in `dim` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct FManifoldModel {
    dim: usize,
    mult: Vec<JetVector>,
    unit: JetVector,
    euler: JetVector,
    spectrum: Option<JordanSpectrum>,
}

impl FManifoldModel {
    /// `mult[i][j]` holds the components of `∂_i ∘ ∂_j`.
    pub fn new(
        mult: Vec<Vec<JetVector>>,
        unit: JetVector,
        euler: JetVector,
    ) -> Result<FManifoldModel> {
        let dim = unit.len();
        let check = |v: &JetVector, what: &str| {
            if v.len() != dim || v.num_vars() != dim || v.order() != unit.order() {
                Err(Error::Shape(format!(
                    "{what}: expected {dim} components in {dim} variables at order {}",
                    unit.order()
                )))
            } else {
                Ok(())
            }
        };
        check(&unit, "unit field")?;
        check(&euler, "Euler field")?;
        if mult.len() != dim || mult.iter().any(|row| row.len() != dim) {
            return Err(Error::Shape(format!(
                "structure tensor must be {dim}x{dim}"
            )));
        }
        for row in &mult {
            for v in row {
                check(v, "structure constants")?;
            }
        }
        Ok(FManifoldModel {
            dim,
            mult: mult.into_iter().flatten().collect(),
            unit,
            euler,
            spectrum: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.unit.order()
    }

    /// Components of `∂_i ∘ ∂_j`.
    pub fn structure(&self, i: usize, j: usize) -> &JetVector {
        &self.mult[i * self.dim + j]
    }

    pub fn unit(&self) -> &JetVector {
        &self.unit
    }

    pub fn euler(&self) -> &JetVector {
        &self.euler
    }

    /// Jordan spectrum the model was built from, for standard models.
    pub fn spectrum(&self) -> Option<&JordanSpectrum> {
        self.spectrum.as_ref()
    }

    pub fn coordinate_field(&self, i: usize) -> JetVector {
        JetVector::basis(self.dim, self.dim, self.order(), i)
    }

    /// Replaces one structure-constant jet (used to inject defects).
    pub fn with_structure_constant(mut self, i: usize, j: usize, k: usize, value: Jet) -> Self {
        self.mult[i * self.dim + j].set(k, value);
        self.spectrum = None;
        self
    }

    pub fn with_euler(mut self, euler: JetVector) -> Self {
        self.euler = euler;
        self.spectrum = None;
        self
    }

    pub fn with_unit(mut self, unit: JetVector) -> Self {
        self.unit = unit;
        self.spectrum = None;
        self
    }

    /// `X ∘ Y = X^i Y^j c_{ij}`.
    pub fn product(&self, x: &JetVector, y: &JetVector) -> Result<JetVector> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::Shape("vector field of the wrong dimension".into()));
        }
        let mut out = JetVector::zeros(self.dim, self.dim, self.order());
        for i in 0..self.dim {
            if x[i].max_abs() == 0.0 {
                continue;
            }
            for j in 0..self.dim {
                if y[j].max_abs() == 0.0 {
                    continue;
                }
                let f = x[i].checked_mul(&y[j])?;
                out = out.checked_add(&self.structure(i, j).mul_jet(&f))?;
            }
        }
        Ok(out)
    }

    /// `∂_i ∘ Y`, cheaper than [`FManifoldModel::product`] with a basis field.
    pub fn coordinate_product(&self, i: usize, y: &JetVector) -> Result<JetVector> {
        let mut out = JetVector::zeros(self.dim, self.dim, self.order());
        for j in 0..self.dim {
            if y[j].max_abs() == 0.0 {
                continue;
            }
            out = out.checked_add(&self.structure(i, j).mul_jet(&y[j]))?;
        }
        Ok(out)
    }

    /// `X^{∘k}` with `X^{∘0} = e`.
    pub fn power(&self, x: &JetVector, k: usize) -> Result<JetVector> {
        let mut out = self.unit.clone();
        for _ in 0..k {
            out = self.product(&out, x)?;
        }
        Ok(out)
    }

    /// `L_X(∘)(Y, Z) = [X, Y∘Z] − [X, Y]∘Z − Y∘[X, Z]`.
    pub fn lie_derivative(&self, x: &JetVector, y: &JetVector, z: &JetVector) -> Result<JetVector> {
        let yz = self.product(y, z)?;
        let a = x.bracket(&yz)?;
        let b = self.product(&x.bracket(y)?, z)?;
        let c = self.product(y, &x.bracket(z)?)?;
        a.checked_sub(&b)?.checked_sub(&c)
    }

    /// Matrix of `Y ↦ X ∘ Y` in the coordinate frame.
    pub fn multiplication_matrix(&self, x: &JetVector) -> Result<JetMatrix> {
        let cols = (0..self.dim)
            .map(|j| self.product(x, &self.coordinate_field(j)))
            .collect::<Result<Vec<_>>>()?;
        JetMatrix::from_columns(&cols)
    }

    /// `U(X) = E ∘ X` in the coordinate frame.
    pub fn mult_by_euler(&self) -> JetMatrix {
        self.multiplication_matrix(&self.euler)
            .expect("Euler field has the model's shape")
    }

    pub fn to_order(&self, order: usize) -> FManifoldModel {
        FManifoldModel {
            dim: self.dim,
            mult: self.mult.iter().map(|v| v.to_order(order)).collect(),
            unit: self.unit.to_order(order),
            euler: self.euler.to_order(order),
            spectrum: self.spectrum.clone(),
        }
    }

    /// Constant structure constants `c[i][j][k]`, when every `c_{ij}^k` is a
    /// constant jet.
    pub fn constant_structure(&self) -> Option<Vec<Vec<Vec<Complex64>>>> {
        let n = self.dim;
        if self.mult.iter().any(|v| v.iter().any(|c| !c.is_constant())) {
            return None;
        }
        Some(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            self.structure(i, j)
                                .iter()
                                .map(Jet::constant_term)
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        )
    }

    /// Image of the model under a coordinate change `s = φ(t)` with
    /// `φ(0) = 0`: the returned model lives in the `s` coordinates.
    pub fn pushforward(&self, phi: &JetVector) -> Result<FManifoldModel> {
        if phi.len() != self.dim || phi.num_vars() != self.dim || phi.order() != self.order() {
            return Err(Error::Shape("coordinate change of the wrong shape".into()));
        }
        let back = phi.inverse_map()?;
        let jac = phi.jacobian()?;
        let jac_inv = jac.inverse()?;
        let push = |x: &JetVector| -> Result<JetVector> { jac.mul_vec(x)?.compose(&back) };
        let frame: Vec<JetVector> = (0..self.dim).map(|i| jac_inv.column(i)).collect();
        let mut mult = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut row = Vec::with_capacity(self.dim);
            for j in 0..self.dim {
                row.push(push(&self.product(&frame[i], &frame[j])?)?);
            }
            mult.push(row);
        }
        FManifoldModel::new(mult, push(&self.unit)?, push(&self.euler)?)
    }
}

/// One F-manifold block with a single eigenvalue `a` and `m` variables:
/// `∂_i ∘ ∂_j = ∂_{i+j}` (zero when `i + j ≥ m`), `e = ∂_0` and
/// `E = (t^0 + a)∂_0 + (t^1 + 1)∂_1 + Σ_{i≥2} t^i ∂_i`.
pub fn standard_block(a: Complex64, m: usize, order: usize) -> FManifoldModel {
    assert!(m >= 1, "block size must be positive");
    let zero = JetVector::zeros(m, m, order);
    let mut mult = Vec::with_capacity(m);
    for i in 0..m {
        let row = (0..m)
            .map(|j| {
                if i + j < m {
                    JetVector::basis(m, m, order, i + j)
                } else {
                    zero.clone()
                }
            })
            .collect();
        mult.push(row);
    }
    let mut euler = JetVector::zeros(m, m, order);
    for i in 0..m {
        let mut c = Jet::var(m, order, i).expect("variable in range");
        if i == 0 {
            c = c.add_constant(a);
        } else if i == 1 {
            c = c.add_constant(Complex64::new(1.0, 0.0));
        }
        euler.set(i, c);
    }
    let mut model = FManifoldModel::new(mult, JetVector::basis(m, m, order, 0), euler)
        .expect("standard block is well formed");
    model.spectrum = Some(JordanSpectrum::new([(a, m)]).expect("single block"));
    model
}

/// Direct product: variables concatenated in factor order, multiplication
/// block diagonal, unit and Euler fields summed.
pub fn product_model(factors: &[FManifoldModel]) -> Result<FManifoldModel> {
    let first = factors
        .first()
        .ok_or_else(|| Error::Shape("product of no factors".into()))?;
    if factors.len() == 1 {
        return Ok(first.clone());
    }
    let order = first.order();
    if factors.iter().any(|f| f.order() != order) {
        return Err(Error::Shape("factors with different jet orders".into()));
    }
    let n: usize = factors.iter().map(FManifoldModel::dim).sum();
    let embed = |v: &JetVector, offset: usize| -> Result<Vec<Jet>> {
        v.iter().map(|c| c.embed(n, offset)).collect()
    };
    let zero = JetVector::zeros(n, n, order);
    let mut mult = vec![vec![zero.clone(); n]; n];
    let mut unit = Vec::with_capacity(n);
    let mut euler = Vec::with_capacity(n);
    let mut offset = 0;
    for f in factors {
        let d = f.dim();
        for i in 0..d {
            for j in 0..d {
                let mut comps = vec![Jet::zero(n, order); n];
                for (k, c) in embed(f.structure(i, j), offset)?.into_iter().enumerate() {
                    comps[offset + k] = c;
                }
                mult[offset + i][offset + j] = JetVector::new(comps)?;
            }
        }
        unit.extend(embed(f.unit(), offset)?);
        euler.extend(embed(f.euler(), offset)?);
        offset += d;
    }
    let mut model = FManifoldModel::new(mult, JetVector::new(unit)?, JetVector::new(euler)?)?;
    let blocks: Option<Vec<_>> = factors
        .iter()
        .map(|f| f.spectrum().map(|s| s.blocks.clone()))
        .collect();
    model.spectrum = blocks.and_then(|b| {
        JordanSpectrum::new(b.into_iter().flatten().map(|b| (b.eigenvalue, b.size))).ok()
    });
    Ok(model)
}

/// The canonical model with the given conjugacy class of `U` at the origin:
/// the product of standard blocks in canonical spectrum order.
pub fn standard_model(spectrum: &JordanSpectrum, order: usize) -> Result<FManifoldModel> {
    let checked = JordanSpectrum::new(spectrum.blocks.iter().map(|b| (b.eigenvalue, b.size)))?;
    let factors: Vec<FManifoldModel> = checked
        .blocks
        .iter()
        .map(|b| standard_block(b.eigenvalue, b.size, order))
        .collect();
    product_model(&factors)
}

/// Residuals of the F-manifold axioms on coordinate fields.
#[derive(Clone, Debug, PartialEq)]
pub struct FManifoldReport {
    pub commutativity: Residual,
    pub associativity: Residual,
    pub unit: Residual,
    pub integrability: Residual,
    pub euler: Residual,
}

impl Residuals for FManifoldReport {
    fn residuals(&self) -> Vec<Residual> {
        vec![
            self.commutativity.clone(),
            self.associativity.clone(),
            self.unit.clone(),
            self.integrability.clone(),
            self.euler.clone(),
        ]
    }
}

/// Checks commutativity, associativity, the unit, the integrability
/// condition `L_{X∘Y}(∘) = X∘L_Y(∘) + Y∘L_X(∘)` and the Euler condition
/// `L_E(∘) = ∘`. Each residual is the largest uniform norm over coordinate
/// fields; identities involving a Lie derivative lose one order.
pub fn check_fmanifold(model: &FManifoldModel) -> Result<FManifoldReport> {
    let n = model.dim();
    let k = model.order();
    let d: Vec<JetVector> = (0..n).map(|i| model.coordinate_field(i)).collect();

    let mut comm = MaxNorm::new(k);
    let mut assoc = MaxNorm::new(k);
    let mut unit = MaxNorm::new(k);
    for (a, da) in d.iter().enumerate() {
        unit.vector(&model.product(model.unit(), da)?.checked_sub(da)?);
        for b in 0..n {
            comm.vector(&model.structure(a, b).checked_sub(model.structure(b, a))?);
            for c in 0..n {
                let left = model.coordinate_product(c, model.structure(a, b))?;
                let right = model.coordinate_product(a, model.structure(b, c))?;
                assoc.vector(&left.checked_sub(&right)?);
            }
        }
    }

    // L_{∂_a}(∘)(∂_c, ∂_d) = ∂_a c_{cd}
    let mut coord_lie = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for c in 0..n {
            for dd in 0..n {
                coord_lie.push(model.structure(c, dd).partial(a)?);
            }
        }
    }
    let lie_at = |a: usize, c: usize, dd: usize| &coord_lie[(a * n + c) * n + dd];

    let mut integ = MaxNorm::new(k);
    for a in 0..n {
        for b in a..n {
            let ab = model.structure(a, b);
            for c in 0..n {
                for dd in c..n {
                    let lhs = model.lie_derivative(ab, &d[c], &d[dd])?;
                    let rhs = model
                        .coordinate_product(a, lie_at(b, c, dd))?
                        .checked_add(&model.coordinate_product(b, lie_at(a, c, dd))?)?;
                    integ.vector(&lhs.checked_sub(&rhs)?);
                }
            }
        }
    }

    let mut euler = MaxNorm::new(k);
    for a in 0..n {
        for b in a..n {
            let lhs = model.lie_derivative(model.euler(), &d[a], &d[b])?;
            euler.vector(&lhs.checked_sub(model.structure(a, b))?);
        }
    }

    Ok(FManifoldReport {
        commutativity: comm.residual("commutativity"),
        associativity: assoc.residual("associativity"),
        unit: unit.residual("unit"),
        integrability: integ.residual("integrability"),
        euler: euler.residual("euler"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, CMat};

    #[test]
    fn two_dimensional_block() {
        let a = c64(0.7, -0.2);
        let m = standard_block(a, 2, 3);
        let d1 = m.coordinate_field(1);
        assert_eq!(m.product(&d1, &d1).unwrap().max_abs(), 0.0);
        let e = m.euler();
        assert_eq!(e[0].coeffs()[..3], [a, c64(1.0, 0.0), c64(0.0, 0.0)]);
        assert_eq!(
            e[1].coeffs()[..3],
            [c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]
        );
    }

    #[test]
    fn one_dimensional_block() {
        let m = standard_block(c64(2.0, 0.0), 1, 3);
        assert_eq!(m.euler()[0].coeffs()[..2], [c64(2.0, 0.0), c64(1.0, 0.0)]);
        let d0 = m.coordinate_field(0);
        assert_eq!(m.product(&d0, &d0).unwrap(), d0);
    }

    #[test]
    fn euler_multiplication_matrices() {
        let u = standard_block(c64(0.0, 0.0), 2, 3)
            .mult_by_euler()
            .constant_part();
        let mut expect = CMat::zeros(2, 2);
        expect[(1, 0)] = c64(1.0, 0.0);
        assert_eq!(u, expect);

        // columns E∘∂0 = E, E∘∂1 = (t0 + a)∂1
        let a = c64(1.0, 1.0);
        let u = standard_block(a, 2, 3).mult_by_euler();
        let t0 = Jet::var(2, 3, 0).unwrap().add_constant(a);
        let t1 = Jet::var(2, 3, 1).unwrap().add_constant(c64(1.0, 0.0));
        assert_eq!(u.get(0, 0), &t0);
        assert_eq!(u.get(0, 1).max_abs(), 0.0);
        assert_eq!(u.get(1, 0), &t1);
        assert_eq!(u.get(1, 1), &t0);
    }

    #[test]
    fn semisimple_product() {
        let p = product_model(&[
            standard_block(c64(1.0, 0.0), 1, 3),
            standard_block(c64(2.0, 0.0), 1, 3),
        ])
        .unwrap();
        let u = p.mult_by_euler().constant_part();
        let mut expect = CMat::zeros(2, 2);
        expect[(0, 0)] = c64(1.0, 0.0);
        expect[(1, 1)] = c64(2.0, 0.0);
        assert_eq!(u, expect);
        assert_eq!(p.spectrum().unwrap().blocks.len(), 2);
    }

    #[test]
    fn repeated_eigenvalue_spectrum_is_rejected() {
        let s = JordanSpectrum {
            blocks: vec![
                crate::regend::JordanBlock {
                    eigenvalue: c64(1.0, 0.0),
                    size: 1,
                },
                crate::regend::JordanBlock {
                    eigenvalue: c64(1.0, 0.0),
                    size: 1,
                },
            ],
        };
        assert!(matches!(
            standard_model(&s, 3),
            Err(Error::InvalidSpectrum(_))
        ));
    }

    #[test]
    fn axioms_of_standard_blocks() {
        for m in 1..=3 {
            let r = check_fmanifold(&standard_block(c64(0.5, 1.0), m, 4)).unwrap();
            assert!(r.passes(1e-12), "{r:?}");
            assert_eq!(r.integrability.order, 3);
            assert_eq!(r.associativity.order, 4);
        }
    }

    #[test]
    fn perturbed_structure_constant_breaks_associativity() {
        // ∂0∘∂0 = 1.1 ∂0
        let m = standard_block(c64(0.0, 0.0), 2, 4);
        let bad = m.with_structure_constant(0, 0, 0, Jet::real(2, 4, 1.1));
        let r = check_fmanifold(&bad).unwrap();
        assert!(r.associativity.value >= 0.05, "{r:?}");
    }

    #[test]
    fn two_dimensional_unital_algebras_stay_associative() {
        // ∂1∘∂1 = 0.1 ∂1 is still an associative algebra, and even an F-manifold
        let m = standard_block(c64(0.0, 0.0), 2, 4);
        let other = m.with_structure_constant(1, 1, 1, Jet::real(2, 4, 0.1));
        assert!(check_fmanifold(&other).unwrap().passes(1e-12));
    }
}
