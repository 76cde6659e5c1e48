use super::{standard_block, FManifoldModel};
use crate::error::{Error, Result};
use crate::jets::{Jet, JetVector};
use crate::linalg::c64;
use crate::report::{MaxNorm, Residual, Residuals};

/// Basis `Y_1, …, Y_{m−1}` of the infinitesimal symmetries of a standard
/// block in `m` variables: `Y_1 = (t^1 + 1)∂_1 + Σ_{j≥2} j t^j ∂_j` and
/// `Y_k = ∂_{k−1} ∘ Y_1`. Empty for `m = 1`.
pub fn symmetry_basis(m: usize, order: usize) -> Vec<JetVector> {
    if m < 2 {
        return Vec::new();
    }
    // the multiplication of a block does not depend on its eigenvalue
    let block = standard_block(c64(0.0, 0.0), m, order);
    let mut y1 = JetVector::zeros(m, m, order);
    y1.set(
        1,
        Jet::var(m, order, 1).unwrap().add_constant(c64(1.0, 0.0)),
    );
    for j in 2..m {
        y1.set(j, Jet::var(m, order, j).unwrap().scale_real(j as f64));
    }
    let mut out = vec![y1.clone()];
    for k in 2..m {
        out.push(
            block
                .coordinate_product(k - 1, &y1)
                .expect("block shapes agree"),
        );
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    /// `L_X(∘)(∂_a, ∂_b)` over all pairs.
    pub multiplication: Residual,
    /// `[X, E]`.
    pub euler: Residual,
    /// `[∂_0, X]`.
    pub cond_unit: Residual,
    /// `[∂_1, X] ∘ ∂_{m−1}`.
    pub cond_top: Residual,
    /// `[∂_i, X] − i ∂_{i−1} ∘ [∂_1, X]` for `2 ≤ i ≤ m−1`.
    pub cond_shift: Residual,
}

impl Residuals for SymmetryReport {
    fn residuals(&self) -> Vec<Residual> {
        vec![
            self.multiplication.clone(),
            self.euler.clone(),
            self.cond_unit.clone(),
            self.cond_top.clone(),
            self.cond_shift.clone(),
        ]
    }
}

/// Residuals of `L_X(∘) = 0` and `[X, E] = 0`, plus the three coordinate
/// conditions that are equivalent to `L_X(∘) = 0` on a standard block.
pub fn check_symmetry(model: &FManifoldModel, x: &JetVector) -> Result<SymmetryReport> {
    let m = model.dim();
    if x.len() != m || x.num_vars() != m || x.order() != model.order() {
        return Err(Error::Shape("vector field does not match the model".into()));
    }
    let order = model.order();
    let d: Vec<JetVector> = (0..m).map(|i| model.coordinate_field(i)).collect();

    let mut mult = MaxNorm::new(order);
    for a in 0..m {
        for b in a..m {
            mult.vector(&model.lie_derivative(x, &d[a], &d[b])?);
        }
    }
    let mut euler = MaxNorm::new(order);
    euler.vector(&x.bracket(model.euler())?);

    let mut unit = MaxNorm::new(order);
    unit.vector(&d[0].bracket(x)?);
    let mut top = MaxNorm::new(order);
    let mut shift = MaxNorm::new(order);
    if m >= 2 {
        let b1 = d[1].bracket(x)?;
        top.vector(&model.coordinate_product(m - 1, &b1)?);
        for (i, di) in d.iter().enumerate().skip(2) {
            let lhs = di.bracket(x)?;
            let rhs = model.coordinate_product(i - 1, &b1)?.scale_real(i as f64);
            shift.vector(&lhs.checked_sub(&rhs)?);
        }
    }
    Ok(SymmetryReport {
        multiplication: mult.residual("lie_multiplication"),
        euler: euler.residual("euler_bracket"),
        cond_unit: unit.residual("unit_bracket"),
        cond_top: top.residual("top_product"),
        cond_shift: shift.residual("shift_relation"),
    })
}

/// One entry of the symmetry bracket table.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub residual: Residual,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryBracketReport {
    pub entries: Vec<BracketEntry>,
}

impl Residuals for SymmetryBracketReport {
    fn residuals(&self) -> Vec<Residual> {
        self.entries.iter().map(|e| e.residual.clone()).collect()
    }
}

/// `[Y_i, Y_j] − (i − j) Y_{i+j−1}` for `i + j ≤ m` and `[Y_i, Y_j]` for
/// `i + j > m`, over all `1 ≤ i, j ≤ m−1`.
pub fn check_symmetry_brackets(m: usize, order: usize) -> Result<SymmetryBracketReport> {
    if m < 2 {
        return Err(Error::Shape("symmetry brackets need m ≥ 2".into()));
    }
    let y = symmetry_basis(m, order);
    let mut entries = Vec::new();
    for i in 1..m {
        for j in 1..m {
            let mut r = y[i - 1].bracket(&y[j - 1])?;
            if i + j <= m {
                r = r.checked_sub(&y[i + j - 2].scale_real(i as f64 - j as f64))?;
            }
            entries.push(BracketEntry {
                i,
                j,
                residual: Residual::new(
                    format!("bracket_{i}_{j}"),
                    r.residual_norm(),
                    r.min_valid_order(),
                ),
            });
        }
    }
    Ok(SymmetryBracketReport { entries })
}
