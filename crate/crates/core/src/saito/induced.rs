use num_complex::Complex64;

use super::SaitoBundle;
use crate::error::{Error, Result};
use crate::fman::{check_fmanifold, FManifoldModel, FManifoldReport};
use crate::frob::{levi_civita_curvature, CurvatureReport, LeviCivita};
use crate::jets::{Jet, JetMatrix, JetVector};
use crate::linalg::CVec;
use crate::regend::{characteristic_polynomial, is_regular, same_conjugacy_class};
use crate::report::{MaxNorm, Residual, Residuals};

#[derive(Clone, Debug)]
pub struct SaitoFManifoldReport {
    /// `U_M + I^{-1} R_0 I`.
    pub euler_operator: Residual,
    /// Largest coefficient difference of the characteristic polynomials of
    /// `U_M(0)` and `−R_0(0)`.
    pub char_poly_distance: f64,
    /// Jordan-type comparison of `U_M(0)` and `−R_0(0)`; `None` unless both
    /// are regular.
    pub conjugate: Option<bool>,
    pub axioms: FManifoldReport,
}

impl Residuals for SaitoFManifoldReport {
    fn residuals(&self) -> Vec<Residual> {
        let mut out = vec![
            self.euler_operator.clone(),
            Residual::new("char_poly_distance", self.char_poly_distance, 0),
        ];
        out.extend(self.axioms.residuals());
        out
    }
}

#[derive(Clone, Debug)]
pub struct SaitoFManifold {
    pub model: FManifoldModel,
    /// `I`, with column `i` equal to `Φ_i(s)`.
    pub frame: JetMatrix,
    pub report: SaitoFManifoldReport,
}

/// F-manifold induced on the base by a primitive section `s` (constant in
/// the frame): `Φ_{X∘Y}(s) = Φ_XΦ_Y(s)`, `e = I^{-1}(s)`,
/// `E = −I^{-1}R_0(s)` with `I(X) = Φ_X(s)`.
pub fn fmanifold_from_saito(bundle: &SaitoBundle, section: &CVec) -> Result<SaitoFManifold> {
    bundle.validate()?;
    let m = bundle.base_dim();
    let k = bundle.order();
    if bundle.rank() != m || section.len() != m {
        return Err(Error::NotPrimitive(format!(
            "rank {} bundle over a {m}-dimensional base with a section of length {}",
            bundle.rank(),
            section.len()
        )));
    }
    let s = JetVector::from_constant(section.as_slice(), m, k);
    let cols: Vec<JetVector> = bundle
        .phi
        .iter()
        .map(|p| p.mul_vec(&s))
        .collect::<Result<_>>()?;
    let frame = JetMatrix::from_columns(&cols)?;
    let frame_inv = frame
        .inverse()
        .map_err(|_| Error::NotPrimitive("X ↦ Φ_X(s) is not invertible at the origin".into()))?;

    let mut mult = Vec::with_capacity(m);
    for i in 0..m {
        let row = (0..m)
            .map(|j| frame_inv.mul_vec(&bundle.phi[i].mul_vec(&cols[j])?))
            .collect::<Result<Vec<_>>>()?;
        mult.push(row);
    }
    let unit = frame_inv.mul_vec(&s)?;
    let euler = frame_inv.mul_vec(&bundle.r0.mul_vec(&s)?)?.scale_real(-1.0);
    let model = FManifoldModel::new(mult, unit, euler)?;

    let expected = frame_inv
        .checked_matmul(&bundle.r0)?
        .checked_matmul(&frame)?
        .scale_real(-1.0);
    let u = model.mult_by_euler();
    let mut eo = MaxNorm::new(k);
    eo.matrix(&u.checked_sub(&expected)?);
    let u0 = u.constant_part();
    let r0 = -bundle.r0.constant_part();
    let char_poly_distance = characteristic_polynomial(&u0)
        .iter()
        .zip(characteristic_polynomial(&r0))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let conjugate = if is_regular(&u0).regular && is_regular(&r0).regular {
        same_conjugacy_class(&u0, &r0).ok()
    } else {
        None
    };
    let axioms = check_fmanifold(&model)?;
    Ok(SaitoFManifold {
        model,
        frame,
        report: SaitoFManifoldReport {
            euler_operator: eo.residual("euler_operator"),
            char_poly_distance,
            conjugate,
            axioms,
        },
    })
}

#[derive(Clone, Debug)]
pub struct SaitoFrobenius {
    pub fmanifold: SaitoFManifold,
    /// `g_M(X, Y) = g_V(I(X), I(Y))` in the base coordinates.
    pub gram: JetMatrix,
    pub q: Complex64,
    /// `Ω_i(s)`: the section is flat.
    pub section_flatness: Residual,
    /// `∇^{LC}E − I^{-1}R_∞I − (1 − q)Id`.
    pub der_euler: Residual,
    /// `g(X∘Y, Z) − g(X, Y∘Z)` on coordinate fields.
    pub invariance: Residual,
    pub curvature: CurvatureReport,
}

impl Residuals for SaitoFrobenius {
    fn residuals(&self) -> Vec<Residual> {
        let mut out = vec![
            self.section_flatness.clone(),
            self.der_euler.clone(),
            self.invariance.clone(),
        ];
        out.extend(self.curvature.residuals());
        out
    }
}

/// Metric `g_M(X, Y) = g_V(I(X), I(Y))` induced by a primitive homogeneous
/// section (`∇s = 0`, `R_∞ s = q s`), with the Euler-derivative law checked
/// through the Levi-Civita connection of `g_M`.
pub fn frobenius_from_saito(
    bundle: &SaitoBundle,
    section: &CVec,
    q: Complex64,
    tol: f64,
) -> Result<SaitoFrobenius> {
    let gv = bundle
        .gv
        .as_ref()
        .ok_or_else(|| Error::Shape("Saito bundle carries no metric".into()))?;
    let residual = (&bundle.rinf * section - section * q)
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if residual > tol {
        return Err(Error::NotHomogeneous { residual });
    }
    let fm = fmanifold_from_saito(bundle, section)?;
    let m = bundle.base_dim();
    let k = bundle.order();
    let s = JetVector::from_constant(section.as_slice(), m, k);
    let mut flat = MaxNorm::new(k);
    for om in &bundle.omega {
        flat.vector(&om.mul_vec(&s)?);
    }

    let i = &fm.frame;
    let gram = i
        .transpose()
        .checked_matmul(&bundle.constant(gv))?
        .checked_matmul(i)?;
    let lc = LeviCivita::new(&gram)?;
    let nabla_e = lc.covariant_derivative(fm.model.euler())?;
    let expected = i
        .inverse()?
        .checked_matmul(&bundle.constant(&bundle.rinf))?
        .checked_matmul(i)?
        .checked_add(&JetMatrix::identity(m, m, k).scale(Complex64::new(1.0, 0.0) - q))?;
    let mut de = MaxNorm::new(k);
    de.matrix(&nabla_e.checked_sub(&expected)?);

    let model = &fm.model;
    let invariance = metric_invariance(model, &gram)?;
    let curvature = levi_civita_curvature(&gram, model.unit())?;
    Ok(SaitoFrobenius {
        fmanifold: fm,
        gram,
        q,
        section_flatness: flat.residual("section_flatness"),
        der_euler: de.residual("euler_derivative"),
        invariance,
        curvature,
    })
}

/// `g(∂_a∘∂_b, ∂_c) − g(∂_a, ∂_b∘∂_c)` over all coordinate triples.
pub fn metric_invariance(model: &FManifoldModel, gram: &JetMatrix) -> Result<Residual> {
    let (m, k) = (model.dim(), gram.order());
    let pair = |x: &JetVector, y: &JetVector| -> Result<Jet> {
        let gy = gram.mul_vec(y)?;
        let mut acc = Jet::zero(m, k);
        for (a, b) in x.iter().zip(gy.iter()) {
            acc += &a.checked_mul(b)?;
        }
        Ok(acc)
    };
    let d: Vec<JetVector> = (0..m)
        .map(|a| model.coordinate_field(a).to_order(k))
        .collect();
    let mut inv = MaxNorm::new(k);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let lhs = pair(&model.structure(a, b).to_order(k), &d[c])?;
                let rhs = pair(&d[a], &model.structure(b, c).to_order(k))?;
                inv.jet(&lhs.checked_sub(&rhs)?);
            }
        }
    }
    Ok(inv.residual("metric_invariance"))
}
