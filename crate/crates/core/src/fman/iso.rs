use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{euler_powers, FManifoldModel};
use crate::error::{Error, Result};
use crate::jets::{Jet, JetMatrix, JetVector};
use crate::regend::{is_regular, jordan_spectrum_with, ProbeSettings, CLUSTER_TOL};
use crate::report::{MaxNorm, Residual, Residuals};

#[derive(Clone, Debug, PartialEq)]
pub struct IsoReport {
    /// `ψ_* X_i − Y_i ∘ ψ` for the canonical frames, `i < n`.
    pub frame: Residual,
    /// `ψ_* e_A − e_B ∘ ψ`.
    pub unit: Residual,
    /// `ψ_* E_A − E_B ∘ ψ`.
    pub euler: Residual,
    /// `ψ_*(∂_a ∘ ∂_b) − ψ_*∂_a ∘ ψ_*∂_b` over coordinate pairs.
    pub multiplicativity: Residual,
    /// `ψ_*(E_A^{∘i}) − E_B^{∘i} ∘ ψ` for `i ≤ K`.
    pub euler_powers: Residual,
    /// Failure of the order-by-order Jacobian updates to be closed; vanishes
    /// whenever an isomorphism exists.
    pub closedness: Residual,
}

impl Residuals for IsoReport {
    fn residuals(&self) -> Vec<Residual> {
        vec![
            self.frame.clone(),
            self.unit.clone(),
            self.euler.clone(),
            self.multiplicativity.clone(),
            self.euler_powers.clone(),
            self.closedness.clone(),
        ]
    }
}

/// Germ of a biholomorphism `ψ: (A, 0) → (B, 0)` with `ψ(0) = 0`, given by
/// its coordinate functions in the variables of `A`.
#[derive(Clone, Debug)]
pub struct GermIsomorphism {
    pub map: JetVector,
    pub report: IsoReport,
}

/// Solves `Dψ · X_i^A = Y_i^B ∘ ψ` for the canonical frames of `A` and `B`
/// one homogeneous degree at a time.
///
/// If `ψ` is right up to degree `d`, the degree-`d` part of the defect
/// `R_i = Y_i^B ∘ ψ − Dψ · X_i^A` fixes the degree-`d` Jacobian of the next
/// correction through `Dδ · F = R`, where `F` holds the frame `X_i^A(0)` in
/// its columns. The correction itself is recovered from its homogeneous
/// Jacobian by Euler's identity `δ = (1/(d+1)) Σ_l t^l ∂_l δ`.
pub fn germ_isomorphism(
    a: &FManifoldModel,
    b: &FManifoldModel,
    order: usize,
) -> Result<GermIsomorphism> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::NoIsomorphism(format!(
            "dimensions {} and {} differ",
            n,
            b.dim()
        )));
    }
    let a = a.to_order(order);
    let b = b.to_order(order);
    let ua = a.mult_by_euler().constant_part();
    let ub = b.mult_by_euler().constant_part();
    for (u, name) in [(&ua, "source"), (&ub, "target")] {
        let r = is_regular(u);
        if !r.regular {
            return Err(Error::NoIsomorphism(format!(
                "{name} is not regular at the origin (rcond {:.3e})",
                r.rcond
            )));
        }
    }
    let (sa, ca) = jordan_spectrum_with(&ua, CLUSTER_TOL, &ProbeSettings::default())?;
    let (sb, cb) = jordan_spectrum_with(&ub, CLUSTER_TOL, &ProbeSettings::default())?;
    if !sa.approx_eq(&sb, ca.radius.max(cb.radius)) {
        return Err(Error::NoIsomorphism(format!(
            "conjugacy classes at the origin differ: {sa} vs {sb}"
        )));
    }

    let x = euler_powers(&a, n - 1)?;
    let y = euler_powers(&b, n - 1)?;
    let f0 = JetMatrix::from_columns(&x)?.constant_part();
    let f0_inv = f0
        .try_inverse()
        .ok_or_else(|| Error::Solver("canonical frame is singular at the origin".into()))?;

    let mut psi = JetVector::zeros(n, n, order);
    let mut closed = MaxNorm::new(order);
    // degree d of the defect fixes degree d + 1 of ψ; the solved degrees
    // are exact, so only the defect's own trusted order limits ψ
    let mut valid = order;
    'degrees: for d in 0..order {
        let jac = psi.jacobian()?;
        let mut r = vec![Jet::zero(n, order); n * n];
        for i in 0..n {
            let defect = y[i].compose(&psi)?.checked_sub(&jac.mul_vec(&x[i])?)?;
            if defect.min_valid_order() < d {
                valid = d;
                break 'degrees;
            }
            for k in 0..n {
                let part = &defect[k];
                r[k * n + i] = Jet::from_fn(n, order, |e| {
                    if e.iter().sum::<usize>() == d {
                        part.coeff(e)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
            }
        }
        // G = R F^{-1}
        let mut g = vec![Jet::zero(n, order); n * n];
        for k in 0..n {
            for l in 0..n {
                let mut acc = Jet::zero(n, order);
                for i in 0..n {
                    let c = f0_inv[(i, l)];
                    if c.norm() != 0.0 {
                        acc += &r[k * n + i].scale(c);
                    }
                }
                g[k * n + l] = acc;
            }
        }
        for k in 0..n {
            for l in 0..n {
                for m in l + 1..n {
                    let curl = g[k * n + l]
                        .partial(m)?
                        .checked_sub(&g[k * n + m].partial(l)?)?;
                    closed.push(curl.max_abs(), order);
                }
            }
            let mut delta = Jet::zero(n, order);
            for l in 0..n {
                delta += &(&Jet::var(n, order, l)? * &g[k * n + l]);
            }
            let updated = &psi[k] + &delta.scale_real(1.0 / (d + 1) as f64);
            psi.set(k, updated);
        }
    }
    let psi = psi.with_valid_order(valid);

    let report = iso_residuals(&a, &b, &psi, &x, &y, closed)?;
    Ok(GermIsomorphism { map: psi, report })
}

fn iso_residuals(
    a: &FManifoldModel,
    b: &FManifoldModel,
    psi: &JetVector,
    x: &[JetVector],
    y: &[JetVector],
    closed: MaxNorm,
) -> Result<IsoReport> {
    let n = a.dim();
    let order = a.order();
    let jac = psi.jacobian()?;
    let push = |v: &JetVector| jac.mul_vec(v);

    let mut frame = MaxNorm::new(order);
    for (xi, yi) in x.iter().zip(y) {
        frame.vector(&push(xi)?.checked_sub(&yi.compose(psi)?)?);
    }
    let mut unit = MaxNorm::new(order);
    unit.vector(&push(a.unit())?.checked_sub(&b.unit().compose(psi)?)?);
    let mut euler = MaxNorm::new(order);
    euler.vector(&push(a.euler())?.checked_sub(&b.euler().compose(psi)?)?);

    // structure constants of B along ψ
    let cb: Vec<JetVector> = (0..n * n)
        .map(|k| b.structure(k / n, k % n).compose(psi))
        .collect::<Result<_>>()?;
    let product_b = |u: &JetVector, v: &JetVector| -> Result<JetVector> {
        let mut out = JetVector::zeros(n, n, order);
        for i in 0..n {
            for j in 0..n {
                let f = u[i].checked_mul(&v[j])?;
                out = out.checked_add(&cb[i * n + j].mul_jet(&f))?;
            }
        }
        Ok(out)
    };
    let cols: Vec<JetVector> = (0..n).map(|l| jac.column(l)).collect();
    let mut mult = MaxNorm::new(order);
    for p in 0..n {
        for q in p..n {
            let lhs = push(a.structure(p, q))?;
            let rhs = product_b(&cols[p], &cols[q])?;
            mult.vector(&lhs.checked_sub(&rhs)?);
        }
    }

    let ea = euler_powers(a, order)?;
    let eb = euler_powers(b, order)?;
    let mut powers = MaxNorm::new(order);
    for (pa, pb) in ea.iter().zip(&eb) {
        powers.vector(&push(pa)?.checked_sub(&pb.compose(psi)?)?);
    }

    Ok(IsoReport {
        frame: frame.residual("frame_transport"),
        unit: unit.residual("unit_transport"),
        euler: euler.residual("euler_transport"),
        multiplicativity: mult.residual("multiplicativity"),
        euler_powers: powers.residual("euler_power_transport"),
        closedness: closed.residual("jacobian_closedness"),
    })
}

/// Largest deviation of a map germ from the identity.
pub fn distance_from_identity(psi: &JetVector) -> f64 {
    let id = JetVector::identity(psi.num_vars(), psi.order());
    psi.checked_sub(&id).map_or(f64::INFINITY, |d| d.max_abs())
}

/// Linear part of a map germ.
pub fn linear_part(psi: &JetVector) -> Result<DMatrix<Complex64>> {
    Ok(psi.jacobian()?.constant_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fman::{product_model, standard_block};
    use crate::linalg::c64;

    #[test]
    fn self_isomorphism_is_identity() {
        let a = product_model(&[
            standard_block(c64(0.0, 0.0), 2, 4),
            standard_block(c64(1.0, 0.0), 1, 4),
        ])
        .unwrap();
        let iso = germ_isomorphism(&a, &a, 4).unwrap();
        assert!(distance_from_identity(&iso.map) < 1e-13);
        assert!(iso.report.passes(1e-12), "{:?}", iso.report);
    }

    #[test]
    fn shifted_eigenvalue_has_no_isomorphism() {
        let a = standard_block(c64(0.5, 0.0), 1, 3);
        let b = standard_block(c64(0.75, 0.0), 1, 3);
        assert!(matches!(
            germ_isomorphism(&a, &b, 3),
            Err(Error::NoIsomorphism(_))
        ));
    }

    #[test]
    fn recovers_a_coordinate_change() {
        let k = 4;
        let a = standard_block(c64(0.3, 0.0), 2, k);
        let t0 = Jet::var(2, k, 0).unwrap();
        let t1 = Jet::var(2, k, 1).unwrap();
        let phi = JetVector::new(vec![t0, &t1 + &(&t1 * &t1)]).unwrap();
        let b = a.pushforward(&phi).unwrap();
        let iso = germ_isomorphism(&a, &b, k).unwrap();
        assert!((&iso.map - &phi).max_abs() < 1e-10, "{:?}", iso.map);
        assert!(iso.report.passes(1e-9), "{:?}", iso.report);
    }
}
