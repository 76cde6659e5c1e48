use num_complex::Complex64;

use super::FManifoldModel;
use crate::error::{Error, Result};
use crate::jets::{Jet, JetMatrix, JetVector};
use crate::linalg::column_scaled_rcond;
use crate::regend::{jordan_spectrum_with, ProbeSettings, CLUSTER_TOL, KRYLOV_RCOND_MIN};
use crate::report::{MaxNorm, Residual, Residuals};

/// The fields `X_k = E^{∘k}`, `k = 0..n−1`, with `X_0 = e`.
#[derive(Clone, Debug)]
pub struct CanonicalFrame {
    pub fields: Vec<JetVector>,
    /// Column-scaled reciprocal condition number of the frame at the origin.
    pub rcond: f64,
}

impl CanonicalFrame {
    /// Matrix whose columns are the frame fields.
    pub fn matrix(&self) -> JetMatrix {
        JetMatrix::from_columns(&self.fields).expect("frame fields share a shape")
    }
}

/// Builds the canonical frame after checking that `U(0)` is regular and that
/// the frame is independent at the origin.
pub fn canonical_frame(model: &FManifoldModel) -> Result<CanonicalFrame> {
    let u0 = model.mult_by_euler().constant_part();
    let reg = crate::regend::is_regular(&u0);
    if !reg.regular {
        return Err(Error::NotRegular { rcond: reg.rcond });
    }
    let fields = euler_powers(model, model.dim() - 1)?;
    let frame = CanonicalFrame { rcond: 0.0, fields };
    let rcond = column_scaled_rcond(&frame.matrix().constant_part());
    if rcond.is_nan() || rcond <= KRYLOV_RCOND_MIN {
        return Err(Error::NotRegular { rcond });
    }
    Ok(CanonicalFrame { rcond, ..frame })
}

/// `E^{∘0}, …, E^{∘top}`.
pub fn euler_powers(model: &FManifoldModel, top: usize) -> Result<Vec<JetVector>> {
    let mut out = Vec::with_capacity(top + 1);
    out.push(model.unit().clone());
    for k in 1..=top {
        out.push(model.product(&out[k - 1], model.euler())?);
    }
    Ok(out)
}

/// Integer constants `c_k^{(p)}`, `0 ≤ k ≤ n−1`, describing powers of a
/// single-eigenvalue `U = a Id + N` beyond the `n`-th:
/// `U^{n+s} + Σ_k c_k^{(s)} a^{n−k+s} U^k = 0`.
///
/// `c_k^{(0)} = (−1)^{n−k} C(n, k)`, `c_k^{(s+1)} = c_{k−1}^{(s)} − c_k^{(0)} c_{n−1}^{(s)}`
/// (with `c_{−1}^{(s)} = 0`). For negative `p` the constants vanish except
/// `c_k^{(k−n)} = −1`, which folds the two regimes of the frame brackets
/// into one formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketConstants {
    pub n: usize,
    table: Vec<Vec<i64>>,
}

impl BracketConstants {
    pub fn max_p(&self) -> usize {
        self.table.len() - 1
    }

    /// `c_k^{(p)}`; panics if `p` exceeds the computed range.
    pub fn get(&self, p: i64, k: usize) -> i64 {
        assert!(k < self.n, "index k = {k} out of range for n = {}", self.n);
        if p < 0 {
            return if p == k as i64 - self.n as i64 { -1 } else { 0 };
        }
        self.table[p as usize][k]
    }

    pub fn row(&self, p: usize) -> &[i64] {
        &self.table[p]
    }
}

pub fn bracket_constants(n: usize, max_p: usize) -> BracketConstants {
    assert!(n >= 1, "dimension must be positive");
    let binom = |n: usize, k: usize| -> i64 {
        (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
    };
    let first: Vec<i64> = (0..n)
        .map(|k| if (n - k).is_multiple_of(2) { 1 } else { -1 } * binom(n, k))
        .collect();
    let mut table = vec![first.clone()];
    for s in 0..max_p {
        let prev = &table[s];
        let last = prev[n - 1];
        let next: Vec<i64> = (0..n)
            .map(|k| {
                let shifted = if k == 0 { 0 } else { prev[k - 1] };
                shifted - first[k] * last
            })
            .collect();
        table.push(next);
    }
    BracketConstants { n, table }
}

/// Which canonical-frame identities to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameScope {
    /// Only `[X_i, X_j] = (j − i) X_{i+j−1}` for `i + j ≤ n`, valid on any
    /// F-manifold.
    Any,
    /// Also the identities that need a single eigenvalue; fails with a scope
    /// error on models whose `U(0)` has several.
    SingleBlock,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameReport {
    /// `[X_i, X_j] − (j − i) X_{i+j−1}` for `i + j ≤ n`.
    pub low_brackets: Residual,
    /// `[X_i, X_j] − (i − j) Σ_k c_k^{(i+j−1−n)} a^{i+j−1−k} X_k` for
    /// `0 ≤ i, j ≤ n`, with `a = tr(U)/n`.
    pub unified_brackets: Option<Residual>,
    /// `X_i(a) − a^i` for `0 ≤ i ≤ n`.
    pub eigenfunction: Option<Residual>,
    /// `U^{n+s} + Σ_k c_k^{(s)} a^{n−k+s} U^k` for `s = 0, 1, 2`.
    pub power_reduction: Option<Residual>,
}

impl Residuals for FrameReport {
    fn residuals(&self) -> Vec<Residual> {
        let mut out = vec![self.low_brackets.clone()];
        out.extend(self.unified_brackets.clone());
        out.extend(self.eigenfunction.clone());
        out.extend(self.power_reduction.clone());
        out
    }
}

pub fn check_frame_brackets(model: &FManifoldModel, scope: FrameScope) -> Result<FrameReport> {
    let n = model.dim();
    let order = model.order();
    canonical_frame(model)?;
    let x = euler_powers(model, n)?;

    let mut low = MaxNorm::new(order);
    for i in 0..=n {
        for j in 0..=(n - i) {
            let mut r = x[i].bracket(&x[j])?;
            if i + j >= 1 {
                let c = Complex64::new(j as f64 - i as f64, 0.0);
                r = r.checked_sub(&x[i + j - 1].scale(c))?;
            }
            low.vector(&r);
        }
    }
    let mut report = FrameReport {
        low_brackets: low.residual("low_brackets"),
        unified_brackets: None,
        eigenfunction: None,
        power_reduction: None,
    };

    let single = {
        let u0 = model.mult_by_euler().constant_part();
        let (spec, _) = jordan_spectrum_with(&u0, CLUSTER_TOL, &ProbeSettings::default())?;
        spec.blocks.len() == 1
    };
    match (scope, single) {
        (FrameScope::Any, false) => return Ok(report),
        (FrameScope::SingleBlock, false) => {
            return Err(Error::Scope(
                "frame identities beyond i + j ≤ n need a single eigenvalue".into(),
            ))
        }
        _ => {}
    }

    let u = model.mult_by_euler();
    let a = u.trace()?.scale_real(1.0 / n as f64);
    let consts = bracket_constants(n, 2 * n + 2);
    let a_pow: Vec<Jet> = (0..=3 * n + 2).map(|k| a.powi(k)).collect();

    let mut unified = MaxNorm::new(order);
    for i in 0..=n {
        for j in 0..=n {
            let lhs = x[i].bracket(&x[j])?;
            let p = i as i64 + j as i64 - 1 - n as i64;
            let mut rhs = JetVector::zeros(n, n, order);
            for (k, xk) in x.iter().enumerate().take(n) {
                let c = consts.get(p, k);
                if c == 0 {
                    continue;
                }
                let e = (i + j) as i64 - 1 - k as i64;
                debug_assert!(e >= 0);
                let coef = (i as f64 - j as f64) * c as f64;
                rhs = rhs.checked_add(&xk.mul_jet(&a_pow[e as usize]).scale_real(coef))?;
            }
            unified.vector(&lhs.checked_sub(&rhs)?);
        }
    }

    let mut eig = MaxNorm::new(order);
    for (i, xi) in x.iter().enumerate() {
        eig.jet(&xi.derivative(&a)?.checked_sub(&a_pow[i])?);
    }

    let mut reduction = MaxNorm::new(order);
    let u_pow: Vec<JetMatrix> = {
        let mut v = vec![JetMatrix::identity(n, n, order)];
        for k in 1..=n + 2 {
            v.push(v[k - 1].checked_matmul(&u)?);
        }
        v
    };
    for s in 0..=2 {
        let mut r = u_pow[n + s].clone();
        for k in 0..n {
            let c = consts.get(s as i64, k) as f64;
            r = r.checked_add(&u_pow[k].mul_jet(&a_pow[n - k + s]).scale_real(c))?;
        }
        reduction.matrix(&r);
    }

    report.unified_brackets = Some(unified.residual("unified_brackets"));
    report.eigenfunction = Some(eig.residual("eigenfunction"));
    report.power_reduction = Some(reduction.residual("power_reduction"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fman::{product_model, standard_block};
    use crate::linalg::c64;

    #[test]
    fn bracket_constants_for_two_dimensions() {
        let c = bracket_constants(2, 3);
        assert_eq!(c.row(0), &[1, -2]);
        assert_eq!(c.row(1), &[2, -3]);
        assert_eq!(c.get(-2, 0), -1);
        assert_eq!(c.get(-1, 1), -1);
        assert_eq!(c.get(-1, 0), 0);
        assert_eq!(c.get(-3, 0), 0);
    }

    #[test]
    fn first_row_is_signed_binomial() {
        let c = bracket_constants(5, 0);
        assert_eq!(c.row(0), &[-1, 5, -10, 10, -5]);
    }

    #[test]
    fn frame_of_nilpotent_block() {
        let m = standard_block(c64(0.0, 0.0), 2, 3);
        let f = canonical_frame(&m).unwrap();
        assert_eq!(f.fields[0], m.coordinate_field(0));
        assert_eq!(f.fields[1], *m.euler());
        let m1 = standard_block(c64(3.0, 0.0), 1, 3);
        assert_eq!(canonical_frame(&m1).unwrap().fields.len(), 1);
    }

    #[test]
    fn semisimple_frame_at_origin() {
        let p = product_model(&[
            standard_block(c64(1.0, 0.0), 1, 2),
            standard_block(c64(2.0, 0.0), 1, 2),
        ])
        .unwrap();
        let f = canonical_frame(&p).unwrap();
        let x1 = f.fields[1].constant_part();
        assert_eq!(x1.as_slice(), &[c64(1.0, 0.0), c64(2.0, 0.0)]);
    }

    #[test]
    fn hand_bracket_on_nilpotent_block() {
        // a = t0: [X_1, X_2] = (t0^2, 2 t0 (t1 + 1))
        let m = standard_block(c64(0.0, 0.0), 2, 4);
        let x = euler_powers(&m, 2).unwrap();
        let b = x[1].bracket(&x[2]).unwrap();
        let t0 = Jet::var(2, 4, 0).unwrap();
        let t1 = Jet::var(2, 4, 1).unwrap().add_constant(c64(1.0, 0.0));
        assert!((&b[0] - &(&t0 * &t0)).max_abs() < 1e-15);
        assert!((&b[1] - &(&t0 * &t1).scale_real(2.0)).max_abs() < 1e-15);
    }

    #[test]
    fn single_block_identities() {
        for m in 1..=3 {
            let r = check_frame_brackets(
                &standard_block(c64(0.5, -1.0), m, 4),
                FrameScope::SingleBlock,
            )
            .unwrap();
            assert!(r.passes(1e-10), "m={m}: {r:?}");
            assert!(r.unified_brackets.is_some());
        }
    }

    #[test]
    fn products_are_out_of_scope_for_single_block_checks() {
        let p = product_model(&[
            standard_block(c64(0.0, 0.0), 2, 3),
            standard_block(c64(1.0, 0.0), 1, 3),
        ])
        .unwrap();
        assert!(matches!(
            check_frame_brackets(&p, FrameScope::SingleBlock),
            Err(Error::Scope(_))
        ));
        let r = check_frame_brackets(&p, FrameScope::Any).unwrap();
        assert!(r.passes(1e-10));
        assert!(r.unified_brackets.is_none());
    }
}
