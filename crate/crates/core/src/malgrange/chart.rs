use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fman::{
    check_fmanifold, germ_isomorphism, standard_model, FManifoldModel, FManifoldReport,
    GermIsomorphism,
};
use crate::jets::{JetMatrix, JetVector};
use crate::linalg::{rcond, CMat, CVec};
use crate::regend::{
    is_regular, is_regular_with, jordan_spectrum, JordanSpectrum, Probe, ProbeSettings,
};
use crate::report::{MaxNorm, Residual, Residuals};
use crate::saito::BirkhoffConnection;

/// Tangent frames at the origin whose Gram matrix has reciprocal condition
/// below this are rejected.
pub const FRAME_RCOND_MIN: f64 = 1e-12;

/// Residue data `(B_0^o, B_∞)` of the connection being deformed.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationSpec {
    pub b0o: CMat,
    pub binf: CMat,
}

impl DeformationSpec {
    pub fn new(b0o: CMat, binf: CMat) -> Result<DeformationSpec> {
        if !b0o.is_square() || b0o.shape() != binf.shape() || b0o.nrows() == 0 {
            return Err(Error::Shape(format!(
                "B0 is {:?} and B_inf is {:?}; both must be the same square size",
                b0o.shape(),
                binf.shape()
            )));
        }
        let r = is_regular(&b0o);
        if !r.regular {
            return Err(Error::NotRegular { rcond: r.rcond });
        }
        Ok(DeformationSpec { b0o, binf })
    }

    pub fn dim(&self) -> usize {
        self.b0o.nrows()
    }
}

/// `B_0^o − Γ + [B_∞, Γ]`.
pub fn b0_at(spec: &DeformationSpec, gamma: &JetMatrix) -> Result<JetMatrix> {
    let n = spec.dim();
    if gamma.rows() != n || gamma.cols() != n {
        return Err(Error::Shape(format!(
            "Γ is {}x{} for a spec of size {n}",
            gamma.rows(),
            gamma.cols()
        )));
    }
    let (m, k) = (gamma.num_vars(), gamma.order());
    let binf = JetMatrix::from_constant(&spec.binf, m, k);
    JetMatrix::from_constant(&spec.b0o, m, k)
        .checked_sub(gamma)?
        .checked_add(&binf.commutator(gamma)?)
}

/// Order in which the flows of `V_i = B_0(Γ)^i` are composed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowOrder {
    /// `V_0` first, starting from `Γ = 0`.
    #[default]
    Ascending,
    Descending,
}

/// Germ of the integral leaf through 0, `u ↦ Γ(u)`.
#[derive(Clone, Debug)]
pub struct MalgrangeChart {
    pub spec: DeformationSpec,
    pub gamma: JetMatrix,
    pub flows: FlowOrder,
    /// Reciprocal condition of the Gram matrix of the tangent frame at 0.
    pub frame_rcond: f64,
}

impl MalgrangeChart {
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn order(&self) -> usize {
        self.gamma.order()
    }

    /// `∂_iΓ`, the matrix of the coordinate field `∂/∂u^i`.
    pub fn tangent(&self, i: usize) -> Result<JetMatrix> {
        self.gamma.partial(i)
    }

    pub fn tangents(&self) -> Result<Vec<JetMatrix>> {
        (0..self.dim()).map(|i| self.tangent(i)).collect()
    }

    pub fn b0(&self) -> Result<JetMatrix> {
        b0_at(&self.spec, &self.gamma)
    }
}

pub fn integrate_chart(spec: &DeformationSpec, order: usize) -> Result<MalgrangeChart> {
    integrate_chart_with(spec, order, FlowOrder::Ascending)
}

/// Composes the flows of the frame fields `V_i(Γ) = B_0(Γ)^i`, each for time
/// `u^i`. Each flow solves `∂Γ/∂u^i = V_i(Γ)` with the other variables as
/// parameters, by Picard iteration on jets: `K + 1` sweeps fix every degree.
pub fn integrate_chart_with(
    spec: &DeformationSpec,
    order: usize,
    flows: FlowOrder,
) -> Result<MalgrangeChart> {
    let n = spec.dim();
    let seq: Vec<usize> = match flows {
        FlowOrder::Ascending => (0..n).collect(),
        FlowOrder::Descending => (0..n).rev().collect(),
    };
    let mut gamma = JetMatrix::zeros(n, n, n, order);
    for &i in &seq {
        let start = gamma.clone();
        let mut cur = start.clone();
        for _ in 0..=order {
            let v = b0_at(spec, &cur)?.pow(i)?;
            let integral = JetMatrix::new(
                n,
                n,
                v.entries()
                    .iter()
                    .map(|a| a.integrate(i))
                    .collect::<Result<_>>()?,
            )?;
            cur = start.checked_add(&integral)?;
        }
        gamma = cur;
    }

    // tangent frame at 0, flattened to n² × n
    let mut frame = CMat::zeros(n * n, n);
    for i in 0..n {
        let t = gamma.partial(i)?.constant_part();
        for (r, c) in t.iter().enumerate() {
            frame[(r, i)] = *c;
        }
    }
    let frame_rcond = rcond(&(frame.adjoint() * &frame));
    if frame_rcond < FRAME_RCOND_MIN {
        return Err(Error::ChartDegeneracy(format!(
            "tangent frame Gram matrix at the origin has reciprocal condition {frame_rcond:.3e}"
        )));
    }
    Ok(MalgrangeChart {
        spec: spec.clone(),
        gamma,
        flows,
        frame_rcond,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralityReport {
    /// `Γ(0)`.
    pub origin: Residual,
    /// `∂_iΓ − Σ_j λ_j B_0(Γ)^j` with `λ` solved from the action on a cyclic
    /// vector.
    pub tangency: Residual,
    /// The same for products `∂_iΓ ∂_jΓ`.
    pub closure: Residual,
}

impl Residuals for IntegralityReport {
    fn residuals(&self) -> Vec<Residual> {
        vec![
            self.origin.clone(),
            self.tangency.clone(),
            self.closure.clone(),
        ]
    }
}

fn cyclic_vector(a: &CMat, probes: &ProbeSettings) -> Result<(CVec, Probe)> {
    let r = is_regular_with(a, probes);
    match r.cyclic_vector {
        Some(v) => Ok((v, r.probe)),
        None => Err(Error::NotRegular { rcond: r.rcond }),
    }
}

/// Whether every `∂_iΓ` and every product of two of them is a polynomial in
/// `B_0(Γ)` of degree `< n`.
pub fn check_integrality(chart: &MalgrangeChart) -> Result<IntegralityReport> {
    check_tangency(&chart.spec, &chart.gamma)
}

/// [`check_integrality`] for an arbitrary matrix germ `Γ(u)`.
pub fn check_tangency(spec: &DeformationSpec, gamma: &JetMatrix) -> Result<IntegralityReport> {
    let n = spec.dim();
    let k = gamma.order();
    let (v, _) = cyclic_vector(&spec.b0o, &ProbeSettings::default())?;
    let vj = JetVector::from_constant(v.as_slice(), gamma.num_vars(), k);
    let b = b0_at(spec, gamma)?;
    let powers: Vec<JetMatrix> = (0..n).map(|j| b.pow(j)).collect::<Result<_>>()?;
    let krylov = JetMatrix::from_columns(
        &powers
            .iter()
            .map(|p| p.mul_vec(&vj))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let kinv = krylov.inverse()?;
    let defect = |x: &JetMatrix| -> Result<JetMatrix> {
        let lambda = kinv.mul_vec(&x.mul_vec(&vj)?)?;
        let mut acc = x.clone();
        for (l, p) in lambda.iter().zip(&powers) {
            acc = acc.checked_sub(&p.mul_jet(l))?;
        }
        Ok(acc)
    };
    let tangents: Vec<JetMatrix> = (0..gamma.num_vars())
        .map(|i| gamma.partial(i))
        .collect::<Result<_>>()?;
    let mut tan = MaxNorm::new(k);
    let mut clo = MaxNorm::new(k);
    for (i, ti) in tangents.iter().enumerate() {
        tan.matrix(&defect(ti)?);
        for tj in &tangents[i..] {
            clo.matrix(&defect(&ti.checked_matmul(tj)?)?);
        }
    }
    let mut origin = MaxNorm::new(k);
    origin.push(crate::linalg::max_abs(&gamma.constant_part()), k);
    Ok(IntegralityReport {
        origin: origin.residual("gamma_at_origin"),
        tangency: tan.residual("tangency"),
        closure: clo.residual("closure"),
    })
}

/// `(B_0(Γ(u))/τ + B_∞) dτ/τ + Σ_i ∂_iΓ du^i/τ`.
pub fn canonical_connection(chart: &MalgrangeChart) -> Result<BirkhoffConnection> {
    BirkhoffConnection::new(chart.b0()?, chart.spec.binf.clone(), chart.tangents()?)
}

/// F-manifold on the chart together with how it was obtained.
#[derive(Clone, Debug)]
pub struct ChartModel {
    pub model: FManifoldModel,
    /// Vector `v` used to turn matrices into coordinates, `X ↦ T^{-1}Xv`.
    pub cyclic_vector: CVec,
    pub probe: Probe,
    /// `∂_iΓ ∂_jΓ − Σ_k c_{ij}^k ∂_kΓ`.
    pub reexpansion: Residual,
}

pub fn fmanifold_on_chart(chart: &MalgrangeChart) -> Result<ChartModel> {
    fmanifold_on_chart_with(chart, &ProbeSettings::default())
}

/// Matrix multiplication on the tangent spaces `span{∂_iΓ}`, unit `Id` and
/// Euler field `−B_0(Γ)`, written in the coordinate frame of the chart.
pub fn fmanifold_on_chart_with(
    chart: &MalgrangeChart,
    probes: &ProbeSettings,
) -> Result<ChartModel> {
    let n = chart.dim();
    let k = chart.order();
    let (v, probe) = cyclic_vector(&chart.spec.b0o, probes)?;
    let vj = JetVector::from_constant(v.as_slice(), n, k);
    let tangents = chart.tangents()?;
    let frame = JetMatrix::from_columns(
        &tangents
            .iter()
            .map(|t| t.mul_vec(&vj))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let frame_inv = frame
        .inverse()
        .map_err(|_| Error::ChartDegeneracy("tangent frame is singular at the origin".into()))?;
    let coords = |x: &JetMatrix| frame_inv.mul_vec(&x.mul_vec(&vj)?);

    let mut re = MaxNorm::new(k);
    let mut mult = Vec::with_capacity(n);
    for ti in &tangents {
        let mut row = Vec::with_capacity(n);
        for tj in &tangents {
            let p = ti.checked_matmul(tj)?;
            let c = coords(&p)?;
            let mut acc = p;
            for (ck, tk) in c.iter().zip(&tangents) {
                acc = acc.checked_sub(&tk.mul_jet(ck))?;
            }
            re.matrix(&acc);
            row.push(c);
        }
        mult.push(row);
    }
    let unit = coords(&JetMatrix::identity(n, n, k))?;
    let euler = coords(&chart.b0()?.scale_real(-1.0))?;
    Ok(ChartModel {
        model: FManifoldModel::new(mult, unit, euler)?,
        cyclic_vector: v,
        probe,
        reexpansion: re.residual("tangent_reexpansion"),
    })
}

#[derive(Clone, Debug)]
pub struct UniversalityCheck {
    pub chart_model: ChartModel,
    pub axioms: FManifoldReport,
    /// Conjugacy class of `−B_0^o`.
    pub spectrum: JordanSpectrum,
    /// Distance between the spectrum of `U` at 0 on the chart and that of
    /// `−B_0^o`.
    pub origin_spectrum_distance: f64,
    pub target: FManifoldModel,
    /// Germ isomorphism from the chart model to the standard model.
    pub iso: GermIsomorphism,
}

/// Compares the chart's F-manifold with the standard model of the
/// conjugacy class of `−B_0^o` through an explicit germ isomorphism.
pub fn check_universality_isomorphism(chart: &MalgrangeChart) -> Result<UniversalityCheck> {
    let k = chart.order();
    let chart_model = fmanifold_on_chart(chart)?;
    let axioms = check_fmanifold(&chart_model.model)?;
    let spectrum = jordan_spectrum(&(-&chart.spec.b0o))?;
    let origin = jordan_spectrum(&chart_model.model.mult_by_euler().constant_part())?;
    let target = standard_model(&spectrum, k)?;
    let iso = germ_isomorphism(&chart_model.model, &target, k)?;
    Ok(UniversalityCheck {
        origin_spectrum_distance: origin.distance(&spectrum),
        chart_model,
        axioms,
        spectrum,
        target,
        iso,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Jet;
    use crate::linalg::{c64, cmat};
    use crate::saito::birkhoff_flatness;
    use crate::Complex64;

    fn spec(b0: &[f64], binf: &[f64]) -> DeformationSpec {
        let n = (b0.len() as f64).sqrt() as usize;
        DeformationSpec::new(cmat(n, n, b0), cmat(n, n, binf)).unwrap()
    }

    #[test]
    fn b0_at_examples() {
        let s = spec(&[1.0, 2.0, 0.0, 3.0], &[0.0, 1.0, 0.0, 0.0]);
        let zero = JetMatrix::zeros(2, 2, 2, 2);
        assert_eq!(b0_at(&s, &zero).unwrap().constant_part(), s.b0o);
        let s1 = spec(&[0.5], &[7.0]);
        let x = Jet::var(1, 3, 0).unwrap();
        let g = JetMatrix::new(1, 1, vec![x.clone()]).unwrap();
        assert_eq!(
            *b0_at(&s1, &g).unwrap().get(0, 0),
            -&x.add_constant(c64(-0.5, 0.0))
        );
    }

    #[test]
    fn rank_one_chart() {
        let a = 0.7;
        let chart = integrate_chart(&spec(&[-a], &[0.3]), 4).unwrap();
        assert_eq!(*chart.gamma.get(0, 0), Jet::var(1, 4, 0).unwrap());
        let cm = fmanifold_on_chart(&chart).unwrap();
        // E = a + u, the one-dimensional standard block
        assert_eq!(
            cm.model.euler()[0],
            Jet::var(1, 4, 0).unwrap().add_constant(c64(a, 0.0))
        );
        let r = check_integrality(&chart).unwrap();
        assert!(r.passes(0.0), "{r:?}");
        let b = canonical_connection(&chart).unwrap();
        assert_eq!(b.c[0].get(0, 0).constant_term(), c64(1.0, 0.0));
    }

    #[test]
    fn relaxation_flow_matches_exponential_series() {
        // B_∞ = 0: Γ = u^0 Id, then dΓ/ds = B0 − Γ, so
        // Γ = B0 + e^{−u^1}(u^0 Id − B0).
        let k = 5;
        let s = spec(&[0.0, 1.0, 0.0, 0.0], &[0.0; 4]);
        let chart = integrate_chart(&s, k).unwrap();
        let u0 = Jet::var(2, k, 0).unwrap();
        let decay = Jet::from_fn(2, k, |e| {
            if e[0] == 0 {
                let p = e[1] as i32;
                let fact: f64 = (1..=e[1]).map(|x| x as f64).product();
                c64((-1f64).powi(p) / fact, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        for i in 0..2 {
            for j in 0..2 {
                let b = Complex64::new(s.b0o[(i, j)].re, 0.0);
                let id = if i == j { u0.clone() } else { Jet::zero(2, k) };
                let expected = (&decay * &id.add_constant(-b)).add_constant(b);
                let diff = chart.gamma.get(i, j) - &expected;
                assert!(diff.max_abs() < 1e-13, "({i},{j}) {diff:?}");
            }
        }
    }

    fn rotation_spec() -> DeformationSpec {
        // regular with a Jordan block and a nonzero B_∞
        spec(
            &[1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -2.0],
            &[0.0, 0.5, 0.0, -0.5, 0.0, 0.3, 0.0, -0.3, 0.0],
        )
    }

    #[test]
    fn pipeline_on_a_three_dimensional_spec() {
        let chart = integrate_chart(&rotation_spec(), 3).unwrap();
        let r = check_integrality(&chart).unwrap();
        assert!(r.passes(1e-10), "{r:?}");
        assert!(birkhoff_flatness(&canonical_connection(&chart).unwrap())
            .unwrap()
            .passes(1e-10));
        let u = check_universality_isomorphism(&chart).unwrap();
        assert!(u.chart_model.reexpansion.value < 1e-10);
        assert!(u.axioms.passes(1e-10), "{:?}", u.axioms);
        assert!(u.origin_spectrum_distance < 1e-6);
        assert!(u.iso.report.passes(1e-9), "{:?}", u.iso.report);
    }

    #[test]
    fn flow_order_changes_the_chart_not_the_geometry() {
        let s = rotation_spec();
        let a = integrate_chart_with(&s, 3, FlowOrder::Ascending).unwrap();
        let d = integrate_chart_with(&s, 3, FlowOrder::Descending).unwrap();
        assert!(a.gamma.checked_sub(&d.gamma).unwrap().max_abs() > 1e-3);
        assert!(check_integrality(&d).unwrap().passes(1e-10));
        assert!(check_fmanifold(&fmanifold_on_chart(&d).unwrap().model)
            .unwrap()
            .passes(1e-10));
    }

    #[test]
    fn non_integral_germ_is_detected() {
        let s = spec(&[0.0, 0.0, 1.0, 0.0], &[0.0; 4]);
        let (k, n) = (3, 2);
        // Γ = u^0 Id + u^1 N with N = E_01, not a polynomial in B0 = E_10
        let g = JetMatrix::from_fn(n, n, |i, j| match (i, j) {
            (0, 0) | (1, 1) => Jet::var(n, k, 0).unwrap(),
            (0, 1) => Jet::var(n, k, 1).unwrap(),
            _ => Jet::zero(n, k),
        })
        .unwrap();
        let r = check_tangency(&s, &g).unwrap();
        assert!(r.tangency.value > 0.5, "{r:?}");
    }

    #[test]
    fn wrong_spectrum_has_no_isomorphism() {
        let chart = integrate_chart(&spec(&[0.0, 0.0, 1.0, 0.0], &[0.0; 4]), 3).unwrap();
        let cm = fmanifold_on_chart(&chart).unwrap();
        let wrong = standard_model(&JordanSpectrum::new([(c64(1.0, 0.0), 2)]).unwrap(), 3).unwrap();
        assert!(matches!(
            germ_isomorphism(&cm.model, &wrong, 3),
            Err(Error::NoIsomorphism(_))
        ));
    }

    #[test]
    fn non_regular_spec_is_rejected() {
        let r = DeformationSpec::new(CMat::identity(2, 2), CMat::zeros(2, 2));
        assert!(matches!(r, Err(Error::NotRegular { .. })));
    }
}
