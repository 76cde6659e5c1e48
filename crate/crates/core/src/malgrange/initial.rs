use num_complex::Complex64;

use super::chart::{
    canonical_connection, fmanifold_on_chart_with, integrate_chart, DeformationSpec, MalgrangeChart,
};
use crate::error::{Error, Result};
use crate::fman::{euler_powers, germ_isomorphism, FManifoldModel, IsoReport};
use crate::frob::{
    frobenius_verdict, levi_civita_curvature, CurvatureReport, EulerMode, FrobeniusVerdict,
    InvariantMetric, LeviCivita, VerdictSettings,
};
use crate::jets::{Jet, JetMatrix, JetVector};
use crate::linalg::{max_abs, rcond, CMat, CVec};
use crate::regend::{characteristic_polynomial, is_regular, Probe, ProbeOrder, ProbeSettings};
use crate::report::{MaxNorm, Residual, Residuals};
use crate::saito::{
    birkhoff_to_saito, check_saito_metric_axioms, frobenius_from_saito, metric_invariance,
    SaitoFrobenius, SaitoMetricReport,
};

/// Gram matrices with reciprocal condition below this count as degenerate.
pub const METRIC_RCOND_MIN: f64 = 1e-12;

/// Extra jet orders carried through the chart, the isomorphism and the
/// pull-back so that the final metric is trusted to the requested order.
pub const ORDER_MARGIN: usize = 2;

/// Pointwise data at the origin of a regular F-manifold. `gp` and `vp` are
/// written in the frame `{e, E, …, E^{n−1}}` at the origin: `gp[(i, j)] =
/// g(E^i, E^j)` and `V(E^i) = Σ_j vp[(j, i)] E^j`.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub model: FManifoldModel,
    pub gp: CMat,
    pub vp: CMat,
    pub d: Complex64,
}

impl InitialData {
    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Frame `{e, E, …, E^{n−1}}` at the origin, as columns in coordinates.
    pub fn frame(&self) -> Result<CMat> {
        let n = self.dim();
        let powers = euler_powers(&self.model, n - 1)?;
        Ok(JetMatrix::from_columns(&powers)?.constant_part())
    }

    /// `g_p` in the coordinate basis, `F^{-T} g_p F^{-1}`.
    pub fn gram_in_coordinates(&self) -> Result<CMat> {
        let f_inv = invert(&self.frame()?, "canonical frame at the origin")?;
        Ok(f_inv.transpose() * &self.gp * &f_inv)
    }

    /// `V_p` in the coordinate basis.
    pub fn v_in_coordinates(&self) -> Result<CMat> {
        let f = self.frame()?;
        let f_inv = invert(&f, "canonical frame at the origin")?;
        Ok(&f * &self.vp * f_inv)
    }
}

fn invert(a: &CMat, what: &str) -> Result<CMat> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("{what} is singular")))
}

fn constant_residual(name: &str, value: f64) -> Residual {
    Residual::new(name, value, 0)
}

/// `e♭(E^k)` for `k < 2n − 1`, reducing `E^k` for `k ≥ n` with the
/// characteristic polynomial of `U_p`.
fn coidentity_moments(gp: &CMat, b0o: &CMat) -> Vec<Complex64> {
    let n = gp.nrows();
    let chi = characteristic_polynomial(b0o);
    let mut m: Vec<Complex64> = (0..n).map(|k| gp[(0, k)]).collect();
    for k in n..2 * n - 1 {
        let v = (0..n).map(|j| chi[j] * m[k - n + j]).sum::<Complex64>();
        m.push(-v);
    }
    m
}

#[derive(Clone, Debug)]
pub struct InitialDataReport {
    /// Whether `U` is regular at the origin; the other residuals are NaN
    /// otherwise.
    pub regular: bool,
    /// Matrix of `U_p` in the frame `{E^i}`.
    pub b0o: CMat,
    pub gp_rcond: f64,
    pub gp_symmetric: Residual,
    /// `g_p(X∘Y, Z) − g_p(X, Y∘Z)` over coordinate fields at the origin.
    pub invariance: Residual,
    /// `Σ_k (V_p)_{ki} e♭(E^{k+j}) + (V_p)_{kj} e♭(E^{k+i})`.
    pub skewness: Residual,
    /// `(V_p)_{j0} − (1 − D/2) δ_{0j}`.
    pub unit_eigen: Residual,
    /// Departure of the first `n − 1` columns of the matrix of `U_p` from
    /// the shift `E^i ↦ E^{i+1}`.
    pub companion: Residual,
}

impl Residuals for InitialDataReport {
    fn residuals(&self) -> Vec<Residual> {
        vec![
            self.gp_symmetric.clone(),
            self.invariance.clone(),
            self.skewness.clone(),
            self.unit_eigen.clone(),
            self.companion.clone(),
        ]
    }

    fn passes(&self, tol: f64) -> bool {
        self.regular
            && self.gp_rcond > METRIC_RCOND_MIN
            && self.residuals().iter().all(|r| r.value <= tol)
    }
}

pub fn validate_initial_data(d: &InitialData) -> Result<InitialDataReport> {
    let n = d.dim();
    if d.gp.shape() != (n, n) || d.vp.shape() != (n, n) {
        return Err(Error::Shape(format!(
            "g_p is {:?} and V_p is {:?} on a model of dimension {n}",
            d.gp.shape(),
            d.vp.shape()
        )));
    }
    let gp = &d.gp;
    let gp_rcond = rcond(gp);
    let gp_symmetric = constant_residual("gp_symmetric", max_abs(&(gp - gp.transpose())));
    let u0 = d.model.mult_by_euler().constant_part();
    let frame = d.frame()?;
    let frame_inv = frame.clone().try_inverse();
    let (regular, frame_inv) = match frame_inv {
        Some(f) if is_regular(&u0).regular => (true, f),
        _ => {
            let nan = |name: &str| constant_residual(name, f64::NAN);
            return Ok(InitialDataReport {
                regular: false,
                b0o: CMat::from_element(n, n, Complex64::new(f64::NAN, 0.0)),
                gp_rcond,
                gp_symmetric,
                invariance: nan("invariance"),
                skewness: nan("vp_skewness"),
                unit_eigen: nan("vp_unit_eigenvalue"),
                companion: nan("companion_shape"),
            });
        }
    };
    let b0o = &frame_inv * &u0 * &frame;

    let mut inv: f64 = 0.0;
    for i in 0..n {
        let c = d
            .model
            .multiplication_matrix(&d.model.coordinate_field(i))?
            .constant_part();
        let a = &frame_inv * c * &frame;
        inv = inv.max(max_abs(&(gp * &a - a.transpose() * gp)));
    }

    let m = coidentity_moments(gp, &b0o);
    let v = &d.vp;
    let mut skew: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s: Complex64 = (0..n)
                .map(|k| v[(k, i)] * m[k + j] + v[(k, j)] * m[k + i])
                .sum();
            skew = skew.max(s.norm());
        }
    }
    let q = Complex64::new(1.0, 0.0) - d.d / 2.0;
    let unit_eigen = (0..n)
        .map(|j| (v[(j, 0)] - if j == 0 { q } else { Complex64::new(0.0, 0.0) }).norm())
        .fold(0.0, f64::max);
    let mut companion: f64 = 0.0;
    for i in 0..n.saturating_sub(1) {
        for j in 0..n {
            let want = if j == i + 1 { 1.0 } else { 0.0 };
            companion = companion.max((b0o[(j, i)] - want).norm());
        }
    }
    Ok(InitialDataReport {
        regular,
        b0o,
        gp_rcond,
        gp_symmetric,
        invariance: constant_residual("invariance", inv),
        skewness: constant_residual("vp_skewness", skew),
        unit_eigen: constant_residual("vp_unit_eigenvalue", unit_eigen),
        companion: constant_residual("companion_shape", companion),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendSettings {
    pub order: usize,
    pub tol: f64,
    /// Cyclic-vector probes for the coordinate solves on the chart.
    pub probes: ProbeSettings,
}

impl ExtendSettings {
    pub fn new(order: usize) -> ExtendSettings {
        ExtendSettings {
            order,
            tol: crate::DEFAULT_TOL,
            probes: ProbeSettings::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtensionReport {
    pub validation: InitialDataReport,
    /// `F^T g(0) F − g_p`.
    pub origin: Residual,
    /// `(∇E)(0) − V_p − (D/2) Id` in coordinates.
    pub euler_derivative: Residual,
    /// `L_E g − D g`.
    pub euler_rescaling: Residual,
    /// `g(X∘Y, Z) − g(X, Y∘Z)` on the model.
    pub invariance: Residual,
    pub curvature: CurvatureReport,
    /// Present when the model is a product of standard blocks.
    pub verdict: Option<FrobeniusVerdict>,
    /// Gram matrix against the block form of its own coidentity; present
    /// with the verdict.
    pub block_form: Option<Residual>,
    /// `g_0 B_0^o − (B_0^o)^T g_0`.
    pub b0o_symmetric: Residual,
    /// `g_0 B_∞ + B_∞^T g_0`.
    pub binf_skew: Residual,
    /// `g_0 Γ − Γ^T g_0` along the chart.
    pub chart_symmetric: Residual,
    pub saito_metric: SaitoMetricReport,
    pub iso: IsoReport,
    /// Which cyclic vector fixed the chart coordinates of the F-manifold.
    pub probe: Probe,
    pub sign_convention: &'static str,
}

pub const SIGN_CONVENTION: &str =
    "chart built from the residues (-B0, -V_p); bundle (D, C, B0(Γ), V_p) with section v_0 and q = 1 - D/2";

impl Residuals for ExtensionReport {
    fn residuals(&self) -> Vec<Residual> {
        let mut out = vec![
            self.origin.clone(),
            self.euler_derivative.clone(),
            self.euler_rescaling.clone(),
            self.invariance.clone(),
            self.b0o_symmetric.clone(),
            self.binf_skew.clone(),
            self.chart_symmetric.clone(),
        ];
        out.extend(self.curvature.residuals());
        if let Some(v) = &self.verdict {
            out.extend(v.residuals());
        }
        out.extend(self.block_form.clone());
        out.extend(self.saito_metric.residuals());
        out.extend(self.iso.residuals());
        out
    }
}

#[derive(Clone, Debug)]
pub struct MetricExtension {
    /// Gram matrix of the extended metric in the model's coordinates.
    pub gram: JetMatrix,
    /// The same metric through its coidentity, for products of standard
    /// blocks.
    pub metric: Option<InvariantMetric>,
    /// `g_0(v_i, v_j) = e♭(E^{i+j})` on the fibre.
    pub g0: CMat,
    pub chart: MalgrangeChart,
    pub chart_metric: SaitoFrobenius,
    /// Germ isomorphism from the model to the chart.
    pub iso: JetVector,
    pub report: ExtensionReport,
}

pub fn initial_condition_extend(d: &InitialData, order: usize) -> Result<MetricExtension> {
    initial_condition_extend_with(d, &ExtendSettings::new(order))
}

/// Extends `g_p` to a Frobenius metric with `(∇E)(0) = V_p + (D/2) Id`.
///
/// The universal deformation of `(−B_0^o, −V_p)` carries the constant
/// metric `g_0` on its fibres, and the section `v_0` is primitive and
/// homogeneous with `q = 1 − D/2`; the induced metric on the chart is
/// pulled back along the germ isomorphism from the model.
pub fn initial_condition_extend_with(
    d: &InitialData,
    s: &ExtendSettings,
) -> Result<MetricExtension> {
    let n = d.dim();
    let k = s.order;
    let kc = k + ORDER_MARGIN;
    let valid = d
        .model
        .unit()
        .min_valid_order()
        .min(d.model.euler().min_valid_order());
    if valid < k + 1 {
        return Err(Error::Shape(format!(
            "model is trusted to order {valid}; an extension to order {k} needs {}",
            k + 1
        )));
    }
    let validation = validate_initial_data(d)?;
    if !validation.passes(s.tol) {
        let worst = validation
            .residuals()
            .into_iter()
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .map(|r| format!("{} = {:.3e}", r.name, r.value))
            .unwrap_or_default();
        return Err(Error::InvalidInitialData(format!(
            "regular: {}, rcond(g_p) = {:.3e}, worst residual {worst}",
            validation.regular, validation.gp_rcond
        )));
    }
    let b0o = validation.b0o.clone();
    let binf = d.vp.clone();

    let spec = DeformationSpec::new(-&b0o, -&binf)?;
    let chart = integrate_chart(&spec, kc)?;
    let m = coidentity_moments(&d.gp, &b0o);
    let g0 = CMat::from_fn(n, n, |i, j| m[i + j]);

    let bundle = birkhoff_to_saito(&canonical_connection(&chart)?)?.with_metric(g0.clone())?;
    let saito_metric = check_saito_metric_axioms(&bundle)?;
    let mut v0 = CVec::zeros(n);
    v0[0] = Complex64::new(1.0, 0.0);
    let q = Complex64::new(1.0, 0.0) - d.d / 2.0;
    let chart_metric = frobenius_from_saito(&bundle, &v0, q, s.tol)?;

    let cm = fmanifold_on_chart_with(&chart, &s.probes)?;
    let model = d.model.to_order(kc);
    let iso = germ_isomorphism(&model, &cm.model, kc)?;
    let psi = &iso.map;
    let jac = psi.jacobian()?;
    let gram = jac
        .transpose()
        .checked_matmul(&chart_metric.gram.compose(psi)?)?
        .checked_matmul(&jac)?
        .to_order(k);
    let model = d.model.to_order(k);

    let frame = d.frame()?;
    let mut origin = MaxNorm::new(k);
    origin.push(
        max_abs(&(frame.transpose() * gram.constant_part() * &frame - &d.gp)),
        k,
    );

    let lc = LeviCivita::new(&gram)?;
    let nabla_e = lc.covariant_derivative(model.euler())?.constant_part();
    let expected = d.v_in_coordinates()? + CMat::identity(n, n) * (d.d / 2.0);
    let mut de = MaxNorm::new(k);
    de.push(max_abs(&(nabla_e - expected)), k);

    let mut resc = MaxNorm::new(k);
    resc.matrix(&lie_derivative(&gram, model.euler())?.checked_sub(&gram.scale(d.d))?);
    let invariance = metric_invariance(&model, &gram)?;
    let curvature = levi_civita_curvature(&gram, model.unit())?;

    let (verdict, metric, block_form) = match block_metric(&model, &gram)? {
        Some((im, form)) => {
            let settings = VerdictSettings {
                tol: s.tol,
                euler: EulerMode::Fixed(d.d),
                anchors: None,
            };
            match frobenius_verdict(&im, &model, &settings) {
                Ok(v) => (Some(v), Some(im), Some(form)),
                Err(Error::Scope(_)) => (None, None, None),
                Err(e) => return Err(e),
            }
        }
        None => (None, None, None),
    };

    let b0o_symmetric = constant_residual(
        "b0o_g0_symmetric",
        max_abs(&(&g0 * &b0o - b0o.transpose() * &g0)),
    );
    let binf_skew = constant_residual(
        "binf_g0_skew",
        max_abs(&(&g0 * &binf + binf.transpose() * &g0)),
    );
    let g0j = JetMatrix::from_constant(&g0, n, kc);
    let mut sym = MaxNorm::new(kc);
    sym.matrix(
        &g0j.checked_matmul(&chart.gamma)?
            .checked_sub(&chart.gamma.transpose().checked_matmul(&g0j)?)?,
    );

    let report = ExtensionReport {
        validation,
        origin: origin.residual("origin_match"),
        euler_derivative: de.residual("euler_derivative_at_origin"),
        euler_rescaling: resc.residual("euler_rescaling"),
        invariance,
        curvature,
        verdict,
        block_form,
        b0o_symmetric,
        binf_skew,
        chart_symmetric: sym.residual("chart_g0_symmetric"),
        saito_metric,
        iso: iso.report.clone(),
        probe: cm.probe,
        sign_convention: SIGN_CONVENTION,
    };
    let frobenius = report.verdict.as_ref().is_none_or(|v| v.frobenius);
    if !frobenius || !report.passes(s.tol) {
        let worst = report
            .residuals()
            .into_iter()
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .map(|r| format!("{} = {:.3e}", r.name, r.value))
            .unwrap_or_default();
        return Err(Error::ConstructionInconsistency(format!(
            "extended metric fails its checks: {worst}"
        )));
    }
    Ok(MetricExtension {
        gram,
        metric,
        g0,
        chart,
        chart_metric,
        iso: iso.map,
        report,
    })
}

/// `(L_X g)_{ij} = X(g_{ij}) + g_{kj} ∂_iX^k + g_{ik} ∂_jX^k`.
pub fn lie_derivative(g: &JetMatrix, x: &JetVector) -> Result<JetMatrix> {
    let dx = x.jacobian()?;
    let along = JetMatrix::new(
        g.rows(),
        g.cols(),
        g.entries()
            .iter()
            .map(|e| x.derivative(e))
            .collect::<Result<_>>()?,
    )?;
    along
        .checked_add(&dx.transpose().checked_matmul(g)?)?
        .checked_add(&g.checked_matmul(&dx)?)
}

/// Coidentity form of `g` on a product of standard blocks, with the
/// residual of `g` against the block form it determines.
fn block_metric(
    model: &FManifoldModel,
    gram: &JetMatrix,
) -> Result<Option<(InvariantMetric, Residual)>> {
    let Some(spectrum) = model.spectrum() else {
        return Ok(None);
    };
    let blocks: Vec<usize> = spectrum.blocks.iter().map(|b| b.size).collect();
    let mut eta: Vec<Vec<Jet>> = Vec::new();
    let mut off = 0;
    for &m in &blocks {
        eta.push((0..m).map(|i| gram.get(off, off + i).clone()).collect());
        off += m;
    }
    let im = InvariantMetric::new(blocks, eta)?;
    let mut form = MaxNorm::new(gram.order());
    form.matrix(&im.gram().checked_sub(gram)?);
    Ok(Some((im, form.residual("block_form"))))
}

/// Runs the extension with the two deterministic probe orders and returns
/// the largest difference of the resulting metrics.
pub fn uniqueness_probe(d: &InitialData, order: usize) -> Result<Residual> {
    let run = |o: ProbeOrder| {
        let mut s = ExtendSettings::new(order);
        s.probes.order = o;
        initial_condition_extend_with(d, &s)
    };
    let a = run(ProbeOrder::BasisFirst)?;
    let b = run(ProbeOrder::OnesFirst)?;
    let mut r = MaxNorm::new(order);
    r.matrix(&a.gram.checked_sub(&b.gram)?);
    Ok(r.residual("probe_order_uniqueness"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fman::{standard_model, FManifoldModel};
    use crate::linalg::{c64, cmat};
    use crate::regend::JordanSpectrum;

    fn model(blocks: &[(Complex64, usize)], k: usize) -> FManifoldModel {
        standard_model(&JordanSpectrum::new(blocks.iter().copied()).unwrap(), k).unwrap()
    }

    /// Valid data on a two-dimensional model with `e♭(e) = 0`:
    /// `V = [[q, q m2/m1], [0, −q]]`, any `D`.
    fn null_unit_data(model: FManifoldModel, m1: f64, d: f64) -> InitialData {
        let probe = InitialData {
            model,
            gp: CMat::zeros(2, 2),
            vp: CMat::zeros(2, 2),
            d: c64(d, 0.0),
        };
        let b0o = validate_initial_data(&probe).unwrap().b0o;
        // E² = p0 e + p1 E, so e♭(E²) = p1 m1
        let m2 = b0o[(1, 1)] * m1;
        let q = c64(1.0 - d / 2.0, 0.0);
        InitialData {
            gp: CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(m1, 0.0), c64(m1, 0.0), m2]),
            vp: CMat::from_row_slice(2, 2, &[q, q * m2 / m1, c64(0.0, 0.0), -q]),
            ..probe
        }
    }

    #[test]
    fn scalar_case_forces_d_two() {
        let k = 3;
        let m = model(&[(c64(0.5, 0.0), 1)], k + 2);
        let ok = InitialData {
            model: m.clone(),
            gp: cmat(1, 1, &[2.0]),
            vp: CMat::zeros(1, 1),
            d: c64(2.0, 0.0),
        };
        let ext = initial_condition_extend(&ok, k).unwrap();
        assert!((ext.gram.get(0, 0) - &Jet::real(1, k, 2.0)).max_abs() < 1e-12);

        let bad = InitialData {
            vp: cmat(1, 1, &[0.5]),
            d: c64(1.0, 0.0),
            ..ok
        };
        let r = validate_initial_data(&bad).unwrap();
        assert!((r.skewness.value - 2.0).abs() < 1e-12);
        assert!(matches!(
            initial_condition_extend(&bad, k),
            Err(Error::InvalidInitialData(_))
        ));
    }

    #[test]
    fn epsilon_extends_to_itself() {
        let k = 3;
        let m = model(&[(c64(0.0, 0.0), 2)], k + 2);
        let d = InitialData {
            model: m,
            gp: cmat(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            vp: CMat::zeros(2, 2),
            d: c64(2.0, 0.0),
        };
        let ext = initial_condition_extend(&d, k).unwrap();
        let eps = JetMatrix::from_constant(&cmat(2, 2, &[0.0, 1.0, 1.0, 0.0]), 2, k);
        assert!(ext.gram.checked_sub(&eps).unwrap().max_abs() < 1e-12);
        assert!(ext.report.verdict.as_ref().unwrap().frobenius);
    }

    #[test]
    fn block_family_matches_power_law() {
        // on a two-dimensional block with e♭(e) = 0 the Frobenius metrics are
        // η_1 = m1 (1 + t1)^{D−2} (with η_0 = 0) when a = 0
        let k = 3;
        for d in [0.0, 1.0, 3.5] {
            let data = null_unit_data(model(&[(c64(0.0, 0.0), 2)], k + 2), 1.5, d);
            let ext = initial_condition_extend(&data, k).unwrap();
            let t1 = Jet::var(2, k, 1).unwrap().add_constant(c64(1.0, 0.0));
            let expected = t1
                .powc(c64(d - 2.0, 0.0), c64(1.0, 0.0))
                .unwrap()
                .scale_real(1.5);
            assert!(
                (ext.gram.get(0, 1) - &expected).max_abs() < 1e-10,
                "D = {d}"
            );
            assert!(ext.gram.get(0, 0).max_abs() < 1e-10);
            assert!(ext.report.euler_derivative.value < 1e-10);
        }
    }

    #[test]
    fn semisimple_and_shifted_blocks() {
        let k = 3;
        let cases = [
            model(&[(c64(0.0, 0.0), 1), (c64(1.0, 0.0), 1)], k + 2),
            model(&[(c64(0.5, 0.5), 2)], k + 2),
        ];
        for m in cases {
            let data = null_unit_data(m, 0.8, 1.0);
            let ext = initial_condition_extend(&data, k).unwrap();
            assert!(ext.report.passes(1e-9), "{:?}", ext.report.residuals());
            assert!(ext.report.verdict.unwrap().frobenius);
        }
    }

    #[test]
    fn probe_orders_agree() {
        let data = null_unit_data(model(&[(c64(0.3, 0.0), 2)], 5), 1.0, 0.5);
        assert!(uniqueness_probe(&data, 3).unwrap().value < 1e-10);
    }

    #[test]
    fn validation_residuals() {
        let m = model(&[(c64(0.0, 0.0), 2)], 3);
        // V_p = 0 with D = 2 passes the unit condition
        let d = InitialData {
            model: m.clone(),
            gp: cmat(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            vp: CMat::zeros(2, 2),
            d: c64(2.0, 0.0),
        };
        assert!(validate_initial_data(&d).unwrap().passes(1e-12));
        // g_p-symmetric V_p
        let sym = InitialData {
            vp: cmat(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            ..d.clone()
        };
        let r = validate_initial_data(&sym).unwrap();
        assert!(r.skewness.value > 0.5);
        // g(E, E) inconsistent with e♭(E²) breaks invariance
        let bad = InitialData {
            gp: cmat(2, 2, &[0.0, 1.0, 1.0, 1.0]),
            ..d
        };
        assert!(validate_initial_data(&bad).unwrap().invariance.value > 0.5);
    }
}
