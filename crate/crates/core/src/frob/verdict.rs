use num_complex::Complex64;

use super::oneform::psi_from_eta;
use super::{
    check_euler_rescaling, check_gamma, check_unit_flat, darboux_egoroff_residual, gamma_operator,
    gamma_standard_blocks, invert_oneform, levi_civita_curvature, solve_euler_rescaling,
    ConstantAlgebra, CurvatureReport, DarbouxEgoroffTable, GammaReport, InvariantMetric,
    UnitFlatReport,
};
use crate::error::{Error, Result};
use crate::fman::FManifoldModel;
use crate::jets::{JetMatrix, JetVector};
use crate::report::{MaxNorm, Residual, Residuals};

/// How the Euler condition `E(η) = (D − 2) η` enters the verdict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EulerMode {
    /// Frobenius on `(M, ∘, e)` only.
    Skip,
    Fixed(Complex64),
    /// Use the least-squares `D`.
    Solve,
}

#[derive(Clone, Debug)]
pub struct VerdictSettings {
    pub tol: f64,
    pub euler: EulerMode,
    /// Square-root anchor per block; `None` picks principal roots.
    pub anchors: Option<Vec<Complex64>>,
}

impl Default for VerdictSettings {
    fn default() -> Self {
        VerdictSettings {
            tol: crate::DEFAULT_TOL,
            euler: EulerMode::Skip,
            anchors: None,
        }
    }
}

/// The `ψ → β → γ` chain on the product algebra.
#[derive(Clone, Debug)]
pub struct GammaChain {
    pub psi: JetVector,
    pub beta: JetVector,
    pub gamma: JetMatrix,
    pub gamma_checks: GammaReport,
    pub darboux_egoroff: DarbouxEgoroffTable,
    /// General formula for `γ` against the standard-block form.
    pub fast_path_agreement: Residual,
}

impl GammaChain {
    fn verdict_residuals(&self) -> Vec<Residual> {
        let mut out = self.gamma_checks.residuals();
        out.push(self.max_darboux_egoroff());
        out
    }

    pub fn max_darboux_egoroff(&self) -> Residual {
        let mut r = MaxNorm::new(self.psi.order());
        for x in self.darboux_egoroff.residuals() {
            r.push(x.value, x.order);
        }
        r.residual("darboux_egoroff")
    }
}

#[derive(Clone, Debug)]
pub struct EulerCheck {
    pub d: Complex64,
    pub residual: Residual,
}

#[derive(Clone, Debug)]
pub struct FrobeniusVerdict {
    pub frobenius: bool,
    pub tol: f64,
    pub chain: GammaChain,
    pub unit_flat: UnitFlatReport,
    pub euler: Option<EulerCheck>,
    /// `e♭` is closed, so `η = dH` for a local potential `H`.
    pub potential_exists: bool,
    /// Largest `∂_{0(α)} η_{i(α)}`.
    pub t0_dependence: Residual,
    /// Independent Levi-Civita check on the assembled metric.
    pub curvature: CurvatureReport,
    /// Whether the curvature check reaches the same conclusion.
    pub curvature_agrees: bool,
}

impl Residuals for FrobeniusVerdict {
    fn residuals(&self) -> Vec<Residual> {
        let mut out = self.chain.verdict_residuals();
        out.extend(self.unit_flat.residuals());
        if let Some(e) = &self.euler {
            out.push(e.residual.clone());
        }
        out
    }
}

fn check_block_model(g: &InvariantMetric, model: &FManifoldModel) -> Result<()> {
    if model.dim() != g.num_vars() {
        return Err(Error::Shape(format!(
            "metric in {} variables on a model of dimension {}",
            g.num_vars(),
            model.dim()
        )));
    }
    let c = model
        .constant_structure()
        .ok_or_else(|| Error::Scope("multiplication is not constant".into()))?;
    let mut off = 0;
    let mut expected =
        vec![vec![vec![Complex64::new(0.0, 0.0); model.dim()]; model.dim()]; model.dim()];
    for &m in g.blocks() {
        for i in 0..m {
            for j in 0..m - i {
                expected[off + i][off + j][off + i + j] = Complex64::new(1.0, 0.0);
            }
        }
        off += m;
    }
    if c != expected {
        return Err(Error::Scope(
            "model is not a product of standard blocks matching the metric".into(),
        ));
    }
    Ok(())
}

/// Runs the `ψ → β → γ → Darboux–Egoroff` chain on the product algebra, the unit
/// conditions and optionally the Euler condition; the metric is Frobenius
/// when every residual is within `tol`. The Levi-Civita curvature of the
/// assembled metric is computed alongside as an independent check.
pub fn frobenius_verdict(
    g: &InvariantMetric,
    model: &FManifoldModel,
    settings: &VerdictSettings,
) -> Result<FrobeniusVerdict> {
    check_block_model(g, model)?;
    if let Some(a) = &settings.anchors {
        if a.len() != g.blocks().len() {
            return Err(Error::Shape(format!(
                "{} anchors for {} blocks",
                a.len(),
                g.blocks().len()
            )));
        }
    }
    if let Some(w) = g.degeneracy_warning() {
        return Err(Error::DegenerateMetric(w));
    }
    let model = model.to_order(g.order());
    let order = g.order();

    // ψ and β are blockwise; γ and the Darboux–Egoroff system live on the
    // whole product algebra
    let mut psi = Vec::new();
    let mut beta = Vec::new();
    let mut t0 = MaxNorm::new(order);
    for ((a, _), off) in g.blocks().iter().enumerate().zip(g.offsets()) {
        let anchor = settings.anchors.as_ref().map(|v| v[a]);
        let p = psi_from_eta(g.eta(a), anchor)?;
        beta.extend(invert_oneform(&p)?.into_components());
        psi.extend(p.into_components());
        for f in g.eta(a) {
            t0.jet(&f.partial(off)?);
        }
    }
    let psi = JetVector::new(psi)?;
    let beta = JetVector::new(beta)?;
    let alg = ConstantAlgebra::standard_blocks(g.blocks())?;
    let gamma = gamma_operator(&psi, &beta, &alg)?;
    let fast = gamma_standard_blocks(&psi, &beta, g.blocks())?;
    let mut agree = MaxNorm::new(order);
    agree.matrix(&gamma.checked_sub(&fast)?);
    let gamma_checks = check_gamma(&gamma, &alg, &psi)?;
    let darboux_egoroff = darboux_egoroff_residual(&gamma, &alg)?;
    let chain = GammaChain {
        psi,
        beta,
        gamma,
        gamma_checks,
        darboux_egoroff,
        fast_path_agreement: agree.residual("gamma_fast_path"),
    };

    let unit_flat = check_unit_flat(g)?;
    let euler = match settings.euler {
        EulerMode::Skip => None,
        EulerMode::Fixed(d) => Some(EulerCheck {
            d,
            residual: check_euler_rescaling(g, model.euler(), d)?,
        }),
        EulerMode::Solve => {
            let fit = solve_euler_rescaling(g, model.euler())?;
            Some(EulerCheck {
                d: fit.d,
                residual: fit.residual,
            })
        }
    };
    let curvature = levi_civita_curvature(&g.gram(), model.unit())?;

    let mut verdict = FrobeniusVerdict {
        frobenius: false,
        tol: settings.tol,
        chain,
        potential_exists: unit_flat.closedness.value <= settings.tol,
        unit_flat,
        euler,
        t0_dependence: t0.residual("t0_dependence"),
        curvature,
        curvature_agrees: false,
    };
    verdict.frobenius = verdict.passes(settings.tol);
    let flat = verdict.curvature.passes(settings.tol);
    // the curvature oracle does not see the Euler condition
    let chain_without_euler = verdict
        .chain
        .verdict_residuals()
        .into_iter()
        .chain(verdict.unit_flat.residuals())
        .all(|r| r.value <= settings.tol);
    verdict.curvature_agrees = flat == chain_without_euler;
    Ok(verdict)
}
