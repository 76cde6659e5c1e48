use crate::error::{Error, Result};
use crate::jets::JetMatrix;
use crate::linalg::CMat;
use crate::report::{MaxNorm, Residual, Residuals};

/// Saito bundle over a germ `(M, 0)` of dimension `m`, presented in a global
/// frame of the rank-`r` bundle `V`: `∇ = d + Σ_i Ω_i dx^i`,
/// `Φ = Σ_i Φ_i dx^i`, and the endomorphisms `R_0` (a jet) and `R_∞`
/// (constant). The optional metric `g_V` is constant in the frame.
#[derive(Clone, Debug)]
pub struct SaitoBundle {
    pub omega: Vec<JetMatrix>,
    pub phi: Vec<JetMatrix>,
    pub r0: JetMatrix,
    pub rinf: CMat,
    pub gv: Option<CMat>,
}

impl SaitoBundle {
    /// Bundle with the trivial flat connection `Ω = 0`.
    pub fn flat(phi: Vec<JetMatrix>, r0: JetMatrix, rinf: CMat) -> Result<SaitoBundle> {
        let omega = phi
            .iter()
            .map(|p| JetMatrix::zeros(p.rows(), p.cols(), p.num_vars(), p.order()))
            .collect();
        let b = SaitoBundle {
            omega,
            phi,
            r0,
            rinf,
            gv: None,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn with_metric(mut self, gv: CMat) -> Result<SaitoBundle> {
        self.gv = Some(gv);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.phi.len();
        let r = self.r0.rows();
        if m == 0 || self.omega.len() != m {
            return Err(Error::Shape(
                "need one Φ_i and one Ω_i per base coordinate".into(),
            ));
        }
        let square_r = |a: &JetMatrix| a.rows() == r && a.cols() == r && a.num_vars() == m;
        if !square_r(&self.r0)
            || !self.phi.iter().all(square_r)
            || !self.omega.iter().all(square_r)
            || self.rinf.shape() != (r, r)
        {
            return Err(Error::Shape(format!(
                "Saito data must be {r}×{r} matrices of jets in {m} variables"
            )));
        }
        let k = self.r0.order();
        if self.phi.iter().chain(&self.omega).any(|a| a.order() != k) {
            return Err(Error::Shape("Saito data mix jet orders".into()));
        }
        if let Some(g) = &self.gv {
            if g.shape() != (r, r) {
                return Err(Error::Shape("bundle metric has the wrong size".into()));
            }
            if g.clone().try_inverse().is_none() {
                return Err(Error::DegenerateMetric("bundle metric is singular".into()));
            }
        }
        Ok(())
    }

    pub fn base_dim(&self) -> usize {
        self.phi.len()
    }

    pub fn rank(&self) -> usize {
        self.r0.rows()
    }

    pub fn order(&self) -> usize {
        self.r0.order()
    }

    pub(crate) fn constant(&self, a: &CMat) -> JetMatrix {
        JetMatrix::from_constant(a, self.base_dim(), self.order())
    }

    /// `∇_i A = ∂_i A + [Ω_i, A]` for an endomorphism-valued function.
    pub fn covariant_endo(&self, i: usize, a: &JetMatrix) -> Result<JetMatrix> {
        a.partial(i)?.checked_add(&self.omega[i].commutator(a)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaitoReport {
    /// `∂_iΩ_j − ∂_jΩ_i + [Ω_i, Ω_j]`.
    pub curvature: Residual,
    /// `[Φ_i, Φ_j]`.
    pub phi_wedge_phi: Residual,
    /// `[R_0, Φ_i]`.
    pub r0_phi_commute: Residual,
    /// `∇_iΦ_j − ∇_jΦ_i`.
    pub d_nabla_phi: Residual,
    /// `∇_i R_0 + Φ_i − [Φ_i, R_∞]`.
    pub nabla_r0: Residual,
    /// `∇_i R_∞`.
    pub nabla_rinf: Residual,
}

impl Residuals for SaitoReport {
    fn residuals(&self) -> Vec<Residual> {
        vec![
            self.curvature.clone(),
            self.phi_wedge_phi.clone(),
            self.r0_phi_commute.clone(),
            self.d_nabla_phi.clone(),
            self.nabla_r0.clone(),
            self.nabla_rinf.clone(),
        ]
    }
}

pub fn check_saito_axioms(s: &SaitoBundle) -> Result<SaitoReport> {
    s.validate()?;
    let m = s.base_dim();
    let k = s.order();
    let rinf = s.constant(&s.rinf);
    let (mut curv, mut wedge, mut comm, mut dphi, mut r0, mut ri) = (
        MaxNorm::new(k),
        MaxNorm::new(k),
        MaxNorm::new(k),
        MaxNorm::new(k),
        MaxNorm::new(k),
        MaxNorm::new(k),
    );
    for i in 0..m {
        comm.matrix(&s.r0.commutator(&s.phi[i])?);
        r0.matrix(
            &s.covariant_endo(i, &s.r0)?
                .checked_add(&s.phi[i])?
                .checked_sub(&s.phi[i].commutator(&rinf)?)?,
        );
        ri.matrix(&s.covariant_endo(i, &rinf)?);
        for j in i + 1..m {
            curv.matrix(
                &s.omega[j]
                    .partial(i)?
                    .checked_sub(&s.omega[i].partial(j)?)?
                    .checked_add(&s.omega[i].commutator(&s.omega[j])?)?,
            );
            wedge.matrix(&s.phi[i].commutator(&s.phi[j])?);
            dphi.matrix(
                &s.covariant_endo(i, &s.phi[j])?
                    .checked_sub(&s.covariant_endo(j, &s.phi[i])?)?,
            );
        }
    }
    Ok(SaitoReport {
        curvature: curv.residual("connection_curvature"),
        phi_wedge_phi: wedge.residual("phi_wedge_phi"),
        r0_phi_commute: comm.residual("r0_phi_commute"),
        d_nabla_phi: dphi.residual("d_nabla_phi"),
        nabla_r0: r0.residual("nabla_r0"),
        nabla_rinf: ri.residual("nabla_rinf"),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaitoMetricReport {
    /// `∇g_V` for the constant frame metric: `Ω_i^T g + g Ω_i`.
    pub nabla_g: Residual,
    /// `R_∞ + R_∞*`.
    pub rinf_skew: Residual,
    /// `R_0 − R_0*`.
    pub r0_symmetric: Residual,
    /// `Φ_i − Φ_i*`.
    pub phi_symmetric: Residual,
}

impl Residuals for SaitoMetricReport {
    fn residuals(&self) -> Vec<Residual> {
        vec![
            self.nabla_g.clone(),
            self.rinf_skew.clone(),
            self.r0_symmetric.clone(),
            self.phi_symmetric.clone(),
        ]
    }
}

/// `g`-adjoint `A* = g^{-1} A^T g`.
fn adjoint(a: &JetMatrix, g: &JetMatrix, g_inv: &JetMatrix) -> Result<JetMatrix> {
    g_inv.checked_matmul(&a.transpose())?.checked_matmul(g)
}

pub fn check_saito_metric_axioms(s: &SaitoBundle) -> Result<SaitoMetricReport> {
    s.validate()?;
    let gv =
        s.gv.as_ref()
            .ok_or_else(|| Error::Shape("Saito bundle carries no metric".into()))?;
    let g = s.constant(gv);
    let g_inv = s.constant(&gv.clone().try_inverse().expect("validated metric"));
    let k = s.order();
    let mut ng = MaxNorm::new(k);
    for om in &s.omega {
        ng.matrix(
            &om.transpose()
                .checked_matmul(&g)?
                .checked_add(&g.checked_matmul(om)?)?,
        );
    }
    let rinf = s.constant(&s.rinf);
    let mut skew = MaxNorm::new(k);
    skew.matrix(&rinf.checked_add(&adjoint(&rinf, &g, &g_inv)?)?);
    let mut sym0 = MaxNorm::new(k);
    sym0.matrix(&s.r0.checked_sub(&adjoint(&s.r0, &g, &g_inv)?)?);
    let mut symp = MaxNorm::new(k);
    for p in &s.phi {
        symp.matrix(&p.checked_sub(&adjoint(p, &g, &g_inv)?)?);
    }
    Ok(SaitoMetricReport {
        nabla_g: ng.residual("nabla_g"),
        rinf_skew: skew.residual("rinf_skew"),
        r0_symmetric: sym0.residual("r0_symmetric"),
        phi_symmetric: symp.residual("phi_symmetric"),
    })
}
