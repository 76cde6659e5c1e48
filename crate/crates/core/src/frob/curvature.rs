use crate::error::{Error, Result};
use crate::jets::{Jet, JetMatrix, JetVector};
use crate::report::{MaxNorm, Residual, Residuals};

/// Levi-Civita connection of a jet metric, through its Christoffel symbols
/// `Γ^l_{ij}` computed from the first-kind formula
/// `Γ_{kij} = ½(∂_i g_{jk} + ∂_j g_{ik} − ∂_k g_{ij})` and `g^{-1}`.
#[derive(Clone, Debug)]
pub struct LeviCivita {
    n: usize,
    christoffel: Vec<Jet>,
}

impl LeviCivita {
    pub fn new(gram: &JetMatrix) -> Result<LeviCivita> {
        if !gram.is_square() || gram.rows() != gram.num_vars() {
            return Err(Error::Shape(
                "metric must be an n×n matrix of jets in n variables".into(),
            ));
        }
        let n = gram.rows();
        let inv = gram
            .inverse()
            .map_err(|_| Error::DegenerateMetric("Gram matrix is singular at the origin".into()))?;
        let dg: Vec<JetMatrix> = (0..n).map(|k| gram.partial(k)).collect::<Result<_>>()?;
        let mut first = vec![Jet::zero(n, gram.order()); n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let s = &(dg[i].get(j, k) + dg[j].get(i, k)) - dg[k].get(i, j);
                    first[(k * n + i) * n + j] = s.scale_real(0.5);
                }
            }
        }
        let mut christoffel = vec![Jet::zero(n, gram.order()); n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Jet::zero(n, gram.order());
                    for k in 0..n {
                        acc += &(inv.get(l, k) * &first[(k * n + i) * n + j]);
                    }
                    christoffel[(l * n + i) * n + j] = acc;
                }
            }
        }
        Ok(LeviCivita { n, christoffel })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Γ^l_{ij}`.
    pub fn christoffel(&self, l: usize, i: usize, j: usize) -> &Jet {
        &self.christoffel[(l * self.n + i) * self.n + j]
    }

    /// `R^l_{ijk} = ∂_j Γ^l_{ik} − ∂_k Γ^l_{ij} + Γ^l_{jp} Γ^p_{ik} − Γ^l_{kp} Γ^p_{ij}`,
    /// flattened as `((l n + i) n + j) n + k`.
    pub fn riemann(&self) -> Result<Vec<Jet>> {
        let n = self.n;
        let g = |l, i, j| self.christoffel(l, i, j);
        let mut out = Vec::with_capacity(n * n * n * n);
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut r = g(l, i, k)
                            .partial(j)?
                            .checked_sub(&g(l, i, j).partial(k)?)?;
                        for p in 0..n {
                            r += &(g(l, j, p) * g(p, i, k));
                            r -= &(g(l, k, p) * g(p, i, j));
                        }
                        out.push(r);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(∇X)^l_i = ∂_i X^l + Γ^l_{ik} X^k`, entry `(l, i)`.
    pub fn covariant_derivative(&self, x: &JetVector) -> Result<JetMatrix> {
        let n = self.n;
        if x.len() != n {
            return Err(Error::Shape(
                "vector field does not match the metric".into(),
            ));
        }
        let mut out = JetMatrix::zeros(n, n, x.num_vars(), x.order());
        for l in 0..n {
            for i in 0..n {
                let mut acc = x[l].partial(i)?;
                for k in 0..n {
                    acc += &(self.christoffel(l, i, k) * &x[k]);
                }
                out.set(l, i, acc);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct CurvatureReport {
    pub connection: LeviCivita,
    pub curvature: Residual,
    pub unit_parallel: Residual,
    /// Order up to which the vanishing of the curvature is certified.
    pub certified_order: usize,
}

impl Residuals for CurvatureReport {
    fn residuals(&self) -> Vec<Residual> {
        vec![self.curvature.clone(), self.unit_parallel.clone()]
    }
}

/// Curvature of the Levi-Civita connection and `∇e`, as an independent
/// check of flatness and of flatness of the unit. With jets of order `K`
/// the Riemann tensor is trusted to order `K − 2`.
pub fn levi_civita_curvature(gram: &JetMatrix, unit: &JetVector) -> Result<CurvatureReport> {
    if gram.order() < 2 {
        return Err(Error::Shape(
            "curvature needs jets of order at least 2".into(),
        ));
    }
    let connection = LeviCivita::new(gram)?;
    let mut curv = MaxNorm::new(gram.order());
    for r in connection.riemann()? {
        curv.jet(&r);
    }
    let mut par = MaxNorm::new(gram.order());
    par.matrix(&connection.covariant_derivative(unit)?);
    Ok(CurvatureReport {
        connection,
        certified_order: curv.order,
        curvature: curv.residual("riemann"),
        unit_parallel: par.residual("unit_parallel"),
    })
}
