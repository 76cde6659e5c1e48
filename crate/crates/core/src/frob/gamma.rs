use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fman::FManifoldModel;
use crate::jets::{Jet, JetMatrix, JetVector};
use crate::linalg::{CMat, CVec};
use crate::report::{MaxNorm, Residual, Residuals};

/// Constant commutative algebra `c_{ij}^t` on `TN` together with a constant
/// invariant metric `ε` and the unit. The algebra acts on the variables
/// `t^{offset}, …, t^{offset+m−1}` of the jets it is applied to.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantAlgebra {
    mult: Vec<CMat>,
    eps: CMat,
    eps_inv: CMat,
    unit: CVec,
    offset: usize,
}

impl ConstantAlgebra {
    /// `structure[i][j][t] = c_{ij}^t`.
    pub fn new(
        structure: &[Vec<Vec<Complex64>>],
        eps: CMat,
        unit: CVec,
    ) -> Result<ConstantAlgebra> {
        let m = structure.len();
        if m == 0
            || eps.shape() != (m, m)
            || unit.len() != m
            || structure
                .iter()
                .any(|r| r.len() != m || r.iter().any(|c| c.len() != m))
        {
            return Err(Error::Shape("inconsistent algebra dimensions".into()));
        }
        if (&eps - eps.transpose()).iter().any(|c| c.norm() > 1e-14) {
            return Err(Error::Shape("ε must be symmetric".into()));
        }
        let eps_inv = eps
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateMetric("ε is singular".into()))?;
        let mult = (0..m)
            .map(|i| CMat::from_fn(m, m, |t, j| structure[i][j][t]))
            .collect();
        Ok(ConstantAlgebra {
            mult,
            eps,
            eps_inv,
            unit,
            offset: 0,
        })
    }

    /// Standard block `∂_i ∘ ∂_j = ∂_{i+j}` with the anti-diagonal `ε`.
    pub fn standard_block(m: usize) -> ConstantAlgebra {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let structure: Vec<Vec<Vec<Complex64>>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        (0..m)
                            .map(|t| if t == i + j { one } else { zero })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let eps = CMat::from_fn(m, m, |i, j| if i + j == m - 1 { one } else { zero });
        let unit = CVec::from_fn(m, |i, _| if i == 0 { one } else { zero });
        ConstantAlgebra::new(&structure, eps, unit).expect("standard block is well formed")
    }

    /// Product of standard blocks of the given sizes, with the block-diagonal
    /// anti-diagonal `ε` and unit `Σ_α ∂_{0(α)}`.
    pub fn standard_blocks(blocks: &[usize]) -> Result<ConstantAlgebra> {
        let n: usize = blocks.iter().sum();
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::Shape("block sizes must be positive".into()));
        }
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut structure = vec![vec![vec![zero; n]; n]; n];
        let mut eps = CMat::zeros(n, n);
        let mut unit = CVec::zeros(n);
        let mut off = 0;
        for &m in blocks {
            unit[off] = one;
            for i in 0..m {
                eps[(off + i, off + m - 1 - i)] = one;
                for j in 0..m - i {
                    structure[off + i][off + j][off + i + j] = one;
                }
            }
            off += m;
        }
        ConstantAlgebra::new(&structure, eps, unit)
    }

    /// Algebra of a model with constant structure constants and constant unit.
    pub fn from_model(model: &FManifoldModel, eps: CMat) -> Result<ConstantAlgebra> {
        let c = model
            .constant_structure()
            .ok_or_else(|| Error::Scope("multiplication is not constant".into()))?;
        if model.unit().iter().any(|u| !u.is_constant()) {
            return Err(Error::Scope("unit field is not constant".into()));
        }
        ConstantAlgebra::new(&c, eps, model.unit().constant_part())
    }

    pub fn at_offset(mut self, offset: usize) -> ConstantAlgebra {
        self.offset = offset;
        self
    }

    pub fn dim(&self) -> usize {
        self.mult.len()
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Matrix of `∂_i ∘`, with entry `(t, j)` equal to `c_{ij}^t`.
    pub fn mult(&self, i: usize) -> &CMat {
        &self.mult[i]
    }

    pub fn eps(&self) -> &CMat {
        &self.eps
    }

    pub fn eps_inv(&self) -> &CMat {
        &self.eps_inv
    }

    pub fn unit(&self) -> &CVec {
        &self.unit
    }

    /// Largest `ε(∂_i∘∂_j, ∂_k) − ε(∂_i, ∂_j∘∂_k)`.
    pub fn invariance_residual(&self) -> f64 {
        let m = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let mut d = Complex64::new(0.0, 0.0);
                    for t in 0..m {
                        d += self.mult[i][(t, j)] * self.eps[(t, k)]
                            - self.mult[j][(t, k)] * self.eps[(i, t)];
                    }
                    worst = worst.max(d.norm());
                }
            }
        }
        worst
    }

    fn check_len(&self, v: &JetVector) -> Result<()> {
        if v.len() != self.dim() || v.num_vars() < self.offset + self.dim() {
            return Err(Error::Shape(format!(
                "field of length {} in {} variables for an algebra of dimension {} at offset {}",
                v.len(),
                v.num_vars(),
                self.dim(),
                self.offset
            )));
        }
        Ok(())
    }

    fn constant(&self, a: &CMat, like: &Jet) -> JetMatrix {
        JetMatrix::from_constant(a, like.num_vars(), like.order())
    }

    fn d(&self, f: &Jet, k: usize) -> Result<Jet> {
        f.partial(self.offset + k)
    }

    /// The `ε`-dual vector field `ε^{-1}(ψ)`.
    pub fn raise(&self, psi: &JetVector) -> Result<JetVector> {
        self.check_len(psi)?;
        self.constant(&self.eps_inv, &psi[0]).mul_vec(psi)
    }

    pub fn lower(&self, x: &JetVector) -> Result<JetVector> {
        self.check_len(x)?;
        self.constant(&self.eps, &x[0]).mul_vec(x)
    }

    /// Matrix of `X ∘` for a vector field `X`.
    pub fn multiplication_matrix(&self, x: &JetVector) -> Result<JetMatrix> {
        self.check_len(x)?;
        let mut out = JetMatrix::zeros(self.dim(), self.dim(), x.num_vars(), x.order());
        for (k, xk) in x.iter().enumerate() {
            out = out.checked_add(&self.constant(&self.mult[k], xk).mul_jet(xk))?;
        }
        Ok(out)
    }

    /// Inverse of a vector field for `∘`.
    pub fn field_inverse(&self, x: &JetVector) -> Result<JetVector> {
        let mx = self.multiplication_matrix(x)?;
        let e = JetVector::from_constant(self.unit.as_slice(), x.num_vars(), x.order());
        mx.solve_vec(&e).map_err(|_| {
            Error::NotInvertible("vector field is not invertible at the origin".into())
        })
    }

    /// Inverse of a one-form for the product transported by `ε`:
    /// `β = ε(T^{-1})` with `T = ε^{-1}(ψ)`.
    pub fn oneform_inverse(&self, psi: &JetVector) -> Result<JetVector> {
        let t = self.raise(psi)?;
        self.lower(&self.field_inverse(&t)?)
    }

    /// `ε(ψ, ψ) = ψ_i ε^{ij} ψ_j`.
    pub fn norm(&self, psi: &JetVector) -> Result<Jet> {
        let t = self.raise(psi)?;
        let mut acc = Jet::zero(psi.num_vars(), psi.order());
        for (a, b) in psi.iter().zip(t.iter()) {
            acc += &(a * b);
        }
        Ok(acc)
    }
}

/// `γ = ∂_k(ψ_j) β_s ε^{ik} ε^{sf} c_{if}^t dt^j ⊗ ∂_t`, returned as the
/// matrix whose column `j` holds the components of `γ(∂_j)`.
pub fn gamma_operator(
    psi: &JetVector,
    beta: &JetVector,
    alg: &ConstantAlgebra,
) -> Result<JetMatrix> {
    alg.check_len(psi)?;
    alg.check_len(beta)?;
    let m = alg.dim();
    let w = alg.raise(beta)?;
    let mut gamma = JetMatrix::zeros(m, m, psi.num_vars(), psi.order());
    for j in 0..m {
        let dpsi: Vec<Jet> = (0..m).map(|k| alg.d(&psi[j], k)).collect::<Result<_>>()?;
        let v = alg
            .constant(&alg.eps_inv, &psi[0])
            .mul_vec(&JetVector::new(dpsi)?)?;
        for i in 0..m {
            for f in 0..m {
                let p = &v[i] * &w[f];
                for t in 0..m {
                    let c = alg.mult[i][(t, f)];
                    if c.norm() != 0.0 {
                        let updated = gamma.get(t, j) + &p.scale(c);
                        gamma.set(t, j, updated);
                    }
                }
            }
        }
    }
    Ok(gamma)
}

/// [`gamma_single_block`] summed over a product of standard blocks in
/// variables `0..n`: block `α` contributes `Σ_{i≤s} β_{s(α)}
/// ∂_{(m_α−1−i)(α)}(ψ_j) ∂_{(m_α−1+i−s)(α)} ⊗ dt^j` for every `j`, so `γ`
/// couples the blocks through the derivatives of `ψ`.
pub fn gamma_standard_blocks(
    psi: &JetVector,
    beta: &JetVector,
    blocks: &[usize],
) -> Result<JetMatrix> {
    let n: usize = blocks.iter().sum();
    if psi.len() != n || beta.len() != n || psi.num_vars() < n {
        return Err(Error::Shape("ψ and β do not fit the blocks".into()));
    }
    let mut gamma = JetMatrix::zeros(n, n, psi.num_vars(), psi.order());
    let mut off = 0;
    for &m in blocks {
        for j in 0..n {
            for i in 0..m {
                let d = psi[j].partial(off + m - 1 - i)?;
                for s in i..m {
                    let t = off + m - 1 + i - s;
                    let updated = gamma.get(t, j) + &(&beta[off + s] * &d);
                    gamma.set(t, j, updated);
                }
            }
        }
        off += m;
    }
    Ok(gamma)
}

/// Standard-block form `γ = Σ_j Σ_{i≤s} β_s ∂_{m−1−i}(ψ_j) ∂_{m−1+i−s} ⊗ dt^j`
/// for the block in variables `offset..offset+m`.
pub fn gamma_single_block(psi: &JetVector, beta: &JetVector, offset: usize) -> Result<JetMatrix> {
    let m = psi.len();
    if beta.len() != m || psi.num_vars() < offset + m {
        return Err(Error::Shape("ψ and β do not fit the block".into()));
    }
    let mut gamma = JetMatrix::zeros(m, m, psi.num_vars(), psi.order());
    for j in 0..m {
        for i in 0..m {
            let d = psi[j].partial(offset + m - 1 - i)?;
            for s in i..m {
                let t = m - 1 + i - s;
                let updated = gamma.get(t, j) + &(&beta[s] * &d);
                gamma.set(t, j, updated);
            }
        }
    }
    Ok(gamma)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaReport {
    /// `γ^T ε − ε γ`.
    pub epsilon_symmetry: Residual,
    /// All first partials of `ε(ψ, ψ)`.
    pub psi_norm_constant: Residual,
    /// `∂_i ψ_j − (ψ [C_i, γ])_j`.
    pub psi_derivative_law: Residual,
    /// `γ(T) − ½ ε^{-1}(dt^i)(ε(ψ,ψ)) ∂_i ∘ T^{-1}` with `T = ε^{-1}(ψ)`;
    /// an identity for every invertible `ψ`.
    pub gamma_t_law: Residual,
}

impl Residuals for GammaReport {
    fn residuals(&self) -> Vec<Residual> {
        vec![
            self.epsilon_symmetry.clone(),
            self.psi_norm_constant.clone(),
            self.psi_derivative_law.clone(),
            self.gamma_t_law.clone(),
        ]
    }
}

pub fn check_gamma(
    gamma: &JetMatrix,
    alg: &ConstantAlgebra,
    psi: &JetVector,
) -> Result<GammaReport> {
    alg.check_len(psi)?;
    let m = alg.dim();
    let order = psi.order();
    let eps = alg.constant(&alg.eps, &psi[0]);

    let mut sym = MaxNorm::new(order);
    sym.matrix(
        &gamma
            .transpose()
            .checked_matmul(&eps)?
            .checked_sub(&eps.checked_matmul(gamma)?)?,
    );

    let norm = alg.norm(psi)?;
    let mut nc = MaxNorm::new(order);
    for k in 0..psi.num_vars() {
        nc.jet(&norm.partial(k)?);
    }

    let mut nec = MaxNorm::new(order);
    let cs: Vec<JetMatrix> = (0..m)
        .map(|i| alg.constant(&alg.mult[i], &psi[0]))
        .collect();
    for (i, ci) in cs.iter().enumerate() {
        let comm = ci.commutator(gamma)?;
        for j in 0..m {
            let mut rhs = Jet::zero(psi.num_vars(), order);
            for t in 0..m {
                rhs += &(&psi[t] * comm.get(t, j));
            }
            nec.jet(&alg.d(&psi[j], i)?.checked_sub(&rhs)?);
        }
    }

    let t = alg.raise(psi)?;
    let t_inv = alg.field_inverse(&t)?;
    let dn: Vec<Jet> = (0..m).map(|k| alg.d(&norm, k)).collect::<Result<_>>()?;
    let grad = alg
        .constant(&alg.eps_inv, &psi[0])
        .mul_vec(&JetVector::new(dn)?)?;
    let mut rhs = JetVector::zeros(m, psi.num_vars(), order);
    for (i, ci) in cs.iter().enumerate() {
        rhs = rhs.checked_add(&ci.mul_vec(&t_inv)?.mul_jet(&grad[i]))?;
    }
    let mut law = MaxNorm::new(order);
    law.vector(&gamma.mul_vec(&t)?.checked_sub(&rhs.scale_real(0.5))?);

    Ok(GammaReport {
        epsilon_symmetry: sym.residual("epsilon_symmetry"),
        psi_norm_constant: nc.residual("psi_norm_constant"),
        psi_derivative_law: nec.residual("psi_derivative_law"),
        gamma_t_law: law.residual("gamma_t_law"),
    })
}

/// Residuals `[C_i, ∂_j γ] − [C_j, ∂_i γ] + [[C_i, γ], [C_j, γ]]` for all
/// ordered pairs; entry `(j, i)` is computed separately and is the exact
/// negative of `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DarbouxEgoroffTable {
    m: usize,
    entries: Vec<JetMatrix>,
}

impl DarbouxEgoroffTable {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &JetMatrix {
        &self.entries[i * self.m + j]
    }

    pub fn pair_residual(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).residual_norm()
    }
}

impl Residuals for DarbouxEgoroffTable {
    fn residuals(&self) -> Vec<Residual> {
        let mut out = Vec::new();
        for i in 0..self.m {
            for j in i + 1..self.m {
                let e = self.get(i, j);
                out.push(Residual::new(
                    format!("darboux_egoroff_{i}_{j}"),
                    e.residual_norm(),
                    e.min_valid_order(),
                ));
            }
        }
        out
    }
}

pub fn darboux_egoroff_residual(
    gamma: &JetMatrix,
    alg: &ConstantAlgebra,
) -> Result<DarbouxEgoroffTable> {
    let m = alg.dim();
    if gamma.rows() != m || gamma.cols() != m {
        return Err(Error::Shape("γ does not match the algebra".into()));
    }
    let like = gamma.get(0, 0);
    let cs: Vec<JetMatrix> = (0..m).map(|i| alg.constant(&alg.mult[i], like)).collect();
    let dg: Vec<JetMatrix> = (0..m)
        .map(|k| gamma.partial(alg.offset + k))
        .collect::<Result<_>>()?;
    let cg: Vec<JetMatrix> = cs
        .iter()
        .map(|c| c.commutator(gamma))
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let e = cs[i]
                .commutator(&dg[j])?
                .checked_sub(&cs[j].commutator(&dg[i])?)?
                .checked_add(&cg[i].commutator(&cg[j])?)?;
            entries.push(e);
        }
    }
    Ok(DarbouxEgoroffTable { m, entries })
}
