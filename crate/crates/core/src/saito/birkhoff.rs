use std::collections::BTreeMap;

use super::SaitoBundle;
use crate::error::{Error, Result};
use crate::jets::JetMatrix;
use crate::linalg::CMat;
use crate::report::{MaxNorm, Residual, Residuals};

/// Meromorphic connection on the trivial rank-`n` bundle over `M × D` with
/// connection form `Ω = (B_0/τ + B_∞) dτ/τ + Σ_i C_i dx^i / τ`.
#[derive(Clone, Debug)]
pub struct BirkhoffConnection {
    pub b0: JetMatrix,
    pub binf: CMat,
    pub c: Vec<JetMatrix>,
}

impl BirkhoffConnection {
    pub fn new(b0: JetMatrix, binf: CMat, c: Vec<JetMatrix>) -> Result<BirkhoffConnection> {
        let b = BirkhoffConnection { b0, binf, c };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.b0.rows();
        let m = self.c.len();
        let ok = |a: &JetMatrix| {
            a.rows() == n && a.cols() == n && a.num_vars() == m && a.order() == self.b0.order()
        };
        if m == 0 || !ok(&self.b0) || !self.c.iter().all(ok) || self.binf.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "Birkhoff data must be {n}×{n} matrices of jets in {m} variables"
            )));
        }
        Ok(())
    }

    pub fn base_dim(&self) -> usize {
        self.c.len()
    }

    pub fn rank(&self) -> usize {
        self.b0.rows()
    }

    pub fn order(&self) -> usize {
        self.b0.order()
    }
}

/// Finite Laurent series in `τ` with jet-matrix coefficients.
#[derive(Clone, Debug, Default)]
struct Laurent(BTreeMap<i32, JetMatrix>);

impl Laurent {
    fn term(p: i32, a: JetMatrix) -> Laurent {
        Laurent(BTreeMap::from([(p, a)]))
    }

    fn add(&self, other: &Laurent, sign: f64) -> Result<Laurent> {
        let mut out = self.0.clone();
        for (&p, a) in &other.0 {
            let a = a.scale_real(sign);
            let v = match out.remove(&p) {
                Some(b) => b.checked_add(&a)?,
                None => a,
            };
            out.insert(p, v);
        }
        Ok(Laurent(out))
    }

    fn mul(&self, other: &Laurent) -> Result<Laurent> {
        let mut out = Laurent::default();
        for (&p, a) in &self.0 {
            for (&q, b) in &other.0 {
                out = out.add(&Laurent::term(p + q, a.checked_matmul(b)?), 1.0)?;
            }
        }
        Ok(out)
    }

    fn commutator(&self, other: &Laurent) -> Result<Laurent> {
        self.mul(other)?.add(&other.mul(self)?, -1.0)
    }

    fn d_tau(&self) -> Laurent {
        Laurent(
            self.0
                .iter()
                .filter(|(&p, _)| p != 0)
                .map(|(&p, a)| (p - 1, a.scale_real(p as f64)))
                .collect(),
        )
    }

    fn partial(&self, i: usize) -> Result<Laurent> {
        Ok(Laurent(
            self.0
                .iter()
                .map(|(&p, a)| Ok((p, a.partial(i)?)))
                .collect::<Result<_>>()?,
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffFlatness {
    /// `τ^{-2} dx^i∧dx^j`: `[C_i, C_j]`.
    pub c_commute: Residual,
    /// `τ^{-1} dx^i∧dx^j`: `∂_iC_j − ∂_jC_i`.
    pub c_closed: Residual,
    /// `τ^{-3} dτ∧dx^i`: `[B_0, C_i]`.
    pub b0_commute: Residual,
    /// `τ^{-2} dτ∧dx^i`: `−∂_iB_0 − C_i + [B_∞, C_i]`.
    pub b0_derivative: Residual,
    /// Every other power of `τ`, which vanishes identically.
    pub other: Residual,
}

impl Residuals for BirkhoffFlatness {
    fn residuals(&self) -> Vec<Residual> {
        vec![
            self.c_commute.clone(),
            self.c_closed.clone(),
            self.b0_commute.clone(),
            self.b0_derivative.clone(),
            self.other.clone(),
        ]
    }
}

/// Expands `dΩ + Ω∧Ω` in powers of `τ` and reports each coefficient of the
/// `dx∧dx` and `dτ∧dx` components.
pub fn birkhoff_flatness(b: &BirkhoffConnection) -> Result<BirkhoffFlatness> {
    b.validate()?;
    let m = b.base_dim();
    let k = b.order();
    let binf = JetMatrix::from_constant(&b.binf, m, k);
    let om_tau = Laurent::term(-2, b.b0.clone()).add(&Laurent::term(-1, binf), 1.0)?;
    let om: Vec<Laurent> = b.c.iter().map(|c| Laurent::term(-1, c.clone())).collect();

    let (mut cc, mut cl, mut bc, mut bd, mut other) = (
        MaxNorm::new(k),
        MaxNorm::new(k),
        MaxNorm::new(k),
        MaxNorm::new(k),
        MaxNorm::new(k),
    );
    let mut sort = |f: &Laurent, dx: bool| {
        for (&p, a) in &f.0 {
            match (dx, p) {
                (true, -2) => cc.matrix(a),
                (true, -1) => cl.matrix(a),
                (false, -3) => bc.matrix(a),
                (false, -2) => bd.matrix(a),
                _ => other.matrix(a),
            }
        }
    };
    for i in 0..m {
        // F_{τi} = ∂_τ Ω_i − ∂_i Ω_τ + [Ω_τ, Ω_i]
        let f = om[i]
            .d_tau()
            .add(&om_tau.partial(i)?, -1.0)?
            .add(&om_tau.commutator(&om[i])?, 1.0)?;
        sort(&f, false);
        for j in i + 1..m {
            let f = om[j]
                .partial(i)?
                .add(&om[i].partial(j)?, -1.0)?
                .add(&om[i].commutator(&om[j])?, 1.0)?;
            sort(&f, true);
        }
    }
    Ok(BirkhoffFlatness {
        c_commute: cc.residual("c_commute"),
        c_closed: cl.residual("c_closed"),
        b0_commute: bc.residual("b0_commute"),
        b0_derivative: bd.residual("b0_derivative"),
        other: other.residual("other_powers"),
    })
}

/// Saito bundle `(V, d, C, B_0, −B_∞)` of a Birkhoff connection.
pub fn birkhoff_to_saito(b: &BirkhoffConnection) -> Result<SaitoBundle> {
    b.validate()?;
    SaitoBundle::flat(b.c.clone(), b.b0.clone(), -b.binf.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Jet;
    use crate::linalg::{c64, cmat};
    use crate::saito::check_saito_axioms;

    #[test]
    fn trivial_deformation() {
        let b0 = JetMatrix::from_constant(&cmat(2, 2, &[0.0, 1.0, 2.0, 0.0]), 1, 3);
        let c = vec![JetMatrix::zeros(2, 2, 1, 3)];
        let b = BirkhoffConnection::new(b0, cmat(2, 2, &[1.0, 3.0, 0.0, 2.0]), c).unwrap();
        let r = birkhoff_flatness(&b).unwrap();
        assert!(r.passes(0.0), "{r:?}");
    }

    /// `B_0 = diag(x, x + 1)`, `C = −Id`, any diagonal `B_∞`: flat.
    fn diagonal_example(k: usize) -> BirkhoffConnection {
        let x = Jet::var(1, k, 0).unwrap();
        let b0 = JetMatrix::from_fn(2, 2, |i, j| {
            if i != j {
                Jet::zero(1, k)
            } else {
                x.add_constant(c64(i as f64, 0.0))
            }
        })
        .unwrap();
        let c = vec![JetMatrix::identity(2, 1, k).scale_real(-1.0)];
        BirkhoffConnection::new(b0, cmat(2, 2, &[0.5, 0.0, 0.0, -0.5]), c).unwrap()
    }

    #[test]
    fn flat_example_and_saito_agree() {
        let b = diagonal_example(3);
        assert!(birkhoff_flatness(&b).unwrap().passes(0.0));
        let s = birkhoff_to_saito(&b).unwrap();
        assert_eq!(s.rinf, -b.binf.clone());
        assert!(check_saito_axioms(&s).unwrap().passes(0.0));
    }

    #[test]
    fn components_match_hand_expansion() {
        let mut b = diagonal_example(3);
        b.binf = cmat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let r = birkhoff_flatness(&b).unwrap();
        // [B_∞, C] = 0 still, but B_∞ now is nilpotent: −∂B_0 − C + [B_∞, C] = 0
        assert!(r.passes(0.0));
        b.c[0] = b.c[0]
            .checked_add(&JetMatrix::from_constant(
                &cmat(2, 2, &[0.0, 1.0, 0.0, 0.0]),
                1,
                3,
            ))
            .unwrap();
        let r = birkhoff_flatness(&b).unwrap();
        assert!(r.b0_commute.value > 0.5);
        let s = check_saito_axioms(&birkhoff_to_saito(&b).unwrap()).unwrap();
        assert_eq!(s.r0_phi_commute.value, r.b0_commute.value);
        assert_eq!(s.nabla_r0.value, r.b0_derivative.value);
        assert_eq!(r.other.value, 0.0);
    }

    #[test]
    fn non_commuting_cs() {
        let k = 2;
        let b0 = JetMatrix::zeros(2, 2, 2, k);
        let c = vec![
            JetMatrix::from_constant(&cmat(2, 2, &[0.0, 1.0, 0.0, 0.0]), 2, k),
            JetMatrix::from_constant(&cmat(2, 2, &[0.0, 0.0, 1.0, 0.0]), 2, k),
        ];
        let b = BirkhoffConnection::new(b0, CMat::zeros(2, 2), c).unwrap();
        assert!(birkhoff_flatness(&b).unwrap().c_commute.value > 0.5);
    }
}
