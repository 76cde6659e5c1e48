use num_complex::Complex64;

use super::InvariantMetric;
use crate::error::{Error, Result};
use crate::jets::{Jet, JetVector};

/// Principal square root, normalized to argument in `(−π/2, π/2]`.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re == 0.0 && r.im < 0.0 {
        -r
    } else {
        r
    }
}

fn single_block(g: &InvariantMetric) -> Result<&[Jet]> {
    if g.blocks().len() != 1 {
        return Err(Error::Scope(format!(
            "expected a single block, found blocks {:?}",
            g.blocks()
        )));
    }
    Ok(g.eta(0))
}

/// The one-form `ψ` with `g(X, Y) = (ψ∘ψ)(X∘Y)` on a single block:
/// `ψ_{m−1} = √η_{m−1}` on the branch through `anchor` (principal root if
/// `None`), then `ψ_{m−2}, …, ψ_0` from
/// `Σ_{s+t = m−1+k} ψ_s ψ_t = η_k`, each step a division by `2ψ_{m−1}`.
pub fn psi_from_metric(g: &InvariantMetric, anchor: Option<Complex64>) -> Result<JetVector> {
    psi_from_eta(single_block(g)?, anchor)
}

pub(crate) fn psi_from_eta(eta: &[Jet], anchor: Option<Complex64>) -> Result<JetVector> {
    let m = eta.len();
    let top = &eta[m - 1];
    let top0 = top.constant_term();
    if top0.norm() <= 1e-14 {
        return Err(Error::DegenerateMetric(format!(
            "η_{} vanishes at the origin",
            m - 1
        )));
    }
    let anchor = anchor.unwrap_or_else(|| principal_sqrt(top0));
    let mut psi = vec![Jet::zero(top.num_vars(), top.order()); m];
    psi[m - 1] = top.sqrt(anchor)?;
    let half_inv = psi[m - 1].scale_real(2.0).invert()?;
    for k in (0..m - 1).rev() {
        let mut rhs = eta[k].clone();
        for s in k + 1..m - 1 {
            rhs -= &(&psi[s] * &psi[m - 1 + k - s]);
        }
        psi[k] = &rhs * &half_inv;
    }
    JetVector::new(psi)
}

/// `η_k = Σ_{s+t = m−1+k} ψ_s ψ_t`.
pub fn metric_from_psi(psi: &JetVector) -> Result<InvariantMetric> {
    let m = psi.len();
    let eta = (0..m)
        .map(|k| {
            let mut acc = Jet::zero(psi.num_vars(), psi.order());
            for s in k..m {
                acc += &(&psi[s] * &psi[m - 1 + k - s]);
            }
            acc
        })
        .collect();
    InvariantMetric::single_block(eta)
}

/// Product of one-forms on a block under `dt^i ∘ dt^j = dt^{i+j−(m−1)}`
/// (zero outside `0..m`), whose unit is `dt^{m−1}`.
pub fn oneform_product(a: &JetVector, b: &JetVector) -> Result<JetVector> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::Shape("one-forms of different length".into()));
    }
    let mut out = JetVector::zeros(m, a.num_vars(), a.order());
    for p in 0..m {
        let mut acc = Jet::zero(a.num_vars(), a.order());
        for s in p..m {
            acc += &a[s].checked_mul(&b[m - 1 + p - s])?;
        }
        out.set(p, acc);
    }
    Ok(out)
}

/// Inverse of `ψ` for the product of [`oneform_product`]:
/// `β_{m−1} ψ_{m−1} = 1` and `Σ_{r+s=k} β_s ψ_r = 0` for `m−1 ≤ k < 2(m−1)`,
/// solved for `β_{m−2}, …, β_0` in turn.
pub fn invert_oneform(psi: &JetVector) -> Result<JetVector> {
    let m = psi.len();
    let top = &psi[m - 1];
    if top.constant_term().norm() <= 1e-14 {
        return Err(Error::NotInvertible(format!(
            "ψ_{} vanishes at the origin",
            m - 1
        )));
    }
    let top_inv = top.invert()?;
    let mut beta = vec![Jet::zero(psi.num_vars(), psi.order()); m];
    beta[m - 1] = top_inv.clone();
    for p in (0..m - 1).rev() {
        let mut acc = Jet::zero(psi.num_vars(), psi.order());
        for s in p + 1..m {
            acc += &(&beta[s] * &psi[m - 1 + p - s]);
        }
        beta[p] = -&(&acc * &top_inv);
    }
    JetVector::new(beta)
}
