use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jets::{Jet, JetMatrix, JetVector};
use crate::report::{MaxNorm, Residual};

/// Multiplication-invariant metric on a product of standard blocks, stored
/// through its generating functions: on block `α` of size `m_α`,
/// `g(∂_{i(α)}, ∂_{j(α)}) = η_{(i+j)(α)}` with `η_k = 0` for `k ≥ m_α`, and
/// different blocks are orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantMetric {
    blocks: Vec<usize>,
    eta: Vec<Vec<Jet>>,
}

impl InvariantMetric {
    pub fn new(blocks: Vec<usize>, eta: Vec<Vec<Jet>>) -> Result<InvariantMetric> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::Shape("block sizes must be positive".into()));
        }
        if eta.len() != blocks.len() {
            return Err(Error::Shape(format!(
                "{} blocks but {} lists of η",
                blocks.len(),
                eta.len()
            )));
        }
        let n: usize = blocks.iter().sum();
        let first = &eta[0][0];
        for (a, (&m, e)) in blocks.iter().zip(&eta).enumerate() {
            if e.len() != m {
                return Err(Error::Shape(format!(
                    "block {a} has size {m} but {} functions η",
                    e.len()
                )));
            }
            if let Some(bad) = e.iter().find(|j| j.num_vars() != n || !j.same_shape(first)) {
                return Err(Error::Shape(format!(
                    "η jets must live in {n} variables at a common order (found {} variables, order {})",
                    bad.num_vars(),
                    bad.order()
                )));
            }
        }
        Ok(InvariantMetric { blocks, eta })
    }

    /// Metric on a single block.
    pub fn single_block(eta: Vec<Jet>) -> Result<InvariantMetric> {
        InvariantMetric::new(vec![eta.len()], vec![eta])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn eta(&self, block: usize) -> &[Jet] {
        &self.eta[block]
    }

    pub fn num_vars(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn order(&self) -> usize {
        self.eta[0][0].order()
    }

    /// Index of the first variable of every block.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, &m| {
                let o = *acc;
                *acc += m;
                Some(o)
            })
            .collect()
    }

    /// `η` of the coordinate covector `dt^a`, with `a` a global index.
    pub fn coidentity(&self) -> Vec<Jet> {
        self.eta.iter().flatten().cloned().collect()
    }

    pub fn gram(&self) -> JetMatrix {
        let (n, k) = (self.num_vars(), self.order());
        let mut g = JetMatrix::zeros(n, n, n, k);
        for ((&m, e), off) in self.blocks.iter().zip(&self.eta).zip(self.offsets()) {
            for i in 0..m {
                for j in 0..m - i {
                    g.set(off + i, off + j, e[i + j].clone());
                }
            }
        }
        g
    }

    /// Blocks whose top function `η_{m−1}` vanishes at the origin.
    pub fn degenerate_blocks(&self) -> Vec<usize> {
        self.eta
            .iter()
            .enumerate()
            .filter(|(_, e)| e.last().expect("non-empty block").constant_term().norm() <= 1e-14)
            .map(|(a, _)| a)
            .collect()
    }

    pub fn degeneracy_warning(&self) -> Option<String> {
        let bad = self.degenerate_blocks();
        (!bad.is_empty()).then(|| {
            format!("metric is degenerate at the origin: top η vanishes on blocks {bad:?}")
        })
    }

    pub fn to_order(&self, order: usize) -> InvariantMetric {
        InvariantMetric {
            blocks: self.blocks.clone(),
            eta: self
                .eta
                .iter()
                .map(|e| e.iter().map(|j| j.to_order(order)).collect())
                .collect(),
        }
    }
}

/// The constant anti-diagonal metric `ε(∂_i, ∂_j) = δ_{i+j, m−1}`.
pub fn epsilon_metric(m: usize, order: usize) -> InvariantMetric {
    assert!(m >= 1, "block size must be positive");
    let mut eta = vec![Jet::zero(m, order); m];
    eta[m - 1] = Jet::real(m, order, 1.0);
    InvariantMetric::single_block(eta).expect("well-formed block")
}

/// `η_{i(α)} = ∂_{i(α)} H`. A metric that is degenerate at the origin is
/// still returned; see [`InvariantMetric::degeneracy_warning`].
pub fn metric_from_potential(h: &Jet, blocks: &[usize]) -> Result<InvariantMetric> {
    let n: usize = blocks.iter().sum();
    if h.num_vars() != n {
        return Err(Error::Shape(format!(
            "potential in {} variables for blocks summing to {n}",
            h.num_vars()
        )));
    }
    let mut eta = Vec::with_capacity(blocks.len());
    let mut off = 0;
    for &m in blocks {
        eta.push(
            (off..off + m)
                .map(|a| h.partial(a))
                .collect::<Result<_>>()?,
        );
        off += m;
    }
    InvariantMetric::new(blocks.to_vec(), eta)
}

/// Closedness of `e♭ = Σ η_{i(α)} dt^{i(α)}`: the largest
/// `∂_b η_a − ∂_a η_b` over global index pairs.
pub fn check_coidentity_closed(g: &InvariantMetric) -> Result<Residual> {
    let eta = g.coidentity();
    let mut r = MaxNorm::new(g.order());
    for a in 0..eta.len() {
        for b in a + 1..eta.len() {
            r.jet(&eta[a].partial(b)?.checked_sub(&eta[b].partial(a)?)?);
        }
    }
    Ok(r.residual("coidentity_closedness"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitFlatReport {
    pub closedness: Residual,
    /// Largest `e(η_{i(α)})` with `e = Σ_α ∂_{0(α)}`.
    pub unit_derivative: Residual,
}

impl crate::report::Residuals for UnitFlatReport {
    fn residuals(&self) -> Vec<Residual> {
        vec![self.closedness.clone(), self.unit_derivative.clone()]
    }
}

pub fn check_unit_flat(g: &InvariantMetric) -> Result<UnitFlatReport> {
    let closedness = check_coidentity_closed(g)?;
    let offsets = g.offsets();
    let mut r = MaxNorm::new(g.order());
    for f in g.coidentity() {
        let mut d = Jet::zero(f.num_vars(), f.order());
        for &o in &offsets {
            d += &f.partial(o)?;
        }
        r.jet(&d);
    }
    Ok(UnitFlatReport {
        closedness,
        unit_derivative: r.residual("unit_derivative"),
    })
}

fn euler_defects(g: &InvariantMetric, euler: &JetVector) -> Result<Vec<(Jet, Jet)>> {
    if euler.len() != g.num_vars() || euler.num_vars() != g.num_vars() {
        return Err(Error::Shape("Euler field does not match the metric".into()));
    }
    g.coidentity()
        .into_iter()
        .map(|f| Ok((euler.derivative(&f)?, f)))
        .collect()
}

/// Largest `E(η_{i(α)}) − (D − 2) η_{i(α)}`.
pub fn check_euler_rescaling(
    g: &InvariantMetric,
    euler: &JetVector,
    d: Complex64,
) -> Result<Residual> {
    let mut r = MaxNorm::new(g.order());
    for (ef, f) in euler_defects(g, euler)? {
        r.jet(&ef.checked_sub(&f.scale(d - 2.0))?);
    }
    Ok(r.residual("euler_rescaling"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EulerFit {
    pub d: Complex64,
    pub residual: Residual,
}

/// Least-squares `D` for `E(η) = (D − 2) η` over the trusted coefficients
/// of all `η`, and the residual at that `D`.
pub fn solve_euler_rescaling(g: &InvariantMetric, euler: &JetVector) -> Result<EulerFit> {
    let pairs = euler_defects(g, euler)?;
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for (ef, f) in &pairs {
        // both sums over the same trusted range
        let f = f
            .clone()
            .with_valid_order(ef.valid_order().min(f.valid_order()));
        num += f.inner(ef);
        den += f.inner(&f).re;
    }
    if den == 0.0 {
        return Err(Error::DegenerateMetric("all η vanish".into()));
    }
    let d = num / den + 2.0;
    Ok(EulerFit {
        d,
        residual: check_euler_rescaling(g, euler, d)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fman::standard_block;
    use crate::linalg::c64;
    use crate::report::Residuals;

    fn var(n: usize, k: usize, i: usize) -> Jet {
        Jet::var(n, k, i).unwrap()
    }

    #[test]
    fn epsilon_grams() {
        let g = epsilon_metric(2, 3).gram().constant_part();
        assert_eq!(g[(0, 1)], c64(1.0, 0.0));
        assert_eq!(g[(1, 0)], c64(1.0, 0.0));
        assert_eq!(g[(0, 0)], c64(0.0, 0.0));
        assert_eq!(g[(1, 1)], c64(0.0, 0.0));
        assert_eq!(
            epsilon_metric(1, 3).gram().constant_part()[(0, 0)],
            c64(1.0, 0.0)
        );
    }

    #[test]
    fn epsilon_is_invariant_on_a_block() {
        // g(X∘Y, Z) = g(X, Y∘Z) on coordinate fields
        let m = 3;
        let block = standard_block(c64(0.0, 0.0), m, 2);
        let g = epsilon_metric(m, 2).gram();
        let pair = |x: &JetVector, y: &JetVector| {
            let mut acc = Jet::zero(m, 2);
            for i in 0..m {
                for j in 0..m {
                    acc += &(&(&x[i] * &y[j]) * g.get(i, j));
                }
            }
            acc
        };
        let d: Vec<_> = (0..m).map(|i| block.coordinate_field(i)).collect();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let lhs = pair(&block.product(&d[a], &d[b]).unwrap(), &d[c]);
                    let rhs = pair(&d[a], &block.product(&d[b], &d[c]).unwrap());
                    assert_eq!((&lhs - &rhs).max_abs(), 0.0);
                }
            }
        }
    }

    #[test]
    fn potentials() {
        let (t0, t1) = (var(2, 3, 0), var(2, 3, 1));
        let g = metric_from_potential(&(&t0 * &t1), &[2]).unwrap();
        assert!(g.degeneracy_warning().is_some());
        assert_eq!(g.eta(0), &[t1.clone(), t0.clone()]);

        let g = metric_from_potential(&(&(&t0 * &t1) + &t0), &[2]).unwrap();
        assert_eq!(g.eta(0)[0], t1.add_constant(c64(1.0, 0.0)));
        assert_eq!(g.eta(0)[1], t0);
        // η_1 = t0 vanishes at the origin too
        assert!(g.degeneracy_warning().is_some());
        assert_eq!(check_coidentity_closed(&g).unwrap().value, 0.0);

        let g = metric_from_potential(&var(1, 3, 0), &[1]).unwrap();
        assert_eq!(g.eta(0)[0], Jet::real(1, 3, 1.0));
    }

    #[test]
    fn closedness_and_unit() {
        let t1 = var(2, 3, 1);
        let g = InvariantMetric::single_block(vec![t1.clone(), Jet::real(2, 3, 1.0)]).unwrap();
        assert_eq!(check_coidentity_closed(&g).unwrap().value, 1.0);

        // η = (c, f(t1))
        let f = (&t1 * &t1).add_constant(c64(1.0, 0.0));
        let g = InvariantMetric::single_block(vec![Jet::real(2, 3, 0.7), f]).unwrap();
        assert!(check_unit_flat(&g).unwrap().passes(0.0));

        let g = InvariantMetric::single_block(vec![var(2, 3, 0), Jet::real(2, 3, 1.0)]).unwrap();
        assert_eq!(check_unit_flat(&g).unwrap().unit_derivative.value, 1.0);
        assert!(check_unit_flat(&epsilon_metric(3, 3)).unwrap().passes(0.0));
    }

    #[test]
    fn euler_rescaling() {
        let block = standard_block(c64(0.4, 0.0), 2, 4);
        let g = epsilon_metric(2, 4);
        let r = check_euler_rescaling(&g, block.euler(), c64(2.0, 0.0)).unwrap();
        assert_eq!(r.value, 0.0);
        let r = check_euler_rescaling(&g, block.euler(), c64(3.0, 0.0)).unwrap();
        assert_eq!(r.value, 1.0);
        let fit = solve_euler_rescaling(&g, block.euler()).unwrap();
        assert!((fit.d - 2.0).norm() < 1e-15);
    }

    #[test]
    fn scalar_rescaling_ode() {
        // m = 1: E = (t + a)∂, η = (t + a)^{D−2}
        let (a, d) = (c64(1.3, 0.2), c64(2.7, -0.4));
        let k = 6;
        let block = standard_block(a, 1, k);
        let base = var(1, k, 0).add_constant(a);
        let eta = base.powc(d - 2.0, ((d - 2.0) * a.ln()).exp()).unwrap();
        let g = InvariantMetric::single_block(vec![eta]).unwrap();
        let r = check_euler_rescaling(&g, block.euler(), d).unwrap();
        assert!(r.value < 1e-9, "{r:?}");
        let fit = solve_euler_rescaling(&g, block.euler()).unwrap();
        assert!((fit.d - d).norm() < 1e-9);
    }
}
