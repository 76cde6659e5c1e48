use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_complex::Complex64;

use super::layout::{layout, Layout};
use super::JetVector;
use crate::error::{Error, Result};

/// Truncated power series in `num_vars` variables, complete up to total
/// degree `order`, expanded at the origin.
///
/// Every jet also carries a *trusted order*: the largest degree up to which
/// its coefficients agree with the germ it represents. Differentiation
/// lowers it by one (the storage order stays fixed and the top degree is
/// padded with zeros); binary operations take the minimum of their inputs.
/// [`Jet::residual_norm`] only looks at trusted coefficients.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    coeffs: Vec<Complex64>,
    valid: usize,
}

impl Jet {
    pub fn zero(num_vars: usize, order: usize) -> Jet {
        let layout = layout(num_vars, order);
        let coeffs = vec![Complex64::new(0.0, 0.0); layout.len()];
        Jet {
            layout,
            coeffs,
            valid: order,
        }
    }

    pub fn constant(num_vars: usize, order: usize, c: Complex64) -> Jet {
        let mut j = Jet::zero(num_vars, order);
        j.coeffs[0] = c;
        j
    }

    pub fn real(num_vars: usize, order: usize, c: f64) -> Jet {
        Jet::constant(num_vars, order, Complex64::new(c, 0.0))
    }

    /// The coordinate function `t_i`.
    pub fn var(num_vars: usize, order: usize, i: usize) -> Result<Jet> {
        if i >= num_vars {
            return Err(Error::IndexOutOfRange {
                what: "jet variables",
                index: i,
                size: num_vars,
            });
        }
        let mut j = Jet::zero(num_vars, order);
        if order >= 1 {
            let mut e = vec![0u16; num_vars];
            e[i] = 1;
            let k = j.layout.index_of(&e).expect("degree-one monomial");
            j.coeffs[k] = Complex64::new(1.0, 0.0);
        }
        Ok(j)
    }

    /// Jet whose coefficient at every multi-index of degree `≤ order` is
    /// `f(multi-index)`, visited in graded-lex order.
    pub fn from_fn(num_vars: usize, order: usize, mut f: impl FnMut(&[usize]) -> Complex64) -> Jet {
        let mut j = Jet::zero(num_vars, order);
        let mut buf = vec![0usize; num_vars];
        for (k, e) in j.layout.exps.iter().enumerate() {
            for (b, &x) in buf.iter_mut().zip(e.iter()) {
                *b = x as usize;
            }
            j.coeffs[k] = f(&buf);
        }
        j
    }

    /// Builds a jet from `(multi-index, coefficient)` terms. Terms of total
    /// degree above `order` are dropped; repeated multi-indices accumulate.
    pub fn from_terms<I, E>(num_vars: usize, order: usize, terms: I) -> Result<Jet>
    where
        I: IntoIterator<Item = (E, Complex64)>,
        E: AsRef<[usize]>,
    {
        let mut j = Jet::zero(num_vars, order);
        for (exp, c) in terms {
            let exp = exp.as_ref();
            if exp.len() != num_vars {
                return Err(Error::Shape(format!(
                    "multi-index of length {} for a jet in {} variables",
                    exp.len(),
                    num_vars
                )));
            }
            if exp.iter().sum::<usize>() > order {
                continue;
            }
            let e: Vec<u16> = exp.iter().map(|&x| x as u16).collect();
            let k = j
                .layout
                .index_of(&e)
                .expect("multi-index of admissible degree");
            j.coeffs[k] += c;
        }
        Ok(j)
    }

    pub fn num_vars(&self) -> usize {
        self.layout.nvars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    /// Largest degree whose coefficients are trustworthy.
    pub fn valid_order(&self) -> usize {
        self.valid
    }

    pub fn is_order_reduced(&self) -> bool {
        self.valid < self.layout.order
    }

    /// Caps the trusted order (never raises it).
    pub fn with_valid_order(mut self, valid: usize) -> Jet {
        self.valid = self.valid.min(valid);
        self
    }

    pub fn same_shape(&self, other: &Jet) -> bool {
        self.layout.nvars == other.layout.nvars && self.layout.order == other.layout.order
    }

    fn check_shape(&self, other: &Jet) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "jets with (num_vars, order) = ({}, {}) and ({}, {})",
                self.num_vars(),
                self.order(),
                other.num_vars(),
                other.order()
            )))
        }
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn coeff(&self, exp: &[usize]) -> Complex64 {
        if exp.len() != self.num_vars() || exp.iter().sum::<usize>() > self.order() {
            return Complex64::new(0.0, 0.0);
        }
        let e: Vec<u16> = exp.iter().map(|&x| x as u16).collect();
        self.layout
            .index_of(&e)
            .map_or(Complex64::new(0.0, 0.0), |k| self.coeffs[k])
    }

    /// Non-zero terms in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        self.layout
            .exps
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(e, c)| (e.iter().map(|&x| x as usize).collect(), *c))
    }

    /// Raw coefficient slice, indexed by the graded-lex enumeration.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.norm() == 0.0)
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet> {
        self.check_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Jet) -> Result<Jet> {
        self.check_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(Complex64, Complex64) -> Complex64) -> Jet {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Jet {
            layout: self.layout.clone(),
            coeffs,
            valid: self.valid.min(other.valid),
        }
    }

    /// Cauchy product truncated at the storage order.
    pub fn checked_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_shape(other)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        for &(i, j, k) in &self.layout.mul_table {
            let a = self.coeffs[i as usize];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            out[k as usize] += a * other.coeffs[j as usize];
        }
        Ok(Jet {
            layout: self.layout.clone(),
            coeffs: out,
            valid: self.valid.min(other.valid),
        })
    }

    pub fn scale(&self, c: Complex64) -> Jet {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
            valid: self.valid,
        }
    }

    pub fn scale_real(&self, c: f64) -> Jet {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn add_constant(&self, c: Complex64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Formal partial derivative in `t_i`. The trusted order drops by one.
    pub fn partial(&self, i: usize) -> Result<Jet> {
        if i >= self.num_vars() {
            return Err(Error::IndexOutOfRange {
                what: "jet variables",
                index: i,
                size: self.num_vars(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        for &(src, dst, f) in &self.layout.partial[i] {
            out[dst as usize] += self.coeffs[src as usize] * f;
        }
        Ok(Jet {
            layout: self.layout.clone(),
            coeffs: out,
            valid: self.valid.saturating_sub(1),
        })
    }

    /// Antiderivative in `t_i` vanishing on `t_i = 0`, truncated at the
    /// storage order. The trusted order rises by one, up to the storage order.
    pub fn integrate(&self, i: usize) -> Result<Jet> {
        if i >= self.num_vars() {
            return Err(Error::IndexOutOfRange {
                what: "jet variables",
                index: i,
                size: self.num_vars(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        for &(src, dst, f) in &self.layout.integral[i] {
            out[dst as usize] += self.coeffs[src as usize] * f;
        }
        Ok(Jet {
            layout: self.layout.clone(),
            coeffs: out,
            valid: (self.valid + 1).min(self.order()),
        })
    }

    /// `f(a)` for `f(a(0) + x) = sum_k taylor[k] x^k`.
    fn apply_series(&self, taylor: &[Complex64]) -> Jet {
        let mut nil = self.clone();
        nil.coeffs[0] = Complex64::new(0.0, 0.0);
        let mut out = Jet::constant(self.num_vars(), self.order(), taylor[0]);
        out.valid = self.valid;
        let mut power = Jet::real(self.num_vars(), self.order(), 1.0);
        for &t in taylor.iter().skip(1) {
            power = &power * &nil;
            out += &power.scale(t);
        }
        out
    }

    /// Multiplicative inverse; requires a non-vanishing constant term.
    pub fn invert(&self) -> Result<Jet> {
        let a0 = self.constant_term();
        if a0.norm() <= f64::EPSILON * 16.0 {
            return Err(Error::Singular(format!(
                "cannot invert a jet with constant term {a0}"
            )));
        }
        let inv = a0.inv();
        let mut taylor = Vec::with_capacity(self.order() + 1);
        let mut t = inv;
        for _ in 0..=self.order() {
            taylor.push(t);
            t = -t * inv;
        }
        Ok(self.apply_series(&taylor))
    }

    /// Square root on the branch fixed by `anchor`, which must square to the
    /// constant term.
    pub fn sqrt(&self, anchor: Complex64) -> Result<Jet> {
        self.powc(Complex64::new(0.5, 0.0), anchor)
    }

    /// `a^p` on the branch whose constant term is `anchor`; `anchor` must be
    /// a value of `a(0)^p`, which is checked through `anchor^(1/p) ≈ a(0)`
    /// for `p = ±1/2` and through the principal logarithm otherwise.
    pub fn powc(&self, p: Complex64, anchor: Complex64) -> Result<Jet> {
        let a0 = self.constant_term();
        if a0.norm() <= f64::EPSILON * 16.0 {
            return Err(Error::Singular(format!(
                "power of a jet with constant term {a0}"
            )));
        }
        let scale = a0.norm().max(1.0);
        let consistent = if (p.re.abs() - 0.5).abs() < 1e-15 && p.im == 0.0 {
            let sq = if p.re > 0.0 {
                anchor * anchor
            } else {
                (anchor * anchor).inv()
            };
            (sq - a0).norm() <= 1e-8 * scale
        } else {
            let principal = (p * a0.ln()).exp();
            let ratio = anchor / principal;
            // any branch differs from the principal one by exp(2πik p)
            (ratio.norm() - 1.0).abs() <= 1e-8
        };
        if !consistent {
            return Err(Error::InvalidAnchor {
                anchor: anchor.to_string(),
                value: a0.to_string(),
            });
        }
        let inv = a0.inv();
        let mut taylor = Vec::with_capacity(self.order() + 1);
        let mut binom = Complex64::new(1.0, 0.0);
        let mut inv_pow = Complex64::new(1.0, 0.0);
        for k in 0..=self.order() {
            taylor.push(anchor * binom * inv_pow);
            binom = binom * (p - k as f64) / (k as f64 + 1.0);
            inv_pow *= inv;
        }
        Ok(self.apply_series(&taylor))
    }

    pub fn powi(&self, k: usize) -> Jet {
        let mut out = Jet::real(self.num_vars(), self.order(), 1.0);
        out.valid = self.valid;
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `a ∘ subs`: substitutes the components of `subs` for the variables of
    /// `a`. Constant terms of `subs` are substituted exactly, so `a` is read
    /// as a polynomial of degree `order`; the result lives in the variables
    /// of `subs`.
    pub fn compose(&self, subs: &JetVector) -> Result<Jet> {
        if subs.len() != self.num_vars() {
            return Err(Error::Shape(format!(
                "composition of a jet in {} variables with {} substitutions",
                self.num_vars(),
                subs.len()
            )));
        }
        let proto = &subs[0];
        let (nv, ord) = (proto.num_vars(), proto.order());
        let l = &self.layout;
        let mut values: Vec<Jet> = Vec::with_capacity(l.len());
        let mut out = Jet::zero(nv, ord);
        for (k, e) in l.exps.iter().enumerate() {
            let value = match e.iter().rposition(|&x| x > 0) {
                None => Jet::real(nv, ord, 1.0),
                Some(v) => {
                    let mut lower = e.clone();
                    lower[v] -= 1;
                    let prev = l.index_of(&lower).expect("lower monomial");
                    &values[prev] * &subs[v]
                }
            };
            let c = self.coeffs[k];
            if c.norm() != 0.0 {
                out += &value.scale(c);
            }
            values.push(value);
        }
        out.valid = out.valid.min(self.valid).min(subs.min_valid_order());
        Ok(out)
    }

    /// Copy with a different storage order: truncates, or pads with zeros
    /// (in which case the trusted order stays where it was).
    pub fn to_order(&self, order: usize) -> Jet {
        let target = layout(self.num_vars(), order);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); target.len()];
        let n = target.deg_start[order.min(self.order()) + 1];
        coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        Jet {
            layout: target,
            coeffs,
            valid: self.valid.min(order),
        }
    }

    /// Embeds a jet into a larger variable set, mapping variable `i` to
    /// `offset + i`.
    pub fn embed(&self, num_vars: usize, offset: usize) -> Result<Jet> {
        if offset + self.num_vars() > num_vars {
            return Err(Error::Shape(format!(
                "cannot embed {} variables at offset {} into {}",
                self.num_vars(),
                offset,
                num_vars
            )));
        }
        let mut out = Jet::zero(num_vars, self.order());
        for (k, e) in self.layout.exps.iter().enumerate() {
            let mut big = vec![0u16; num_vars];
            big[offset..offset + e.len()].copy_from_slice(e);
            let dst = out.layout.index_of(&big).expect("embedded monomial");
            out.coeffs[dst] = self.coeffs[k];
        }
        out.valid = self.valid;
        Ok(out)
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: usize) -> Jet {
        let mut out = Jet::zero(self.num_vars(), self.order());
        if d <= self.order() {
            let (s, e) = (self.layout.deg_start[d], self.layout.deg_start[d + 1]);
            out.coeffs[s..e].copy_from_slice(&self.coeffs[s..e]);
        }
        out.valid = self.valid;
        out
    }

    /// Drops all terms of degree above `d` (storage order unchanged).
    pub fn truncated_at(&self, d: usize) -> Jet {
        let mut out = self.clone();
        if d < self.order() {
            let s = self.layout.deg_start[d + 1];
            for c in &mut out.coeffs[s..] {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Uniform norm over the trusted coefficients.
    pub fn residual_norm(&self) -> f64 {
        let end = self.layout.deg_start[self.valid + 1];
        self.coeffs[..end]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Uniform norm over every stored coefficient, trusted or not.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Euclidean pairing of coefficient vectors over the trusted range:
    /// `sum conj(a_k) b_k`.
    pub fn inner(&self, other: &Jet) -> Complex64 {
        let v = self.valid.min(other.valid);
        let end = self.layout.deg_start[v + 1];
        self.coeffs[..end]
            .iter()
            .zip(&other.coeffs[..end])
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Value of the polynomial at a point (used for spot checks).
    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        self.layout
            .exps
            .iter()
            .zip(&self.coeffs)
            .map(|(e, &c)| {
                e.iter()
                    .zip(point)
                    .fold(c, |acc, (&k, &x)| acc * x.powu(k as u32))
            })
            .sum()
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Jet[m={}, K={}, valid={}](",
            self.num_vars(),
            self.order(),
            self.valid
        )?;
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i){:?}", c.re, c.im, e)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Jet) -> bool {
        self.same_shape(other) && self.coeffs == other.coeffs
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &'a Jet) -> Jet {
        self.checked_add(rhs).expect("jet shape mismatch in +")
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &'a Jet) -> Jet {
        self.checked_sub(rhs).expect("jet shape mismatch in -")
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &'a Jet) -> Jet {
        self.checked_mul(rhs).expect("jet shape mismatch in *")
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale_real(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        assert!(self.same_shape(rhs), "jet shape mismatch in +=");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.valid = self.valid.min(rhs.valid);
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        assert!(self.same_shape(rhs), "jet shape mismatch in -=");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self.valid = self.valid.min(rhs.valid);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn t(m: usize, k: usize, i: usize) -> Jet {
        Jet::var(m, k, i).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let one = Jet::real(1, 2, 1.0);
        let x = t(1, 2, 0);
        let p = &(&one + &x) * &(&one - &x);
        let expect = Jet::from_terms(1, 2, [([0], c(1.0)), ([2], c(-1.0))]).unwrap();
        assert_eq!(p, expect);
    }

    #[test]
    fn additive_identity() {
        let a = Jet::from_terms(2, 3, [([1, 2], c(2.0)), ([0, 0], c(-1.0))]).unwrap();
        assert_eq!(&a + &Jet::zero(2, 3), a);
    }

    #[test]
    fn product_truncates() {
        let p = &t(2, 1, 0) * &t(2, 1, 1);
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        assert!(matches!(
            Jet::zero(2, 3).checked_mul(&Jet::zero(2, 2)),
            Err(Error::Shape(_))
        ));
        assert!(Jet::zero(1, 3).checked_add(&Jet::zero(2, 3)).is_err());
    }

    #[test]
    fn partial_examples() {
        let x0x1 = &t(2, 3, 0) * &t(2, 3, 1);
        let d = x0x1.partial(0).unwrap();
        assert_eq!(d.coeffs(), t(2, 3, 1).coeffs());
        assert_eq!(d.valid_order(), 2);
        assert!(d.is_order_reduced());
        assert_eq!(Jet::real(2, 3, 5.0).partial(1).unwrap().max_abs(), 0.0);
        let p = Jet::from_terms(1, 3, [([2], c(1.0)), ([1], c(3.0))]).unwrap();
        let expect = Jet::from_terms(1, 3, [([1], c(2.0)), ([0], c(3.0))]).unwrap();
        assert_eq!(p.partial(0).unwrap().coeffs(), expect.coeffs());
        assert!(p.partial(1).is_err());
    }

    #[test]
    fn invert_examples() {
        // geometric series oracle: 1/(1+t) = sum (-t)^k
        let a = Jet::from_terms(1, 2, [([0], c(1.0)), ([1], c(1.0))]).unwrap();
        let inv = a.invert().unwrap();
        let expect: Vec<Complex64> = (0..=2).map(|k| c((-1.0f64).powi(k))).collect();
        assert_eq!(inv.coeffs(), &expect[..]);
        assert_eq!(
            Jet::real(1, 2, 2.0).invert().unwrap().constant_term(),
            c(0.5)
        );
        assert!(matches!(t(1, 2, 0).invert(), Err(Error::Singular(_))));
    }

    #[test]
    fn sqrt_examples() {
        // binomial series oracle: (1+2t)^(1/2) = 1 + t - t^2/2 + ...
        let a = Jet::from_terms(1, 2, [([0], c(1.0)), ([1], c(2.0))]).unwrap();
        let s = a.sqrt(c(1.0)).unwrap();
        let expect = [c(1.0), c(1.0), c(-0.5)];
        for (x, y) in s.coeffs().iter().zip(expect) {
            assert!((x - y).norm() < 1e-15);
        }
        let s = Jet::real(1, 2, 4.0).sqrt(c(-2.0)).unwrap();
        assert_eq!(s.constant_term(), c(-2.0));
        assert!(matches!(t(1, 2, 0).sqrt(c(0.0)), Err(Error::Singular(_))));
        assert!(matches!(
            Jet::real(1, 2, 4.0).sqrt(c(3.0)),
            Err(Error::InvalidAnchor { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        // (t^2) ∘ (u + 1) = 1 + 2u + u^2
        let sq = Jet::from_terms(1, 2, [([2], c(1.0))]).unwrap();
        let sub = JetVector::new(vec![t(1, 2, 0).add_constant(c(1.0))]).unwrap();
        let r = sq.compose(&sub).unwrap();
        assert_eq!(r.coeffs(), &[c(1.0), c(2.0), c(1.0)]);

        // identity substitution
        let a = Jet::from_terms(
            2,
            3,
            [([1, 1], c(2.0)), ([0, 3], c(1.5)), ([0, 0], c(-1.0))],
        )
        .unwrap();
        let id = JetVector::identity(2, 3);
        assert_eq!(a.compose(&id).unwrap(), a);

        // (t0 + t1) ∘ (u, u^2) = u + u^2
        let s = &t(2, 2, 0) + &t(2, 2, 1);
        let u = t(1, 2, 0);
        let sub = JetVector::new(vec![u.clone(), &u * &u]).unwrap();
        let r = s.compose(&sub).unwrap();
        assert_eq!(r.coeffs(), &[c(0.0), c(1.0), c(1.0)]);

        assert!(matches!(
            s.compose(&JetVector::identity(3, 2)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn residual_norm_examples() {
        assert_eq!(Jet::zero(2, 2).residual_norm(), 0.0);
        assert_eq!(
            Jet::constant(1, 2, Complex64::new(3.0, 4.0)).residual_norm(),
            5.0
        );
        let a = &t(2, 2, 0) - &t(2, 2, 1).scale_real(2.0);
        assert_eq!(a.residual_norm(), 2.0);
    }

    #[test]
    fn residual_norm_ignores_untrusted_degrees() {
        let a = Jet::from_terms(1, 3, [([3], c(1.0))])
            .unwrap()
            .with_valid_order(2);
        assert_eq!(a.residual_norm(), 0.0);
        assert_eq!(a.max_abs(), 1.0);
    }

    #[test]
    fn integrate_inverts_partial() {
        let a = Jet::from_terms(
            2,
            3,
            [([1, 1], c(2.0)), ([0, 2], c(1.0)), ([2, 0], c(-1.0))],
        )
        .unwrap();
        let back = a.partial(0).unwrap().integrate(0).unwrap();
        // terms without t0 are lost by the derivative
        let expect = Jet::from_terms(2, 3, [([1, 1], c(2.0)), ([2, 0], c(-1.0))]).unwrap();
        assert_eq!(back.coeffs(), expect.coeffs());
    }

    #[test]
    fn to_order_and_embed() {
        let a = Jet::from_terms(1, 3, [([3], c(1.0)), ([1], c(2.0))]).unwrap();
        let b = a.to_order(2);
        assert_eq!(b.coeffs(), &[c(0.0), c(2.0), c(0.0)]);
        let e = a.embed(3, 1).unwrap();
        assert_eq!(e.coeff(&[0, 3, 0]), c(1.0));
        assert_eq!(e.coeff(&[0, 1, 0]), c(2.0));
    }
}
