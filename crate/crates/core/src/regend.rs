//! Regular endomorphisms: characteristic and minimal polynomials, cyclic
//! vectors, Jordan spectra and conjugacy classes.
//!
//! A matrix is regular when its characteristic and minimal polynomials
//! coincide, i.e. when it has a cyclic vector. For such matrices the
//! conjugacy class is determined by the eigenvalues together with their
//! algebraic multiplicities, one Jordan block per eigenvalue.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::Schur;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{column_scaled_rcond, krylov, CMat, CVec};

/// Default relative tolerance for eigenvalue clustering.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Krylov matrices with column-scaled reciprocal condition below this are
/// treated as singular.
pub const KRYLOV_RCOND_MIN: f64 = 1e-10;

/// Conjugacy class of a regular endomorphism: one `(eigenvalue, size)`
/// pair per Jordan block, sorted by real then imaginary part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanSpectrum {
    pub blocks: Vec<JordanBlock>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanBlock {
    pub eigenvalue: Complex64,
    pub size: usize,
}

impl JordanSpectrum {
    /// Builds a spectrum from `(eigenvalue, size)` pairs, sorting them
    /// canonically. Fails on zero sizes or repeated eigenvalues.
    pub fn new(blocks: impl IntoIterator<Item = (Complex64, usize)>) -> Result<JordanSpectrum> {
        let mut blocks: Vec<JordanBlock> = blocks
            .into_iter()
            .map(|(eigenvalue, size)| JordanBlock { eigenvalue, size })
            .collect();
        if blocks.is_empty() {
            return Err(Error::InvalidSpectrum("no blocks".into()));
        }
        if blocks.iter().any(|b| b.size == 0) {
            return Err(Error::InvalidSpectrum("block of size zero".into()));
        }
        let scale = blocks
            .iter()
            .map(|b| b.eigenvalue.norm())
            .fold(1.0, f64::max);
        let tol = CLUSTER_TOL * scale;
        for (i, a) in blocks.iter().enumerate() {
            for b in &blocks[i + 1..] {
                if (a.eigenvalue - b.eigenvalue).norm() <= tol {
                    return Err(Error::InvalidSpectrum(format!(
                        "eigenvalue {} appears in two blocks",
                        a.eigenvalue
                    )));
                }
            }
        }
        blocks.sort_by(|a, b| canonical_cmp(a.eigenvalue, b.eigenvalue, tol));
        Ok(JordanSpectrum { blocks })
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// Equality up to `tol` on eigenvalues, exact on sizes.
    pub fn approx_eq(&self, other: &JordanSpectrum, tol: f64) -> bool {
        self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.size == b.size && (a.eigenvalue - b.eigenvalue).norm() <= tol)
    }

    /// Largest distance between matched eigenvalues (infinite when the
    /// block structures differ).
    pub fn distance(&self, other: &JordanSpectrum) -> f64 {
        if self.blocks.len() != other.blocks.len()
            || self
                .blocks
                .iter()
                .zip(&other.blocks)
                .any(|(a, b)| a.size != b.size)
        {
            return f64::INFINITY;
        }
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a.eigenvalue - b.eigenvalue).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for JordanSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", b.eigenvalue, b.size)?;
        }
        write!(f, "]")
    }
}

fn canonical_cmp(a: Complex64, b: Complex64, tol: f64) -> Ordering {
    if (a.re - b.re).abs() > tol {
        a.re.total_cmp(&b.re)
    } else {
        a.im.total_cmp(&b.im)
    }
}

/// Coefficients `λ_0, …, λ_n` (ascending, `λ_n = 1`) of `det(zI − A)`,
/// computed with the division-free Berkowitz recursion.
pub fn characteristic_polynomial(a: &CMat) -> Vec<Complex64> {
    assert!(
        a.is_square(),
        "characteristic polynomial of a non-square matrix"
    );
    let n = a.nrows();
    let one = Complex64::new(1.0, 0.0);
    // highest degree first while building
    let mut poly = vec![one];
    for r in 0..n {
        // A_{r+1} = [[A_r, c], [row, a_rr]]
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(one);
        toeplitz.push(-a[(r, r)]);
        let mut w: Vec<Complex64> = (0..r).map(|i| a[(i, r)]).collect();
        for _ in 0..r {
            let s: Complex64 = (0..r).map(|j| a[(r, j)] * w[j]).sum();
            toeplitz.push(-s);
            w = (0..r)
                .map(|i| (0..r).map(|j| a[(i, j)] * w[j]).sum())
                .collect();
        }
        let mut next = vec![Complex64::new(0.0, 0.0); r + 2];
        for (i, out) in next.iter_mut().enumerate() {
            for (j, p) in poly.iter().enumerate() {
                if i >= j {
                    *out += toeplitz[i - j] * p;
                }
            }
        }
        poly = next;
    }
    poly.reverse();
    poly
}

/// Minimal polynomial of `v` under `A` (ascending, monic), from the linear
/// relation between `A^n v` and the Krylov basis. Equals the minimal
/// polynomial of `A` when `v` is cyclic.
pub fn krylov_polynomial(a: &CMat, v: &CVec) -> Result<Vec<Complex64>> {
    let coords = krylov_coordinates(a, v)?;
    let mut poly: Vec<Complex64> = coords.iter().map(|c| -c).collect();
    poly.push(Complex64::new(1.0, 0.0));
    Ok(poly)
}

// Coordinates of A^n v in the basis {v, Av, …, A^{n−1} v}.
fn krylov_coordinates(a: &CMat, v: &CVec) -> Result<CVec> {
    let n = a.nrows();
    let k = krylov(a, v);
    let rc = column_scaled_rcond(&k);
    if rc.is_nan() || rc <= KRYLOV_RCOND_MIN {
        return Err(Error::NotCyclic { rcond: rc });
    }
    let mut last = v.clone();
    for _ in 0..n {
        last = a * &last;
    }
    k.lu().solve(&last).ok_or(Error::NotCyclic { rcond: 0.0 })
}

/// Where a cyclic-vector probe came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Probe {
    Basis(usize),
    AllOnes,
    Random { seed: u64, draw: usize },
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probe::Basis(i) => write!(f, "e_{i}"),
            Probe::AllOnes => write!(f, "all-ones"),
            Probe::Random { seed, draw } => write!(f, "random(seed={seed}, draw={draw})"),
        }
    }
}

/// Order in which deterministic probes are tried.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeOrder {
    /// `e_0, …, e_{n−1}`, all-ones, then random draws.
    #[default]
    BasisFirst,
    /// All-ones, `e_{n−1}, …, e_0`, then random draws.
    OnesFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSettings {
    pub order: ProbeOrder,
    pub seed: u64,
    pub random_draws: usize,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            order: ProbeOrder::BasisFirst,
            seed: 0,
            random_draws: 1,
        }
    }
}

/// Outcome of the cyclic-vector search.
#[derive(Clone, Debug, PartialEq)]
pub struct Regularity {
    pub regular: bool,
    /// Best column-scaled reciprocal condition number of a Krylov matrix.
    pub rcond: f64,
    /// Probe that achieved `rcond`.
    pub probe: Probe,
    /// The cyclic vector, when one was found.
    pub cyclic_vector: Option<CVec>,
}

pub fn is_regular(a: &CMat) -> Regularity {
    is_regular_with(a, &ProbeSettings::default())
}

/// Searches for a cyclic vector over a fixed probe sequence and stops at
/// the first probe whose Krylov matrix is well conditioned.
pub fn is_regular_with(a: &CMat, settings: &ProbeSettings) -> Regularity {
    assert!(a.is_square(), "regularity of a non-square matrix");
    let n = a.nrows();
    let mut probes: Vec<(Probe, CVec)> = Vec::new();
    let basis = |i: usize| {
        let mut v = CVec::zeros(n);
        v[i] = Complex64::new(1.0, 0.0);
        (Probe::Basis(i), v)
    };
    let ones = (
        Probe::AllOnes,
        CVec::from_element(n, Complex64::new(1.0, 0.0)),
    );
    match settings.order {
        ProbeOrder::BasisFirst => {
            probes.extend((0..n).map(basis));
            probes.push(ones);
        }
        ProbeOrder::OnesFirst => {
            probes.push(ones);
            probes.extend((0..n).rev().map(basis));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    for draw in 0..settings.random_draws {
        let v = CVec::from_fn(n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        probes.push((
            Probe::Random {
                seed: settings.seed,
                draw,
            },
            v,
        ));
    }

    let mut best = Regularity {
        regular: false,
        rcond: 0.0,
        probe: probes[0].0,
        cyclic_vector: None,
    };
    for (probe, v) in probes {
        let rc = column_scaled_rcond(&krylov(a, &v));
        if rc > best.rcond {
            best.rcond = rc;
            best.probe = probe;
        }
        if rc > KRYLOV_RCOND_MIN {
            return Regularity {
                regular: true,
                rcond: rc,
                probe,
                cyclic_vector: Some(v),
            };
        }
    }
    best
}

/// Diagnostics of the eigenvalue clustering behind a [`JordanSpectrum`].
#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    /// Requested relative tolerance.
    pub tol: f64,
    /// Absolute radius actually used for single-linkage clustering.
    pub radius: f64,
    /// Smallest distance between eigenvalues in different clusters
    /// (infinite for a single cluster).
    pub min_gap: f64,
    pub regularity: Regularity,
}

pub fn jordan_spectrum(a: &CMat) -> Result<JordanSpectrum> {
    jordan_spectrum_with(a, CLUSTER_TOL, &ProbeSettings::default()).map(|(s, _)| s)
}

/// Eigenvalues clustered into Jordan blocks.
///
/// A Jordan block of size `k` perturbed by rounding errors of size `δ`
/// splits into eigenvalues spread over a disc of radius about `δ^{1/k}`, so
/// a fixed tolerance can break genuine blocks apart. The clustering radius
/// is therefore `max(tol, 10 (1000 ε)^{1/k}) · scale`, where `k` is the size
/// of the largest cluster, found by iterating down from `k = n`. The
/// spectrum is rejected as ambiguous when two clusters come within ten
/// radii of each other.
pub fn jordan_spectrum_with(
    a: &CMat,
    tol: f64,
    probes: &ProbeSettings,
) -> Result<(JordanSpectrum, Clustering)> {
    let regularity = is_regular_with(a, probes);
    if !regularity.regular {
        return Err(Error::NotRegular {
            rcond: regularity.rcond,
        });
    }
    let n = a.nrows();
    let eig = eigenvalues(a)?;
    let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let radius_for = |k: usize| {
        let split = 10.0 * (1e3 * f64::EPSILON).powf(1.0 / k as f64);
        tol.max(split) * scale
    };

    let mut k = n;
    let (mut labels, mut radius);
    loop {
        radius = radius_for(k);
        labels = single_linkage(&eig, radius);
        let largest = (0..n)
            .map(|c| labels.iter().filter(|&&l| l == c).count())
            .max()
            .unwrap_or(1);
        if largest >= k {
            break;
        }
        k = largest;
    }

    let mut min_gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            if labels[i] != labels[j] {
                min_gap = min_gap.min((eig[i] - eig[j]).norm());
            }
        }
    }
    if min_gap < 10.0 * radius {
        return Err(Error::AmbiguousClustering {
            gap: min_gap,
            threshold: radius,
        });
    }

    let mut blocks: Vec<(Complex64, usize)> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for &l in &labels {
        if seen.contains(&l) {
            continue;
        }
        seen.push(l);
        let members: Vec<Complex64> = (0..n).filter(|&i| labels[i] == l).map(|i| eig[i]).collect();
        let mean = members.iter().sum::<Complex64>() / members.len() as f64;
        blocks.push((mean, members.len()));
    }
    let mut blocks: Vec<JordanBlock> = blocks
        .into_iter()
        .map(|(eigenvalue, size)| JordanBlock { eigenvalue, size })
        .collect();
    blocks.sort_by(|x, y| canonical_cmp(x.eigenvalue, y.eigenvalue, radius));
    Ok((
        JordanSpectrum { blocks },
        Clustering {
            tol,
            radius,
            min_gap,
            regularity,
        },
    ))
}

fn eigenvalues(a: &CMat) -> Result<Vec<Complex64>> {
    // nalgebra's complex QR iteration can stall on exactly nilpotent input
    // (zero shifts); the transpose or a shifted copy has the same spectrum
    // up to the shift.
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    let shift = Complex64::new(0.3127, 0.1291) * scale;
    let n = a.nrows();
    let attempts = [
        (a.clone(), Complex64::new(0.0, 0.0)),
        (a.transpose(), Complex64::new(0.0, 0.0)),
        (a + CMat::identity(n, n) * shift, shift),
    ];
    for (m, s) in attempts {
        if let Some(ev) = Schur::try_new(m, f64::EPSILON, 10_000).and_then(|x| x.eigenvalues()) {
            return Ok(ev.iter().map(|z| z - s).collect());
        }
    }
    Err(Error::Solver("Schur decomposition did not converge".into()))
}

// Connected components of the graph joining points closer than `radius`.
fn single_linkage(points: &[Complex64], radius: f64) -> Vec<usize> {
    let n = points.len();
    let mut labels: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if labels[j] < labels[i] && (points[i] - points[j]).norm() <= radius {
                    labels[i] = labels[j];
                    changed = true;
                }
            }
        }
        if !changed {
            return labels;
        }
    }
}

/// Matrix of `A` in the basis `{v, Av, …, A^{n−1}v}`: ones on the
/// subdiagonal and the coordinates of `A^n v` in the last column.
pub fn cyclic_basis_representation(a: &CMat, v: &CVec) -> Result<CMat> {
    let n = a.nrows();
    let coords = krylov_coordinates(a, v)?;
    let mut c = CMat::zeros(n, n);
    for i in 1..n {
        c[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    c.set_column(n - 1, &coords);
    Ok(c)
}

/// Whether two regular matrices are conjugate: same size and the same
/// Jordan spectrum, eigenvalues matched within the clustering radius.
pub fn same_conjugacy_class(a: &CMat, b: &CMat) -> Result<bool> {
    let (sa, ca) = jordan_spectrum_with(a, CLUSTER_TOL, &ProbeSettings::default())?;
    let (sb, cb) = jordan_spectrum_with(b, CLUSTER_TOL, &ProbeSettings::default())?;
    if a.nrows() != b.nrows() {
        return Ok(false);
    }
    Ok(sa.approx_eq(&sb, ca.radius.max(cb.radius)))
}

/// Everything the other modules need to know about a regular matrix.
#[derive(Clone, Debug)]
pub struct EndoAnalysis {
    pub matrix: CMat,
    pub char_poly: Vec<Complex64>,
    pub min_poly: Vec<Complex64>,
    pub spectrum: JordanSpectrum,
    pub clustering: Clustering,
    pub cyclic_vector: Option<CVec>,
}

pub fn analyze(a: &CMat, tol: f64, probes: &ProbeSettings) -> Result<EndoAnalysis> {
    let (spectrum, clustering) = jordan_spectrum_with(a, tol, probes)?;
    let v = clustering
        .regularity
        .cyclic_vector
        .clone()
        .expect("regular matrix has a cyclic vector");
    Ok(EndoAnalysis {
        matrix: a.clone(),
        char_poly: characteristic_polynomial(a),
        min_poly: krylov_polynomial(a, &v)?,
        spectrum,
        cyclic_vector: Some(v),
        clustering,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, cmat};

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    fn jordan_lower(a: Complex64, n: usize) -> CMat {
        let mut m = CMat::from_diagonal_element(n, n, a);
        for i in 1..n {
            m[(i, i - 1)] = c64(1.0, 0.0);
        }
        m
    }

    #[test]
    fn nilpotent_shift_spectrum() {
        // the plain complex Schur iteration stalls on this matrix
        for n in 1..=5 {
            let s = jordan_spectrum(&jordan_lower(c64(0.0, 0.0), n)).unwrap();
            assert_eq!(s.blocks.len(), 1);
            assert_eq!(s.blocks[0].size, n);
            assert!(s.blocks[0].eigenvalue.norm() < 1e-6);
        }
    }

    #[test]
    fn char_poly_examples() {
        let n = cmat(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(
            characteristic_polynomial(&n),
            vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]
        );
        let d = cmat(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        assert!(close(
            &characteristic_polynomial(&d),
            &[c64(2.0, 0.0), c64(-3.0, 0.0), c64(1.0, 0.0)],
            0.0
        ));
        // z^2 - 2az + a^2 from the 2x2 determinant
        let a = c64(0.3, -1.2);
        let expect = [a * a, -a * 2.0, c64(1.0, 0.0)];
        assert!(close(
            &characteristic_polynomial(&jordan_lower(a, 2)),
            &expect,
            1e-15
        ));
    }

    #[test]
    fn regularity_examples() {
        assert!(is_regular(&jordan_lower(c64(2.0, 1.0), 4)).regular);
        let id = CMat::identity(2, 2);
        let r = is_regular(&id);
        assert!(!r.regular);
        assert!(r.rcond < 1e-12);
        let d = cmat(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let r = is_regular(&d);
        assert!(r.regular);
        assert_eq!(r.probe, Probe::AllOnes);
    }

    #[test]
    fn spectrum_examples() {
        let a = c64(0.5, 2.0);
        let s = jordan_spectrum(&jordan_lower(a, 2)).unwrap();
        assert_eq!(s.blocks.len(), 1);
        assert_eq!(s.blocks[0].size, 2);
        assert!((s.blocks[0].eigenvalue - a).norm() < 1e-10);

        let s = jordan_spectrum(&cmat(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        let expect = JordanSpectrum::new([(c64(1.0, 0.0), 1), (c64(2.0, 0.0), 1)]).unwrap();
        assert!(s.approx_eq(&expect, 1e-12));

        assert!(matches!(
            jordan_spectrum(&CMat::identity(2, 2)),
            Err(Error::NotRegular { .. })
        ));
    }

    #[test]
    fn close_eigenvalues_are_ambiguous() {
        let m = cmat(2, 2, &[1.0, 0.0, 0.0, 1.0 + 5e-6]);
        assert!(matches!(
            jordan_spectrum(&m),
            Err(Error::AmbiguousClustering { .. })
        ));
    }

    #[test]
    fn cyclic_representation_examples() {
        let j = jordan_lower(c64(0.0, 0.0), 2);
        let v = CVec::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]);
        assert_eq!(cyclic_basis_representation(&j, &v).unwrap(), j);

        let d = cmat(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let v = CVec::from_element(2, c64(1.0, 0.0));
        let c = cyclic_basis_representation(&d, &v).unwrap();
        let expect = cmat(2, 2, &[0.0, -2.0, 1.0, 3.0]);
        assert!((c - expect).norm() < 1e-13);

        assert!(matches!(
            cyclic_basis_representation(&d, &CVec::zeros(2)),
            Err(Error::NotCyclic { .. })
        ));
    }

    #[test]
    fn conjugacy_examples() {
        let a = c64(1.5, -0.5);
        let j = jordan_lower(a, 2);
        // companion matrix of z^2 - 2az + a^2
        let mut comp = CMat::zeros(2, 2);
        comp[(1, 0)] = c64(1.0, 0.0);
        comp[(0, 1)] = -a * a;
        comp[(1, 1)] = a * 2.0;
        assert!(same_conjugacy_class(&j, &comp).unwrap());
        let d12 = cmat(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let d13 = cmat(2, 2, &[1.0, 0.0, 0.0, 3.0]);
        assert!(!same_conjugacy_class(&d12, &d13).unwrap());
        assert!(!same_conjugacy_class(&d12, &jordan_lower(a, 3)).unwrap());
    }

    #[test]
    fn spectrum_constructor_rejects_repeats() {
        let a = c64(1.0, 0.0);
        assert!(matches!(
            JordanSpectrum::new([(a, 1), (a, 1)]),
            Err(Error::InvalidSpectrum(_))
        ));
    }

    #[test]
    fn ones_first_probe_order() {
        let d = cmat(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let settings = ProbeSettings {
            order: ProbeOrder::OnesFirst,
            ..ProbeSettings::default()
        };
        assert_eq!(is_regular_with(&d, &settings).probe, Probe::AllOnes);
        let j = jordan_lower(c64(0.0, 0.0), 3);
        let r = is_regular_with(&j, &settings);
        assert!(r.regular);
        assert_eq!(r.probe, Probe::AllOnes);
    }
}
