//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cmat(rows: usize, cols: usize, re_row_major: &[f64]) -> CMat {
    CMat::from_iterator(
        rows,
        cols,
        (0..rows * cols).map(|k| {
            let (i, j) = (k % rows, k / rows);
            c64(re_row_major[i * cols + j], 0.0)
        }),
    )
}

/// Ratio of extreme singular values; 0 for an empty or zero matrix.
pub fn rcond(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

/// [`rcond`] after scaling every column to unit length (zero columns make
/// the result 0).
pub fn column_scaled_rcond(m: &CMat) -> f64 {
    let mut s = m.clone();
    for mut col in s.column_iter_mut() {
        let n = col.norm();
        if n == 0.0 {
            return 0.0;
        }
        col /= Complex64::new(n, 0.0);
    }
    rcond(&s)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Krylov matrix `[v, Av, …, A^{n−1}v]`.
pub fn krylov(a: &CMat, v: &CVec) -> CMat {
    let n = a.nrows();
    let mut k = CMat::zeros(n, n);
    let mut w = v.clone();
    for j in 0..n {
        k.set_column(j, &w);
        w = a * &w;
    }
    k
}
