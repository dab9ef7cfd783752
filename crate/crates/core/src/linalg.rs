//! Dense complex helpers on top of nalgebra.
//!
//! nalgebra's generic gemm is slow for `Complex64`, so products are split
//! into four real products which go through the blocked f64 kernel.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn split(m: &CMatrix) -> (RMatrix, RMatrix) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

pub fn join(re: &RMatrix, im: &RMatrix) -> CMatrix {
    re.zip_map(im, Complex64::new)
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    join(&re, &im)
}

/// Real matrix times complex matrix.
pub fn rmatmul(a: &RMatrix, b: &CMatrix) -> CMatrix {
    let (br, bi) = split(b);
    join(&(a * &br), &(a * &bi))
}

/// Complex matrix times real matrix.
pub fn matmul_r(a: &CMatrix, b: &RMatrix) -> CMatrix {
    let (ar, ai) = split(a);
    join(&(&ar * b), &(&ai * b))
}

pub fn matvec(a: &CMatrix, v: &CVector) -> CVector {
    a * v
}

/// `a * rho * a^dagger`
pub fn sandwich(a: &CMatrix, rho: &CMatrix) -> CMatrix {
    matmul(&matmul(a, rho), &a.adjoint())
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Tr[a b]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

fn norm_one(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = norm_one(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.map(|z| z / f64::powi(2.0, squarings as i32));

    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..40 {
        term = matmul(&term, &scaled).map(|z| z / k as f64);
        sum += &term;
        if norm_one(&term) < 1e-18 * norm_one(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}
