//! Dense complex helpers shared by the operator and solver modules.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;

/// `c = alpha * a * b + beta * c` on column-major storage.
pub fn gemm_into(alpha: C64, a: &CMatrix, b: &CMatrix, beta: C64, c: &mut CMatrix) {
    let (m, k) = a.shape();
    let (kb, n) = b.shape();
    assert_eq!(k, kb, "inner dimensions differ");
    assert_eq!(c.shape(), (m, n), "output shape differs");
    if m == 0 || n == 0 {
        return;
    }
    // SAFETY: Complex<f64> is repr(C) with layout [re, im]; nalgebra's dense
    // storage is contiguous column-major with the strides passed here, and the
    // output does not alias the inputs (it is borrowed mutably).
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            a.as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [beta.re, beta.im],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut c = CMatrix::zeros(a.nrows(), b.ncols());
    gemm_into(C64::new(1.0, 0.0), a, b, C64::new(0.0, 0.0), &mut c);
    c
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}
